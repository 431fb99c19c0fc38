//! CDFs of weighted sums `θ₁X₁ + … + θₛXₛ` of i.i.d. copies.
//!
//! Three evaluators share one representation, [`CombinationCdf`]:
//! exhaustive enumeration of index tuples for small samples, a grid
//! recursion that stays exact at grid points for the first two summands, and
//! a quadrature recursion for parametric laws.

mod exact;
mod grid;
pub(crate) mod parametric;
pub(crate) mod plan;

pub use plan::Evaluator;

use std::fmt;
use std::str::FromStr;

use crate::distributions::FamilySpec;
use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::Cdf;

pub use exact::{exact_combination_cdf, exact_combination_cdf_with_budget};
pub use grid::{grid_combination_cdf, grid_combination_cdf_on};
pub use parametric::{parametric_combination_cdf, pointwise_combination_cdf, ParametricCdf};

/// Largest number of index tuples the exact evaluator will enumerate.
pub const DEFAULT_TUPLE_BUDGET: u64 = 20_000_000;

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Nonempty vector of positive finite weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ParameterDomain("weight vector is empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::ParameterDomain(format!(
                "weights must be positive and finite, got {w}"
            )));
        }
        Ok(WeightVector(weights))
    }

    /// `(1/s, …, 1/s)`, the sample-mean weights.
    pub fn sample_mean(s: usize) -> Self {
        assert!(s > 0, "sample_mean needs s >= 1");
        WeightVector(vec![1.0 / s as f64; s])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        WeightVector::new(self.0.iter().map(|w| w * factor).collect())
    }

    /// Rescaled to sum to one.
    pub fn normalized(&self) -> Self {
        let t = self.total();
        WeightVector(self.0.iter().map(|w| w / t).collect())
    }

    /// Weights in the given order: `result[i] = self[order[i]]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::ParameterDomain("permutation length mismatch".into()));
        }
        let mut seen = vec![false; order.len()];
        for &i in order {
            if i >= order.len() || seen[i] {
                return Err(Error::ParameterDomain("not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(WeightVector(order.iter().map(|&i| self.0[i]).collect()))
    }

    /// Range of every partial sum `θ₁+…+θₖ` used by the recursion.
    pub(crate) fn partial_totals(&self) -> (f64, f64) {
        let start = if self.len() == 1 { 0 } else { 1 };
        let mut acc = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (k, w) in self.0.iter().enumerate() {
            acc += w;
            if k >= start {
                lo = lo.min(acc);
                hi = hi.max(acc);
            }
        }
        (lo, hi)
    }

    /// Interval containing every partial weighted sum of values in `[min, max]`.
    pub(crate) fn partial_support(&self, min: f64, max: f64) -> (f64, f64) {
        let (tlo, thi) = self.partial_totals();
        let lo = (tlo * min).min(thi * min);
        let hi = (tlo * max).max(thi * max);
        (lo, hi)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Parses comma separated weights; each entry may be a fraction such as `1/3`.
impl FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: String| Error::Parse {
            what: "weight vector",
            input: s.to_string(),
            reason,
        };
        let mut out = Vec::new();
        for part in s.split([',', ';']) {
            let part = part.trim();
            if part.is_empty() {
                return Err(parse_err("empty entry".into()));
            }
            let v = match part.split_once('/') {
                Some((a, b)) => {
                    let a: f64 = a.trim().parse().map_err(|e| parse_err(format!("{e}")))?;
                    let b: f64 = b.trim().parse().map_err(|e| parse_err(format!("{e}")))?;
                    a / b
                }
                None => part.parse().map_err(|e| parse_err(format!("{e}")))?,
            };
            out.push(v);
        }
        WeightVector::new(out)
    }
}

/// Spacing of grid points inside the grid range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridLayout {
    /// Equally spaced.
    Uniform,
    /// Equally spaced in `asinh((x - c) / scale)`, with location and scale
    /// taken from the data. Keeps resolution in the bulk under heavy tails.
    #[default]
    Asinh,
}

impl FromStr for GridLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(GridLayout::Uniform),
            "asinh" => Ok(GridLayout::Asinh),
            other => Err(Error::Parse {
                what: "grid layout",
                input: other.to_string(),
                reason: "expected uniform or asinh".into(),
            }),
        }
    }
}

/// Number of points, optional fixed range and layout of an evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    pub range: Option<(f64, f64)>,
    pub layout: GridLayout,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: DEFAULT_GRID_POINTS,
            range: None,
            layout: GridLayout::Asinh,
        }
    }
}

impl GridSpec {
    pub fn with_points(points: usize) -> Self {
        GridSpec {
            points,
            ..GridSpec::default()
        }
    }

    /// Grid for combinations of `sample` under each of `weights`.
    ///
    /// The range must contain every partial weighted sum reachable by the
    /// recursion, otherwise [`Error::Range`] is returned.
    pub fn build(&self, sample: &Sample, weights: &[&WeightVector]) -> Result<Vec<f64>> {
        let center = sample.value_quantile(0.5);
        let iqr = sample.value_quantile(0.75) - sample.value_quantile(0.25);
        self.build_from_parts(sample.min(), sample.max(), center, iqr, weights)
    }

    pub(crate) fn build_from_parts(
        &self,
        min: f64,
        max: f64,
        median: f64,
        iqr: f64,
        weights: &[&WeightVector],
    ) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::ParameterDomain("a grid needs at least 2 points".into()));
        }
        let mut need_lo = f64::INFINITY;
        let mut need_hi = f64::NEG_INFINITY;
        let mut mean_total = 0.0;
        for w in weights {
            let (lo, hi) = w.partial_support(min, max);
            need_lo = need_lo.min(lo);
            need_hi = need_hi.max(hi);
            mean_total += w.total();
        }
        mean_total /= weights.len().max(1) as f64;
        let (lo, hi) = match self.range {
            Some((lo, hi)) => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::ParameterDomain(format!("bad grid range {lo}:{hi}")));
                }
                if lo > need_lo || hi < need_hi {
                    return Err(Error::Range {
                        lo,
                        hi,
                        need_lo,
                        need_hi,
                    });
                }
                (lo, hi)
            }
            None => {
                let width = need_hi - need_lo;
                let pad = if width > 0.0 {
                    0.01 * width
                } else {
                    0.01 * need_lo.abs().max(1.0)
                };
                (need_lo - pad, need_hi + pad)
            }
        };
        Ok(layout_points(
            self.layout,
            self.points,
            lo,
            hi,
            mean_total * median,
            mean_total * iqr / 2.0,
        ))
    }
}

/// `n` increasing points from `lo` to `hi` inclusive.
pub(crate) fn layout_points(
    layout: GridLayout,
    n: usize,
    lo: f64,
    hi: f64,
    center: f64,
    scale: f64,
) -> Vec<f64> {
    let mut pts: Vec<f64> = match layout {
        GridLayout::Uniform => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
        GridLayout::Asinh => {
            let scale = if scale.is_finite() && scale > 0.0 {
                scale
            } else {
                (hi - lo) / 4.0
            };
            let c = center.clamp(lo, hi);
            let ulo = ((lo - c) / scale).asinh();
            let uhi = ((hi - c) / scale).asinh();
            (0..n)
                .map(|i| {
                    let u = ulo + (uhi - ulo) * i as f64 / (n - 1) as f64;
                    c + scale * u.sinh()
                })
                .collect()
        }
    };
    pts[0] = lo;
    pts[n - 1] = hi;
    pts.dedup_by(|b, a| !(*b > *a));
    pts
}

/// CDF of a weighted sum, either as a step function or as grid values.
#[derive(Debug, Clone, PartialEq)]
pub enum CombinationCdf {
    /// Right-continuous step function; `cumulative[i]` is the mass at or below
    /// `points[i]`.
    ExactJumps {
        points: Vec<f64>,
        masses: Vec<f64>,
        cumulative: Vec<f64>,
    },
    /// Values at increasing grid points, linearly interpolated in between and
    /// held constant outside the grid.
    GridValues { grid: Vec<f64>, values: Vec<f64> },
}

impl CombinationCdf {
    pub(crate) fn from_jumps(points: Vec<f64>, masses: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = masses
            .iter()
            .map(|m| {
                acc += m;
                acc.min(1.0)
            })
            .collect();
        CombinationCdf::ExactJumps {
            points,
            masses,
            cumulative,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CombinationCdf::ExactJumps { .. })
    }

    /// Jump locations or grid points.
    pub fn points(&self) -> &[f64] {
        match self {
            CombinationCdf::ExactJumps { points, .. } => points,
            CombinationCdf::GridValues { grid, .. } => grid,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CombinationCdf::ExactJumps {
                points, cumulative, ..
            } => {
                let k = points.partition_point(|&p| p <= x);
                if k == 0 {
                    0.0
                } else {
                    cumulative[k - 1]
                }
            }
            CombinationCdf::GridValues { grid, values } => {
                let n = grid.len();
                if x <= grid[0] {
                    return values[0];
                }
                if x >= grid[n - 1] {
                    return values[n - 1];
                }
                let k = grid.partition_point(|&g| g <= x) - 1;
                interpolate(grid, values, k, x)
            }
        }
    }

    /// Values at increasing `xs`, in one sweep.
    pub fn eval_sorted(&self, xs: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(xs.len());
        match self {
            CombinationCdf::ExactJumps {
                points, cumulative, ..
            } => {
                let mut k = 0;
                for &x in xs {
                    while k < points.len() && points[k] <= x {
                        k += 1;
                    }
                    out.push(if k == 0 { 0.0 } else { cumulative[k - 1] });
                }
            }
            CombinationCdf::GridValues { grid, values } => {
                let n = grid.len();
                let mut k = 0;
                for &x in xs {
                    if x <= grid[0] {
                        out.push(values[0]);
                    } else if x >= grid[n - 1] {
                        out.push(values[n - 1]);
                    } else {
                        while grid[k + 1] <= x {
                            k += 1;
                        }
                        out.push(interpolate(grid, values, k, x));
                    }
                }
            }
        }
        out
    }
}

impl Cdf for CombinationCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

#[inline]
fn interpolate(grid: &[f64], values: &[f64], k: usize, x: f64) -> f64 {
    let t = (x - grid[k]) / (grid[k + 1] - grid[k]);
    values[k] + t * (values[k + 1] - values[k])
}

/// Sorted union of two increasing sequences, duplicates removed.
pub(crate) fn sorted_union(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let v = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

fn sup_by(a: &CombinationCdf, b: &CombinationCdf, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let pts = sorted_union(a.points(), b.points());
    let va = a.eval_sorted(&pts);
    let vb = b.eval_sorted(&pts);
    let mut best = 0.0;
    let mut at = pts.first().copied().unwrap_or(0.0);
    for ((x, pa), pb) in pts.iter().zip(&va).zip(&vb) {
        let d = f(pa - pb);
        if d > best {
            best = d;
            at = *x;
        }
    }
    (best, at)
}

/// `sup_x max(A(x) - B(x), 0)` and the smallest point attaining it.
///
/// The supremum runs over the union of both representations' points, which
/// is exhaustive for step functions and for piecewise linear grid values.
/// When the difference is never positive the witness is the smallest point.
pub fn sup_positive_diff(a: &CombinationCdf, b: &CombinationCdf) -> (f64, f64) {
    sup_by(a, b, |d| d)
}

/// `sup_x |A(x) - B(x)|` and the smallest point attaining it.
pub fn sup_abs_diff(a: &CombinationCdf, b: &CombinationCdf) -> (f64, f64) {
    sup_by(a, b, f64::abs)
}

/// Mixing law for [`weighted_convolution`].
#[derive(Debug, Clone, Copy)]
pub enum Integrator<'a> {
    Atoms(&'a Sample),
    Family(&'a FamilySpec),
}

/// `∫ G((x - θ₂t)/θ₁) dF(t)`, the CDF of `θ₁Y + θ₂X` at `x` for `Y ~ G`, `X ~ F`.
pub fn weighted_convolution<G: Cdf + ?Sized>(
    theta1: f64,
    theta2: f64,
    f: Integrator<'_>,
    g: &G,
    x: f64,
) -> Result<f64> {
    if !(theta1 > 0.0) || !theta1.is_finite() {
        return Err(Error::Domain(format!("theta1 must be positive, got {theta1}")));
    }
    if !(theta2 >= 0.0) || !theta2.is_finite() {
        return Err(Error::Domain(format!("theta2 must be nonnegative, got {theta2}")));
    }
    let inner = |t: f64| g.cdf((x - theta2 * t) / theta1);
    let v = match f {
        Integrator::Atoms(s) => s
            .values()
            .iter()
            .zip(s.weights())
            .filter(|(_, w)| **w > 0.0)
            .map(|(v, w)| w * inner(*v))
            .sum(),
        Integrator::Family(fam) => match fam.discrete() {
            Some(d) => d
                .support()
                .iter()
                .zip(d.pmf())
                .map(|(v, w)| w * inner(*v))
                .sum(),
            None if theta2 == 0.0 => g.cdf(x / theta1),
            None => quadrature::integrate_tol(
                |p| inner(fam.quantile_unchecked(p)),
                0.0,
                1.0,
                1e-8,
            ),
        },
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Running maximum followed by clamping to `[0, 1]`.
pub(crate) fn monotone_clamp(values: &mut [f64]) {
    let mut run = 0.0f64;
    for v in values.iter_mut() {
        run = run.max(*v);
        *v = run.clamp(0.0, 1.0);
    }
}
