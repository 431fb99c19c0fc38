use rayon::prelude::*;

use super::exact::{check_budget, collapse, enumerate};
use super::{layout_points, weighted_convolution, CombinationCdf, GridLayout, GridSpec, Integrator, WeightVector};
use super::DEFAULT_TUPLE_BUDGET;
use crate::distributions::FamilySpec;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::Cdf;

const WORKING_POINTS: usize = 8192;
const TAIL: f64 = 1e-12;

/// CDF of `θ·X` for a parametric law.
///
/// `truncation_slack` bounds the mass missing from a truncated discrete law:
/// the true CDF lies in `[cdf, cdf + truncation_slack]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCdf {
    pub cdf: CombinationCdf,
    pub truncation_slack: f64,
}

impl ParametricCdf {
    pub fn eval(&self, x: f64) -> f64 {
        self.cdf.eval(x)
    }

    pub fn upper(&self, x: f64) -> f64 {
        (self.cdf.eval(x) + self.truncation_slack).min(1.0)
    }
}

impl Cdf for ParametricCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// Output grid for a parametric combination: central 99.8% of `Σθ·X` unless a
/// range is fixed.
fn output_grid(family: &FamilySpec, theta: &WeightVector, spec: &GridSpec) -> Result<Vec<f64>> {
    if spec.points < 2 {
        return Err(Error::ParameterDomain("a grid needs at least 2 points".into()));
    }
    let t = theta.total();
    let med = family.quantile_unchecked(0.5);
    let iqr = family.quantile_unchecked(0.75) - family.quantile_unchecked(0.25);
    let (lo, hi) = match spec.range {
        Some((lo, hi)) if lo < hi && lo.is_finite() && hi.is_finite() => (lo, hi),
        Some((lo, hi)) => {
            return Err(Error::ParameterDomain(format!("bad grid range {lo}:{hi}")))
        }
        None => (
            t * family.quantile_unchecked(1e-3),
            t * family.quantile_unchecked(1.0 - 1e-3),
        ),
    };
    Ok(layout_points(spec.layout, spec.points, lo, hi, t * med, t * iqr / 2.0))
}

/// CDF of `θ·X` for i.i.d. `X` from `family`.
///
/// Discrete laws are convolved exactly (subject to the tuple budget).
/// Continuous laws are integrated level by level over the quantile function;
/// with two summands the result is exact up to quadrature error at every
/// output point.
pub fn parametric_combination_cdf(
    family: &FamilySpec,
    theta: &WeightVector,
    grid: &GridSpec,
) -> Result<ParametricCdf> {
    if let Some(d) = family.discrete() {
        check_budget(d.support().len(), theta.len(), DEFAULT_TUPLE_BUDGET)?;
        let (sums, mass) = enumerate(d.support(), d.pmf(), theta.as_slice());
        let cdf = collapse(sums, mass);
        let kept = 1.0 - d.truncation_mass();
        let slack = 1.0 - kept.powi(theta.len() as i32);
        return Ok(ParametricCdf {
            cdf,
            truncation_slack: slack,
        });
    }
    let out = output_grid(family, theta, grid)?;
    let th = theta.as_slice();
    let s = th.len();
    let values: Vec<f64> = if s == 1 {
        out.iter().map(|x| family.cdf(x / th[0])).collect()
    } else if s == 2 {
        level_two(family, th[0], th[1], &out)
    } else {
        let (qlo, qhi) = (
            family.quantile_unchecked(TAIL),
            family.quantile_unchecked(1.0 - TAIL),
        );
        let partial = WeightVector::new(th[..s - 1].to_vec())?;
        let (lo, hi) = partial.partial_support(qlo, qhi);
        let t = partial.total();
        let med = family.quantile_unchecked(0.5);
        let iqr = family.quantile_unchecked(0.75) - family.quantile_unchecked(0.25);
        let work = layout_points(GridLayout::Asinh, WORKING_POINTS, lo, hi, t * med, t * iqr / 2.0);
        let mut prev = CombinationCdf::GridValues {
            values: level_two(family, th[0], th[1], &work),
            grid: work.clone(),
        };
        for &tk in &th[2..s - 1] {
            let vals = next_level(family, tk, &prev, &work);
            prev = CombinationCdf::GridValues {
                grid: work.clone(),
                values: vals,
            };
        }
        next_level(family, th[s - 1], &prev, &out)
    };
    let mut values = values;
    super::monotone_clamp(&mut values);
    Ok(ParametricCdf {
        cdf: CombinationCdf::GridValues { grid: out, values },
        truncation_slack: 0.0,
    })
}

fn level_two(family: &FamilySpec, t1: f64, t2: f64, xs: &[f64]) -> Vec<f64> {
    xs.par_iter()
        .map(|&x| {
            let f = |y: f64| family.cdf(y);
            weighted_convolution(t1, t2, Integrator::Family(family), &f, x).unwrap_or(f64::NAN)
        })
        .collect()
}

fn next_level(family: &FamilySpec, tk: f64, prev: &CombinationCdf, xs: &[f64]) -> Vec<f64> {
    xs.par_iter()
        .map(|&x| {
            quadrature::integrate_tol(
                |p| prev.eval(x - tk * family.quantile_unchecked(p)),
                0.0,
                1.0,
                1e-8,
            )
        })
        .collect()
}

/// `P(θ·X ≤ x)` at a single point by nested quadrature.
///
/// Slow for more than three summands; meant for spot checks and for the
/// covariance kernels.
pub fn pointwise_combination_cdf(family: &FamilySpec, theta: &[f64], x: f64) -> f64 {
    pointwise(family, theta, x, 1e-9)
}

pub(crate) fn pointwise(family: &FamilySpec, theta: &[f64], x: f64, tol: f64) -> f64 {
    let s = theta.len();
    if s == 0 {
        return if x >= 0.0 { 1.0 } else { 0.0 };
    }
    if s == 1 {
        return family.cdf(x / theta[0]);
    }
    let head = &theta[..s - 1];
    let ts = theta[s - 1];
    if let Some(d) = family.discrete() {
        return d
            .support()
            .iter()
            .zip(d.pmf())
            .map(|(v, w)| w * pointwise(family, head, x - ts * v, tol))
            .sum::<f64>()
            .clamp(0.0, 1.0);
    }
    let inner_tol = tol * 0.1;
    quadrature::integrate_tol(
        |p| pointwise(family, head, x - ts * family.quantile_unchecked(p), inner_tol),
        0.0,
        1.0,
        tol,
    )
    .clamp(0.0, 1.0)
}
