//! Precomputed evaluation of `F_θ − F_η` for many reweightings of one sample.

use super::exact::{check_budget, tuple_count};
use super::grid::{grid_levels, Scratch};
use super::{GridSpec, WeightVector};
use crate::empirical::Sample;
use crate::error::Result;

/// Which evaluator a computation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluator {
    /// Exact when both enumerations fit the tuple budget, grid otherwise.
    #[default]
    Auto,
    Exact,
    Grid,
}

impl std::str::FromStr for Evaluator {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(Evaluator::Auto),
            "exact" => Ok(Evaluator::Exact),
            "grid" => Ok(Evaluator::Grid),
            other => Err(crate::Error::Parse {
                what: "evaluator",
                input: other.to_string(),
                reason: "expected auto, exact or grid".into(),
            }),
        }
    }
}

pub(crate) fn use_exact(
    n: usize,
    theta: &WeightVector,
    eta: &WeightVector,
    evaluator: Evaluator,
    budget: u64,
) -> Result<bool> {
    match evaluator {
        Evaluator::Grid => Ok(false),
        Evaluator::Exact => {
            check_budget(n, theta.len(), budget)?;
            check_budget(n, eta.len(), budget)?;
            Ok(true)
        }
        Evaluator::Auto => {
            let b = u128::from(budget);
            Ok(tuple_count(n, theta.len()) <= b && tuple_count(n, eta.len()) <= b)
        }
    }
}

/// Tuples of sample indices sorted by their weighted sum.
struct TupleTable {
    s: usize,
    idx: Vec<u32>,
}

impl TupleTable {
    /// Returns the table and the sorted sums.
    fn build(values: &[f64], theta: &[f64]) -> (Self, Vec<f64>) {
        let n = values.len();
        let s = theta.len();
        let total = n.pow(s as u32);
        let mut sums = Vec::with_capacity(total);
        let mut tuples = vec![0u32; total * s];
        let mut cur = vec![0usize; s];
        for t in 0..total {
            let mut acc = theta[0] * values[cur[0]];
            for k in 1..s {
                acc += theta[k] * values[cur[k]];
            }
            sums.push(acc);
            for k in 0..s {
                tuples[t * s + k] = cur[k] as u32;
            }
            let mut k = s;
            while k > 0 {
                k -= 1;
                cur[k] += 1;
                if cur[k] < n {
                    break;
                }
                cur[k] = 0;
            }
        }
        let mut order: Vec<u32> = (0..total as u32).collect();
        order.sort_unstable_by(|&a, &b| sums[a as usize].total_cmp(&sums[b as usize]));
        let mut idx = Vec::with_capacity(total * s);
        let mut sorted = Vec::with_capacity(total);
        for &o in &order {
            let o = o as usize;
            idx.extend_from_slice(&tuples[o * s..o * s + s]);
            sorted.push(sums[o]);
        }
        (TupleTable { s, idx }, sorted)
    }

    fn cumulative(&self, weights: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.push(0.0);
        let mut acc = 0.0;
        for tuple in self.idx.chunks_exact(self.s) {
            let mut m = weights[tuple[0] as usize];
            for &j in &tuple[1..] {
                m *= weights[j as usize];
            }
            acc += m;
            out.push(acc);
        }
    }
}

enum Kind {
    Exact {
        theta: TupleTable,
        eta: TupleTable,
        bound_theta: Vec<u32>,
        bound_eta: Vec<u32>,
    },
    Grid {
        values: Vec<f64>,
        theta: Vec<f64>,
        eta: Vec<f64>,
    },
}

/// `D(u) = F_θ(u) − F_η(u)` at a fixed set of points `u`, for any weights
/// on the sample's atoms.
pub(crate) struct PairPlan {
    points: Vec<f64>,
    kind: Kind,
}

/// Buffers reused across [`PairPlan::difference`] calls.
#[derive(Default)]
pub(crate) struct PlanScratch {
    a: Vec<f64>,
    b: Vec<f64>,
    grid: Scratch,
}

fn counts_at_or_below(sorted: &[f64], points: &[f64]) -> Vec<u32> {
    let mut out = Vec::with_capacity(points.len());
    let mut k = 0;
    for &u in points {
        while k < sorted.len() && sorted[k] <= u {
            k += 1;
        }
        out.push(k as u32);
    }
    out
}

impl PairPlan {
    pub(crate) fn new(
        sample: &Sample,
        theta: &WeightVector,
        eta: &WeightVector,
        grid: &GridSpec,
        evaluator: Evaluator,
        budget: u64,
    ) -> Result<Self> {
        if use_exact(sample.len(), theta, eta, evaluator, budget)? {
            let (tt, st) = TupleTable::build(sample.values(), theta.as_slice());
            let (te, se) = TupleTable::build(sample.values(), eta.as_slice());
            let points = super::sorted_union(&st, &se);
            let bound_theta = counts_at_or_below(&st, &points);
            let bound_eta = counts_at_or_below(&se, &points);
            Ok(PairPlan {
                points,
                kind: Kind::Exact {
                    theta: tt,
                    eta: te,
                    bound_theta,
                    bound_eta,
                },
            })
        } else {
            let points = grid.build(sample, &[theta, eta])?;
            Ok(PairPlan {
                points,
                kind: Kind::Grid {
                    values: sample.values().to_vec(),
                    theta: theta.as_slice().to_vec(),
                    eta: eta.as_slice().to_vec(),
                },
            })
        }
    }

    pub(crate) fn is_exact(&self) -> bool {
        matches!(self.kind, Kind::Exact { .. })
    }

    pub(crate) fn points(&self) -> &[f64] {
        &self.points
    }

    /// Fills `out` with `D` at [`points`](Self::points) under atom masses
    /// `weights` with cumulative masses `prefix`.
    pub(crate) fn difference(
        &self,
        weights: &[f64],
        prefix: &[f64],
        out: &mut Vec<f64>,
        scratch: &mut PlanScratch,
    ) {
        out.clear();
        match &self.kind {
            Kind::Exact {
                theta,
                eta,
                bound_theta,
                bound_eta,
            } => {
                theta.cumulative(weights, &mut scratch.a);
                eta.cumulative(weights, &mut scratch.b);
                out.extend(
                    bound_theta
                        .iter()
                        .zip(bound_eta)
                        .map(|(&i, &j)| scratch.a[i as usize] - scratch.b[j as usize]),
                );
            }
            Kind::Grid { values, theta, eta } => {
                grid_levels(values, weights, prefix, theta, &self.points, &mut scratch.a, &mut scratch.grid);
                grid_levels(values, weights, prefix, eta, &self.points, &mut scratch.b, &mut scratch.grid);
                out.extend(scratch.a.iter().zip(&scratch.b).map(|(a, b)| a - b));
            }
        }
    }
}

/// `sup max(F_θ − F_η, 0)` and its smallest witness for a uniformly weighted
/// sample, without building a reusable plan.
pub(crate) fn uniform_statistic(
    sample: &Sample,
    theta: &WeightVector,
    eta: &WeightVector,
    grid: &GridSpec,
    evaluator: Evaluator,
    budget: u64,
) -> Result<(f64, f64)> {
    uniform_statistic_with_size(sample, theta, eta, grid, evaluator, budget).map(|(t, at, _)| (t, at))
}

/// As [`uniform_statistic`], also returning the number of evaluation points.
pub(crate) fn uniform_statistic_with_size(
    sample: &Sample,
    theta: &WeightVector,
    eta: &WeightVector,
    grid: &GridSpec,
    evaluator: Evaluator,
    budget: u64,
) -> Result<(f64, f64, usize)> {
    let (points, diff) = if use_exact(sample.len(), theta, eta, evaluator, budget)? {
        let mut st = all_sums(sample.values(), theta.as_slice());
        let mut se = all_sums(sample.values(), eta.as_slice());
        st.sort_unstable_by(f64::total_cmp);
        se.sort_unstable_by(f64::total_cmp);
        let points = super::sorted_union(&st, &se);
        let (nt, ne) = (st.len() as f64, se.len() as f64);
        let ct = counts_at_or_below(&st, &points);
        let ce = counts_at_or_below(&se, &points);
        let diff: Vec<f64> = ct
            .iter()
            .zip(&ce)
            .map(|(&a, &b)| f64::from(a) / nt - f64::from(b) / ne)
            .collect();
        (points, diff)
    } else {
        let points = grid.build(sample, &[theta, eta])?;
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut sc = Scratch::default();
        let (v, w, p) = (sample.values(), sample.weights(), sample.prefix());
        grid_levels(v, w, p, theta.as_slice(), &points, &mut a, &mut sc);
        grid_levels(v, w, p, eta.as_slice(), &points, &mut b, &mut sc);
        let diff = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        (points, diff)
    };
    let (t, at) = positive_sup(&points, &diff);
    Ok((t, at, points.len()))
}

fn all_sums(values: &[f64], theta: &[f64]) -> Vec<f64> {
    let mut sums: Vec<f64> = values.iter().map(|v| theta[0] * v).collect();
    for &t in &theta[1..] {
        let mut next = Vec::with_capacity(sums.len() * values.len());
        for s in &sums {
            next.extend(values.iter().map(|v| s + t * v));
        }
        sums = next;
    }
    sums
}

/// Largest positive entry of `diff` and the first point attaining it.
pub(crate) fn positive_sup(points: &[f64], diff: &[f64]) -> (f64, f64) {
    let mut best = 0.0;
    let mut at = points.first().copied().unwrap_or(0.0);
    for (u, d) in points.iter().zip(diff) {
        if *d > best {
            best = *d;
            at = *u;
        }
    }
    (best, at)
}
