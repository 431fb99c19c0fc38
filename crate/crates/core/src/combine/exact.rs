use super::{CombinationCdf, WeightVector, DEFAULT_TUPLE_BUDGET};
use crate::empirical::Sample;
use crate::error::{Error, Result};

/// Number of index tuples, `n^s`, saturating at `u128::MAX`.
pub(crate) fn tuple_count(n: usize, s: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..s {
        acc = acc.saturating_mul(n as u128);
    }
    acc
}

pub(crate) fn check_budget(n: usize, s: usize, budget: u64) -> Result<()> {
    let tuples = tuple_count(n, s);
    if tuples > u128::from(budget) {
        return Err(Error::Capacity { tuples, budget });
    }
    Ok(())
}

/// Sums `θ₁x_{j₁} + θ₂x_{j₂} + …` and masses over all tuples of positive-mass
/// atoms, accumulated left to right.
pub(crate) fn enumerate(values: &[f64], weights: &[f64], theta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let atoms: Vec<(f64, f64)> = values
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, w)| (*v, *w))
        .collect();
    let mut sums: Vec<f64> = atoms.iter().map(|(v, _)| theta[0] * v).collect();
    let mut mass: Vec<f64> = atoms.iter().map(|(_, w)| *w).collect();
    for &t in &theta[1..] {
        let mut ns = Vec::with_capacity(sums.len() * atoms.len());
        let mut nm = Vec::with_capacity(sums.len() * atoms.len());
        for (s, m) in sums.iter().zip(&mass) {
            for (v, w) in &atoms {
                ns.push(s + t * v);
                nm.push(m * w);
            }
        }
        sums = ns;
        mass = nm;
    }
    (sums, mass)
}

/// Sorts sum/mass pairs and merges identical sums.
pub(crate) fn collapse(sums: Vec<f64>, mass: Vec<f64>) -> CombinationCdf {
    let mut order: Vec<u32> = (0..sums.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| sums[a as usize].total_cmp(&sums[b as usize]));
    let mut points: Vec<f64> = Vec::new();
    let mut masses: Vec<f64> = Vec::new();
    for &i in &order {
        let (s, m) = (sums[i as usize], mass[i as usize]);
        if points.last() == Some(&s) {
            *masses.last_mut().unwrap() += m;
        } else {
            points.push(s);
            masses.push(m);
        }
    }
    CombinationCdf::from_jumps(points, masses)
}

/// Exact CDF of `θ·X` under the sample's weighted empirical law.
pub fn exact_combination_cdf(sample: &Sample, theta: &WeightVector) -> Result<CombinationCdf> {
    exact_combination_cdf_with_budget(sample, theta, DEFAULT_TUPLE_BUDGET)
}

/// As [`exact_combination_cdf`], failing with [`Error::Capacity`] when
/// `n^s` exceeds `budget`.
pub fn exact_combination_cdf_with_budget(
    sample: &Sample,
    theta: &WeightVector,
    budget: u64,
) -> Result<CombinationCdf> {
    check_budget(sample.len(), theta.len(), budget)?;
    let (sums, mass) = enumerate(sample.values(), sample.weights(), theta.as_slice());
    Ok(collapse(sums, mass))
}
