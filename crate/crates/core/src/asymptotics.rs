//! Limiting covariance of `√n(F_{n,θ} − F_θ)` and a Monte Carlo oracle for it.
//!
//! For i.i.d. `X` with continuous CDF `F`, the plug-in estimator of
//! `F_θ(x) = P(θ·X ≤ x)` has limiting covariance `Σ_{j,k} Ω_{jk}(x, y)` with
//!
//! ```text
//! Ω_{jk}(x, y) = ∫ F_{θ−j}(x − θ_j u) F_{θ−k}(y − θ_k u) dF(u) − F_θ(x) F_θ(y)
//! ```
//!
//! where `θ−j` drops the `j`-th weight. The same expression holds on the
//! diagonal `j = k`.

use rayon::prelude::*;

use crate::combine::{parametric_combination_cdf, GridSpec, ParametricCdf, WeightVector};
use crate::distributions::FamilySpec;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::seed::{derive, rng_from};

/// Default absolute quadrature tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Smallest replicate count accepted by the Monte Carlo oracle.
pub const MIN_ORACLE_REPS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSpec {
    pub family: FamilySpec,
    pub theta: WeightVector,
    pub tol: f64,
}

impl CovarianceSpec {
    pub fn new(family: FamilySpec, theta: WeightVector) -> Result<Self> {
        if !family.is_continuous() {
            return Err(Error::Capability(format!(
                "covariance kernels need a continuous family, {family} has atoms"
            )));
        }
        Ok(CovarianceSpec {
            family,
            theta,
            tol: DEFAULT_TOLERANCE,
        })
    }
}

/// CDF of a partial weighted sum. The empty sum is the point mass at 0.
enum PartialCdf {
    Step,
    Pointwise(Vec<f64>, f64),
    Table(ParametricCdf),
}

impl PartialCdf {
    fn new(family: &FamilySpec, weights: Vec<f64>, tol: f64) -> Result<Self> {
        Ok(match weights.len() {
            0 => PartialCdf::Step,
            1..=2 => PartialCdf::Pointwise(weights, tol),
            _ => {
                let w = WeightVector::new(weights)?;
                PartialCdf::Table(parametric_combination_cdf(family, &w, &GridSpec::with_points(8192))?)
            }
        })
    }

    fn eval(&self, family: &FamilySpec, v: f64) -> f64 {
        match self {
            PartialCdf::Step => {
                if v >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            PartialCdf::Pointwise(w, tol) => crate::combine::parametric::pointwise(family, w, v, *tol),
            PartialCdf::Table(t) => t.eval(v),
        }
    }
}

fn leave_one_out(theta: &[f64], j: usize) -> Vec<f64> {
    theta
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, t)| *t)
        .collect()
}

fn on_quantile_axis(family: &FamilySpec, tol: f64, g: impl Fn(f64) -> f64) -> f64 {
    quadrature::integrate_tol(|p| g(family.quantile_unchecked(p)), 0.0, 1.0, tol)
}

fn combination_cdf(family: &FamilySpec, theta: &[f64], x: f64, tol: f64) -> f64 {
    crate::combine::parametric::pointwise(family, theta, x, tol)
}

fn check_index(spec: &CovarianceSpec, j: usize) -> Result<()> {
    if j >= spec.theta.len() {
        return Err(Error::Domain(format!(
            "index {j} out of range for {} weights",
            spec.theta.len()
        )));
    }
    Ok(())
}

/// One term `Ω_{jk}(x, y)`, indices 0-based.
pub fn covariance_omega(spec: &CovarianceSpec, j: usize, k: usize, x: f64, y: f64) -> Result<f64> {
    check_index(spec, j)?;
    check_index(spec, k)?;
    let th = spec.theta.as_slice();
    let fam = &spec.family;
    let inner = spec.tol * 0.1;
    let fj = PartialCdf::new(fam, leave_one_out(th, j), inner)?;
    let fk = PartialCdf::new(fam, leave_one_out(th, k), inner)?;
    let cross = on_quantile_axis(fam, spec.tol, |u| {
        fj.eval(fam, x - th[j] * u) * fk.eval(fam, y - th[k] * u)
    });
    Ok(cross - combination_cdf(fam, th, x, inner) * combination_cdf(fam, th, y, inner))
}

/// `Σ_{j,k} Ω_{jk}(x, y)`, computed as one integral of the summed kernels.
pub fn total_covariance(spec: &CovarianceSpec, x: f64, y: f64) -> Result<f64> {
    let th = spec.theta.as_slice();
    let fam = &spec.family;
    let inner = spec.tol * 0.1;
    let parts: Vec<PartialCdf> = (0..th.len())
        .map(|j| PartialCdf::new(fam, leave_one_out(th, j), inner))
        .collect::<Result<_>>()?;
    let sum_at = |z: f64, u: f64| -> f64 {
        parts
            .iter()
            .zip(th)
            .map(|(p, t)| p.eval(fam, z - t * u))
            .sum()
    };
    let cross = on_quantile_axis(fam, spec.tol, |u| sum_at(x, u) * sum_at(y, u));
    let s = th.len() as f64;
    Ok(cross - s * s * combination_cdf(fam, th, x, inner) * combination_cdf(fam, th, y, inner))
}

fn std_cauchy(x: f64) -> f64 {
    x.atan() / std::f64::consts::PI + 0.5
}

/// Total covariance for standard Cauchy data with weights summing to 1,
/// where every partial sum `θ−j·X` is Cauchy with scale `1 − θ_j`.
pub fn cauchy_covariance(theta: &WeightVector, x: f64, y: f64) -> Result<f64> {
    if (theta.total() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "weights must sum to 1, got {}",
            theta.total()
        )));
    }
    let th = theta.as_slice();
    let kernel = |t: f64, z: f64, u: f64| {
        let rest = 1.0 - t;
        if rest <= 1e-15 {
            if u <= z {
                1.0
            } else {
                0.0
            }
        } else {
            std_cauchy((z - t * u) / rest)
        }
    };
    let cauchy = FamilySpec::cauchy();
    let cross = on_quantile_axis(&cauchy, 1e-9, |u| {
        let a: f64 = th.iter().map(|&t| kernel(t, x, u)).sum();
        let b: f64 = th.iter().map(|&t| kernel(t, y, u)).sum();
        a * b
    });
    let s = th.len() as f64;
    Ok(cross - s * s * std_cauchy(x) * std_cauchy(y))
}

/// Covariance of the limit for the sample mean of size `s`, written with
/// convolution powers `F^{*m}`.
pub fn samplemean_covariance(family: &FamilySpec, s: usize, x: f64, y: f64) -> Result<f64> {
    if s < 2 {
        return Err(Error::Domain(format!("sample-mean size must be >= 2, got {s}")));
    }
    if !family.is_continuous() {
        return Err(Error::Capability(format!("{family} is not continuous")));
    }
    let tol = 1e-9;
    let lower = vec![1.0; s - 1];
    let full = vec![1.0; s];
    let sf = s as f64;
    let power = |w: &[f64], v: f64| crate::combine::parametric::pointwise(family, w, v, tol * 0.1);
    let cross = on_quantile_axis(family, tol, |u| power(&lower, sf * x - u) * power(&lower, sf * y - u));
    Ok(sf * sf * (cross - power(&full, sf * x) * power(&full, sf * y)))
}

/// `F_{n,θ}(x)` for a sorted sample, by recursion on the last weight.
fn plug_in_at(sorted: &[f64], theta: &[f64], x: f64) -> f64 {
    let n = sorted.len() as f64;
    let (last, head) = theta.split_last().expect("nonempty weights");
    if head.is_empty() {
        return sorted.partition_point(|&v| last * v <= x) as f64 / n;
    }
    sorted.iter().map(|&v| plug_in_at(sorted, head, x - last * v)).sum::<f64>() / n
}

/// Monte Carlo covariance matrix of `√n(F_{n,θ} − F_θ)` at `points`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub points: Vec<f64>,
    pub estimate: Vec<Vec<f64>>,
    /// Jackknife standard errors.
    pub se: Vec<Vec<f64>>,
    pub reps: usize,
}

/// Sample covariance of paired draws and its jackknife standard error.
fn cov_with_jackknife(a: &[f64], b: &[f64]) -> (f64, f64) {
    let r = a.len() as f64;
    let ma = a.iter().sum::<f64>() / r;
    let mb = b.iter().sum::<f64>() / r;
    let a: Vec<f64> = a.iter().map(|v| v - ma).collect();
    let b: Vec<f64> = b.iter().map(|v| v - mb).collect();
    let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    let sab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let full = (sab - sa * sb / r) / (r - 1.0);
    let m = r - 1.0;
    let loo: Vec<f64> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| {
            let (ta, tb) = (sa - x, sb - y);
            (sab - x * y - ta * tb / m) / (m - 1.0)
        })
        .collect();
    let mean = loo.iter().sum::<f64>() / r;
    let var = loo.iter().map(|c| (c - mean).powi(2)).sum::<f64>() * (r - 1.0) / r;
    (full, var.sqrt())
}

pub fn empirical_process_covariance_matrix(
    family: &FamilySpec,
    theta: &WeightVector,
    points: &[f64],
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<CovarianceEstimate> {
    if reps < MIN_ORACLE_REPS {
        return Err(Error::Precondition(format!(
            "the oracle needs at least {MIN_ORACLE_REPS} replicates, got {reps}"
        )));
    }
    if n == 0 || points.is_empty() {
        return Err(Error::Domain("need n >= 1 and at least one point".into()));
    }
    let th = theta.as_slice();
    let truth: Vec<f64> = if family.is_continuous() && th.len() <= 3 {
        points.iter().map(|&x| combination_cdf(family, th, x, 1e-10)).collect()
    } else {
        vec![0.0; points.len()]
    };
    let root_n = (n as f64).sqrt();
    let draws: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from(derive(seed, r as u64));
            let mut v: Vec<f64> = (0..n).map(|_| family.draw(&mut rng)).collect();
            v.sort_unstable_by(f64::total_cmp);
            points
                .iter()
                .zip(&truth)
                .map(|(&x, t)| root_n * (plug_in_at(&v, th, x) - t))
                .collect()
        })
        .collect();
    let column = |i: usize| draws.iter().map(|d| d[i]).collect::<Vec<f64>>();
    let cols: Vec<Vec<f64>> = (0..points.len()).map(column).collect();
    let m = points.len();
    let mut estimate = vec![vec![0.0; m]; m];
    let mut se = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let (c, e) = cov_with_jackknife(&cols[i], &cols[j]);
            estimate[i][j] = c;
            estimate[j][i] = c;
            se[i][j] = e;
            se[j][i] = e;
        }
    }
    Ok(CovarianceEstimate {
        points: points.to_vec(),
        estimate,
        se,
        reps,
    })
}

/// Monte Carlo estimate of the covariance at `(x, y)` and its standard error.
pub fn empirical_process_covariance(
    family: &FamilySpec,
    theta: &WeightVector,
    x: f64,
    y: f64,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let m = empirical_process_covariance_matrix(family, theta, &[x, y], n, reps, seed)?;
    Ok((m.estimate[0][1], m.se[0][1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cdf;

    fn half() -> WeightVector {
        WeightVector::sample_mean(2)
    }

    fn spec(f: FamilySpec, w: WeightVector) -> CovarianceSpec {
        CovarianceSpec::new(f, w).unwrap()
    }

    #[test]
    fn single_weight_is_the_bridge() {
        let f = FamilySpec::pareto(2.0).unwrap();
        let sp = spec(f, WeightVector::sample_mean(1));
        for (x, y) in [(1.5f64, 3.0f64), (2.0, 2.0), (4.0, 1.2)] {
            let want = f.cdf(x.min(y)) - f.cdf(x) * f.cdf(y);
            let got = covariance_omega(&sp, 0, 0, x, y).unwrap();
            assert!((got - want).abs() < 1e-6, "{x},{y}: {got} vs {want}");
        }
    }

    #[test]
    fn cauchy_paths_agree() {
        let sp = spec(FamilySpec::cauchy(), half());
        let grid = [-3.0, -1.0, 0.0, 0.7, 4.0];
        for &x in &grid {
            for &y in &grid {
                let a = total_covariance(&sp, x, y).unwrap();
                let b = cauchy_covariance(&half(), x, y).unwrap();
                assert!((a - b).abs() < 1e-5, "{x},{y}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn terms_add_up() {
        let w = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let sp = spec(FamilySpec::cauchy(), w.clone());
        let sum: f64 = (0..3)
            .flat_map(|j| (0..3).map(move |k| (j, k)))
            .map(|(j, k)| covariance_omega(&sp, j, k, 0.3, -0.4).unwrap())
            .sum();
        let tot = cauchy_covariance(&w, 0.3, -0.4).unwrap();
        assert!((sum - tot).abs() < 1e-5, "{sum} vs {tot}");
        assert!(covariance_omega(&sp, 3, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sample_mean_form_matches() {
        for (x, y) in [(0.0, 0.0), (0.5, -1.0)] {
            let a = samplemean_covariance(&FamilySpec::cauchy(), 2, x, y).unwrap();
            let b = cauchy_covariance(&half(), x, y).unwrap();
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
        let f = FamilySpec::pareto(3.0).unwrap();
        let a = samplemean_covariance(&f, 3, 1.6, 2.0).unwrap();
        let b = total_covariance(&spec(f, WeightVector::sample_mean(3)), 1.6, 2.0).unwrap();
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        assert!(samplemean_covariance(&f, 1, 0.0, 0.0).is_err());
    }

    #[test]
    fn symmetric_and_variances_nonnegative() {
        let sp = spec(FamilySpec::frechet(2.0).unwrap(), WeightVector::new(vec![0.3, 0.7]).unwrap());
        let a = total_covariance(&sp, 0.8, 1.7).unwrap();
        let b = total_covariance(&sp, 1.7, 0.8).unwrap();
        assert!((a - b).abs() < 1e-8);
        assert!(total_covariance(&sp, 1.1, 1.1).unwrap() >= 0.0);
        let far = cauchy_covariance(&half(), 1e12, 1e12).unwrap();
        assert!(far.abs() < 1e-9, "{far}");
    }

    fn cholesky_ok(m: &[Vec<f64>]) -> bool {
        let n = m.len();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
                if i == j {
                    let d = m[i][i] - s;
                    if d <= 0.0 {
                        return false;
                    }
                    l[i][i] = d.sqrt();
                } else {
                    l[i][j] = (m[i][j] - s) / l[j][j];
                }
            }
        }
        true
    }

    #[test]
    fn covariance_matrix_is_psd() {
        let sp = spec(FamilySpec::loglogistic(2.0).unwrap(), WeightVector::new(vec![0.4, 0.6]).unwrap());
        let pts = [0.3, 0.9, 1.4, 3.0];
        let m: Vec<Vec<f64>> = pts
            .iter()
            .map(|&x| pts.iter().map(|&y| total_covariance(&sp, x, y).unwrap() + if x == y { 1e-6 } else { 0.0 }).collect())
            .collect();
        assert!(cholesky_ok(&m));
    }

    #[test]
    fn oracle_matches_bridge() {
        let f = FamilySpec::pareto(1.5).unwrap();
        let (est, se) = empirical_process_covariance(&f, &WeightVector::sample_mean(1), 1.5, 3.0, 400, 2000, 5).unwrap();
        let want = f.cdf(1.5) - f.cdf(1.5) * f.cdf(3.0);
        assert!((est - want).abs() < 3.0 * se, "{est} ± {se} vs {want}");
        assert!(empirical_process_covariance(&f, &half(), 0.0, 0.0, 10, 10, 0).is_err());
    }

    #[test]
    fn jackknife_on_known_data() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let (c, se) = cov_with_jackknife(&a, &a);
        assert!((c - 5.0 / 3.0).abs() < 1e-12);
        assert!(se > 0.0);
    }

    #[test]
    fn atoms_are_rejected() {
        assert!(matches!(CovarianceSpec::new(FamilySpec::st_petersburg(), half()), Err(Error::Capability(_))));
    }
}
