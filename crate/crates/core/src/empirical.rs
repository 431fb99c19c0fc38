//! Weighted samples, their empirical CDFs and the multinomial bootstrap.

use std::path::Path;

use rand::Rng;

use crate::distributions::FamilySpec;
use crate::error::{Error, Result};
use crate::Cdf;

const WEIGHT_TOL: f64 = 1e-12;

/// Sorted observations carrying probability weights that sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    weights: Vec<f64>,
    /// `prefix[k]` is the mass of the first `k` values; `prefix[n] == 1`.
    prefix: Vec<f64>,
    uniform: bool,
}

impl Sample {
    /// Uniformly weighted sample; the values are sorted on construction.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("a sample needs at least one value".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("sample values must be finite, got {bad}")));
        }
        values.sort_unstable_by(f64::total_cmp);
        let n = values.len();
        let w = 1.0 / n as f64;
        let prefix = (0..=n).map(|k| k as f64 / n as f64).collect();
        Ok(Sample {
            weights: vec![w; n],
            values,
            prefix,
            uniform: true,
        })
    }

    /// Weighted sample; pairs are sorted jointly by value.
    pub fn with_weights(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::Domain("values and weights differ in length".into()));
        }
        if values.is_empty() {
            return Err(Error::Domain("a sample needs at least one value".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sample values must be finite".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Domain("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Domain(format!("weights sum to {total}, expected 1")));
        }
        let mut pairs: Vec<(f64, f64)> = values.into_iter().zip(weights).collect();
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let (values, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &w in &weights {
            acc += w;
            prefix.push(acc.min(1.0));
        }
        *prefix.last_mut().unwrap() = 1.0;
        Ok(Sample {
            values,
            weights,
            prefix,
            uniform: false,
        })
    }

    /// Reweights sorted `values` by integer counts; masses are `count / total`.
    pub(crate) fn from_counts(values: Vec<f64>, counts: &[u32]) -> Self {
        let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        let denom = total as f64;
        let weights = counts.iter().map(|&c| f64::from(c) / denom).collect();
        let mut prefix = Vec::with_capacity(counts.len() + 1);
        let mut acc: u64 = 0;
        prefix.push(0.0);
        for &c in counts {
            acc += u64::from(c);
            prefix.push(acc as f64 / denom);
        }
        Sample {
            values,
            weights,
            prefix,
            uniform: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `prefix()[k]` is the mass carried by the `k` smallest values.
    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Applies `x -> a x + b` (`a > 0` keeps the order).
    pub fn affine(&self, a: f64, b: f64) -> Result<Sample> {
        if !(a > 0.0) {
            return Err(Error::Domain("affine scale must be positive".into()));
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v = a * *v + b;
        }
        Ok(out)
    }

    /// Lower empirical quantile of the stored values (weights ignored).
    pub(crate) fn value_quantile(&self, p: f64) -> f64 {
        let n = self.values.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.values[idx]
    }

    /// Mass of the values `<= x`, by binary search over the prefix sums.
    pub fn ecdf_at(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        self.prefix[k]
    }
}

/// Right-continuous step function `x -> sum of weights of values <= x`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sample: Sample,
}

impl EmpiricalCdf {
    pub fn new(sample: Sample) -> Self {
        EmpiricalCdf { sample }
    }

    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    pub fn into_sample(self) -> Sample {
        self.sample
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sample.ecdf_at(x)
    }
}

impl From<Sample> for EmpiricalCdf {
    fn from(sample: Sample) -> Self {
        EmpiricalCdf { sample }
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

impl Cdf for Sample {
    fn cdf(&self, x: f64) -> f64 {
        self.ecdf_at(x)
    }
}

/// Evaluates the empirical CDF of `sample` at `x`.
pub fn ecdf_eval(sample: &Sample, x: f64) -> f64 {
    sample.ecdf_at(x)
}

/// Multinomial counts `(M_1, ..., M_n)` with `sum M_i = n`, from `n`
/// independent uniform index draws.
pub fn multinomial_counts<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u32> {
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    counts
}

/// Bootstrap resample as a reweighting: same values, weights `M_i / n`.
pub fn bootstrap_resample<R: Rng + ?Sized>(s: &Sample, rng: &mut R) -> Result<Sample> {
    if !s.is_uniform() {
        return Err(Error::Precondition(
            "bootstrap resampling expects a uniformly weighted sample".into(),
        ));
    }
    let counts = multinomial_counts(s.len(), rng);
    Ok(Sample::from_counts(s.values.clone(), &counts))
}

/// Sample of `n` i.i.d. standard Cauchy draws.
pub fn cauchy_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Sample> {
    FamilySpec::cauchy().sample(n, rng)
}

/// Empirical CDF of `n` i.i.d. standard Cauchy draws.
pub fn cauchy_sample_ecdf<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<EmpiricalCdf> {
    cauchy_sample(n, rng).map(EmpiricalCdf::new)
}

/// Parses one observation per line; blank lines and `#` comments are skipped.
pub fn parse_sample(text: &str) -> Result<Sample> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Load {
            line: i + 1,
            message: format!("not a number: {line:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Load {
                line: i + 1,
                message: format!("non-finite value {line:?}"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Load {
            line: 0,
            message: "no observations found".into(),
        });
    }
    Sample::new(values)
}

pub fn load_sample(path: &Path) -> Result<Sample> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sample(&text)
}
