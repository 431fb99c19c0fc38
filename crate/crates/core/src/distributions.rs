//! Parametric families used as simulation alternatives and calibration
//! references.
//!
//! Every family exposes a CDF, a quantile function (closed form where one
//! exists, numerical inversion otherwise) and a seeded sampler. Families are
//! validated once at construction, so evaluation never fails on parameters.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Open01, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::quadrature::integrate_tol;
use crate::Cdf;

/// Probability of the Bernoulli component of the mixture.
pub const MIX_BERNOULLI_WEIGHT: f64 = 0.45;
/// Probability of the Pareto(1) component of the mixture.
pub const MIX_PARETO_WEIGHT: f64 = 0.55;
/// Number of stored St. Petersburg atoms (`2^1 .. 2^40`).
pub const ST_PETERSBURG_TERMS: u32 = 40;

const STUDENT_CDF_TOL: f64 = 1e-10;

/// The distribution families known to the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `1 - x^{-sh}` on `x >= 1`.
    Pareto { sh: f64 },
    /// `exp(-x^{-sh})` on `x > 0`.
    Frechet { sh: f64 },
    /// `x^sh / (1 + x^sh)` on `x >= 0`.
    Loglogistic { sh: f64 },
    StudentT { df: f64 },
    /// Standard Cauchy.
    Cauchy,
    /// With probability 0.45 a Bernoulli(1/2) draw, otherwise Pareto(1).
    /// Atoms of mass 0.225 at 0 and at 1.
    BernoulliParetoMixture,
    /// `2^Y` with `P(Y = k) = 2^{-k}`, `k >= 1`.
    StPetersburg,
    /// Piecewise CDF with an anti-starshaped but non-concave inverted CDF.
    Piecewise,
    /// `v(Z)` with `Z` Pareto started at 0 and `v(x) = x^a` below 1, `x^b` above.
    TransformedPareto { alpha: f64, a: f64, b: f64 },
    /// Pareto started at zero (Lomax): `1 - (1 + x)^{-alpha}` on `x >= 0`.
    ParetoAtZero { alpha: f64 },
}

/// A validated [`Family`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    kind: Family,
    /// `ln` of the Student-t density normalising constant.
    log_norm: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl FamilySpec {
    pub fn new(kind: Family) -> Result<Self> {
        let mut log_norm = 0.0;
        match kind {
            Family::Pareto { sh } | Family::Frechet { sh } | Family::Loglogistic { sh } => {
                positive("sh", sh)?
            }
            Family::StudentT { df } => {
                positive("df", df)?;
                log_norm = ln_gamma(0.5 * (df + 1.0))
                    - ln_gamma(0.5 * df)
                    - 0.5 * (df * std::f64::consts::PI).ln();
            }
            Family::TransformedPareto { alpha, a, b } => {
                positive("alpha", alpha)?;
                if !(a.is_finite() && b.is_finite() && a >= 1.0 && b > a) {
                    return Err(Error::ParameterDomain(format!(
                        "transformed Pareto needs b > a >= 1, got a={a}, b={b}"
                    )));
                }
            }
            Family::ParetoAtZero { alpha } => positive("alpha", alpha)?,
            Family::Cauchy
            | Family::BernoulliParetoMixture
            | Family::StPetersburg
            | Family::Piecewise => {}
        }
        Ok(FamilySpec { kind, log_norm })
    }

    pub fn pareto(sh: f64) -> Result<Self> {
        Self::new(Family::Pareto { sh })
    }
    pub fn frechet(sh: f64) -> Result<Self> {
        Self::new(Family::Frechet { sh })
    }
    pub fn loglogistic(sh: f64) -> Result<Self> {
        Self::new(Family::Loglogistic { sh })
    }
    pub fn student(df: f64) -> Result<Self> {
        Self::new(Family::StudentT { df })
    }
    pub fn cauchy() -> Self {
        FamilySpec {
            kind: Family::Cauchy,
            log_norm: 0.0,
        }
    }
    pub fn mixture() -> Self {
        FamilySpec {
            kind: Family::BernoulliParetoMixture,
            log_norm: 0.0,
        }
    }
    pub fn st_petersburg() -> Self {
        FamilySpec {
            kind: Family::StPetersburg,
            log_norm: 0.0,
        }
    }
    pub fn piecewise_example() -> Self {
        FamilySpec {
            kind: Family::Piecewise,
            log_norm: 0.0,
        }
    }
    pub fn transformed_pareto(alpha: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(Family::TransformedPareto { alpha, a, b })
    }
    pub fn pareto_at_zero(alpha: f64) -> Result<Self> {
        Self::new(Family::ParetoAtZero { alpha })
    }

    pub fn kind(&self) -> Family {
        self.kind
    }

    /// False for the St. Petersburg law and the Bernoulli mixture, which have atoms.
    pub fn is_continuous(&self) -> bool {
        !matches!(self.kind, Family::StPetersburg | Family::BernoulliParetoMixture)
    }

    /// Short family name, as used in the power-table `family` column.
    pub fn name(&self) -> &'static str {
        match self.kind {
            Family::Pareto { .. } => "pareto",
            Family::Frechet { .. } => "frechet",
            Family::Loglogistic { .. } => "loglogistic",
            Family::StudentT { .. } => "student",
            Family::Cauchy => "cauchy",
            Family::BernoulliParetoMixture => "mix-bern-pareto",
            Family::StPetersburg => "stpetersburg",
            Family::Piecewise => "piecewise",
            Family::TransformedPareto { .. } => "transformed-pareto",
            Family::ParetoAtZero { .. } => "pareto0",
        }
    }

    /// Parameter list as `k=v` pairs joined by `;` (empty when parameter free).
    pub fn params(&self) -> String {
        match self.kind {
            Family::Pareto { sh } | Family::Frechet { sh } | Family::Loglogistic { sh } => {
                format!("sh={sh}")
            }
            Family::StudentT { df } => format!("df={df}"),
            Family::TransformedPareto { alpha, a, b } => format!("alpha={alpha};a={a};b={b}"),
            Family::ParetoAtZero { alpha } => format!("alpha={alpha}"),
            _ => String::new(),
        }
    }

    pub fn student_pdf(&self, t: f64) -> f64 {
        match self.kind {
            Family::StudentT { df } => {
                (self.log_norm - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp()
            }
            _ => f64::NAN,
        }
    }

    fn student_cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        let ax = x.abs();
        let tol = 0.5 * STUDENT_CDF_TOL;
        let inner = integrate_tol(|t| self.student_pdf(t), 0.0, ax.min(1.0), tol);
        let outer = if ax > 1.0 {
            // t = 1/v maps [1, ax] onto [1/ax, 1]
            integrate_tol(
                |v| {
                    let t = 1.0 / v;
                    self.student_pdf(t) * t * t
                },
                1.0 / ax,
                1.0,
                tol,
            )
        } else {
            0.0
        };
        let upper = (0.5 + inner + outer).min(1.0);
        if x >= 0.0 {
            upper
        } else {
            1.0 - upper
        }
    }

    /// Generalised inverse `inf {x : F(x) >= p}`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0,1), got {p}")));
        }
        Ok(self.quantile_unchecked(p))
    }

    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        match self.kind {
            Family::Pareto { sh } => (1.0 - p).powf(-1.0 / sh),
            Family::Frechet { sh } => (-p.ln()).powf(-1.0 / sh),
            Family::Loglogistic { sh } => (p / (1.0 - p)).powf(1.0 / sh),
            Family::Cauchy => (std::f64::consts::PI * (p - 0.5)).tan(),
            Family::StudentT { .. } => {
                let (mut lo, mut hi) = (-1.0f64, 1.0f64);
                while self.cdf(lo) > p {
                    lo *= 4.0;
                }
                while self.cdf(hi) < p {
                    hi *= 4.0;
                }
                bisect(|x| self.cdf(x), p, lo, hi)
            }
            Family::BernoulliParetoMixture => {
                let half = MIX_BERNOULLI_WEIGHT / 2.0;
                if p <= half {
                    0.0
                } else if p <= MIX_BERNOULLI_WEIGHT {
                    1.0
                } else {
                    MIX_PARETO_WEIGHT / (1.0 - p)
                }
            }
            Family::StPetersburg => {
                let k = (-(1.0 - p).log2()).ceil().max(1.0);
                // guard against log2 rounding just below an integer
                let k = if 1.0 - (-(k - 1.0)).exp2() >= p && k > 1.0 { k - 1.0 } else { k };
                k.exp2()
            }
            Family::Piecewise => {
                if p < 0.4 {
                    0.2 / (0.8 - p)
                } else if p == 0.4 {
                    0.5
                } else {
                    0.6 / (1.0 - p)
                }
            }
            Family::TransformedPareto { alpha, a, b } => {
                let z = (1.0 - p).powf(-1.0 / alpha) - 1.0;
                if z < 1.0 {
                    z.powf(a)
                } else {
                    z.powf(b)
                }
            }
            Family::ParetoAtZero { alpha } => (1.0 - p).powf(-1.0 / alpha) - 1.0,
        }
    }

    /// One draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            Family::StudentT { df } => {
                let z: f64 = rng.sample(StandardNormal);
                let chi = ChiSquared::new(df).expect("validated df").sample(rng);
                z / (chi / df).sqrt()
            }
            _ => {
                let u: f64 = rng.sample(Open01);
                self.quantile_unchecked(u)
            }
        }
    }

    /// `n` i.i.d. draws as a uniformly weighted sample.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        if n == 0 {
            return Err(Error::Domain("sample size must be >= 1".into()));
        }
        let values: Vec<f64> = (0..n).map(|_| self.draw(rng)).collect();
        Sample::new(values)
    }

    /// Exact lattice representation, only for [`Family::StPetersburg`].
    pub fn discrete(&self) -> Option<DiscreteDistribution> {
        match self.kind {
            Family::StPetersburg => Some(DiscreteDistribution::st_petersburg(ST_PETERSBURG_TERMS)),
            _ => None,
        }
    }
}

impl Cdf for FamilySpec {
    fn cdf(&self, x: f64) -> f64 {
        match self.kind {
            Family::Pareto { sh } => {
                if x < 1.0 {
                    0.0
                } else {
                    -(-sh * x.ln()).exp_m1()
                }
            }
            Family::Frechet { sh } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-sh)).exp()
                }
            }
            Family::Loglogistic { sh } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 / (1.0 + x.powf(-sh))
                }
            }
            Family::Cauchy => x.atan() / std::f64::consts::PI + 0.5,
            Family::StudentT { .. } => self.student_cdf(x),
            Family::BernoulliParetoMixture => {
                let b = if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    0.5
                } else {
                    1.0
                };
                let z = if x < 1.0 { 0.0 } else { 1.0 - 1.0 / x };
                MIX_BERNOULLI_WEIGHT * b + MIX_PARETO_WEIGHT * z
            }
            Family::StPetersburg => {
                if x < 2.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    let k = x.log2().floor();
                    // log2 may round up at exact powers; fix by comparing
                    let k = if k.exp2() > x { k - 1.0 } else if (k + 1.0).exp2() <= x { k + 1.0 } else { k };
                    1.0 - (-k).exp2()
                }
            }
            Family::Piecewise => {
                if x <= 0.25 {
                    0.0
                } else if x < 0.5 {
                    0.8 - 0.2 / x
                } else if x < 1.0 {
                    0.4
                } else {
                    1.0 - 0.6 / x
                }
            }
            Family::TransformedPareto { alpha, a, b } => {
                let fz = |z: f64| -(-alpha * z.ln_1p()).exp_m1();
                if x <= 0.0 {
                    0.0
                } else if x < 1.0 {
                    fz(x.powf(1.0 / a))
                } else {
                    fz(x.powf(1.0 / b))
                }
            }
            Family::ParetoAtZero { alpha } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-alpha * x.ln_1p()).exp_m1()
                }
            }
        }
    }
}

/// Bisection for the generalised inverse of a nondecreasing `f` on `[lo, hi]`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, p: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Family::Cauchy
            | Family::BernoulliParetoMixture
            | Family::StPetersburg
            | Family::Piecewise => write!(f, "{}", self.name()),
            _ => write!(f, "{}({})", self.name(), self.params().replace(';', ",")),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Parses `name(param=value,...)`, e.g. `pareto(sh=2)` or `mix-bern-pareto`.
    fn from_str(input: &str) -> Result<Self> {
        let err = |reason: String| Error::Parse {
            what: "family",
            input: input.to_string(),
            reason,
        };
        let s = input.trim();
        let (name, args) = match s.find('(') {
            Some(open) => {
                if !s.ends_with(')') {
                    return Err(err("missing closing parenthesis".into()));
                }
                (&s[..open], &s[open + 1..s.len() - 1])
            }
            None => (s, ""),
        };
        let mut params: Vec<(String, f64)> = Vec::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got {part:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| err(format!("not a number: {:?}", v.trim())))?;
            params.push((k.trim().to_ascii_lowercase(), v));
        }
        let take = |keys: &[&str]| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| keys.contains(&k.as_str()))
                .map(|(_, v)| *v)
                .ok_or_else(|| err(format!("missing parameter {}", keys[0])))
        };
        let no_params = |kind: Family| -> Result<FamilySpec> {
            if params.is_empty() {
                FamilySpec::new(kind)
            } else {
                Err(err("this family takes no parameters".into()))
            }
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "pareto" => FamilySpec::pareto(take(&["sh", "shape", "alpha"])?),
            "frechet" | "fréchet" => FamilySpec::frechet(take(&["sh", "shape"])?),
            "loglogistic" | "log-logistic" => FamilySpec::loglogistic(take(&["sh", "shape"])?),
            "student" | "student-t" | "t" => FamilySpec::student(take(&["df"])?),
            "cauchy" => no_params(Family::Cauchy),
            "mix-bern-pareto" | "mixture" => no_params(Family::BernoulliParetoMixture),
            "stpetersburg" | "st-petersburg" => no_params(Family::StPetersburg),
            "piecewise" => no_params(Family::Piecewise),
            "transformed-pareto" | "tpareto" => FamilySpec::transformed_pareto(
                take(&["alpha"])?,
                take(&["a"])?,
                take(&["b"])?,
            ),
            "pareto0" | "lomax" => FamilySpec::pareto_at_zero(take(&["alpha", "sh"])?),
            other => Err(err(format!("unknown family {other:?}"))),
        }
    }
}

/// A lattice law stored on finitely many atoms, with the mass beyond the
/// stored support tracked explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    support: Vec<f64>,
    pmf: Vec<f64>,
    truncation_mass: f64,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<f64>, pmf: Vec<f64>, truncation_mass: f64) -> Result<Self> {
        if support.len() != pmf.len() || support.is_empty() {
            return Err(Error::ParameterDomain("support and pmf lengths differ or are empty".into()));
        }
        if support.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::ParameterDomain("support must be strictly increasing".into()));
        }
        if pmf.iter().any(|&p| !(p >= 0.0)) || !(truncation_mass >= 0.0) {
            return Err(Error::ParameterDomain("probabilities must be nonnegative".into()));
        }
        let total: f64 = pmf.iter().sum::<f64>() + truncation_mass;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::ParameterDomain(format!("total mass {total} != 1")));
        }
        Ok(DiscreteDistribution {
            support,
            pmf,
            truncation_mass,
        })
    }

    /// `2^k` with mass `2^{-k}` for `k = 1..=terms`.
    pub fn st_petersburg(terms: u32) -> Self {
        let support = (1..=terms).map(|k| f64::from(k).exp2()).collect();
        let pmf = (1..=terms).map(|k| (-f64::from(k)).exp2()).collect();
        DiscreteDistribution {
            support,
            pmf,
            truncation_mass: (-f64::from(terms)).exp2(),
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }
    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    /// Stored mass at or below `x`; a lower bound of the true CDF.
    pub fn cdf_lower(&self, x: f64) -> f64 {
        let k = self.support.partition_point(|&s| s <= x);
        self.pmf[..k].iter().sum()
    }
}

impl Cdf for DiscreteDistribution {
    fn cdf(&self, x: f64) -> f64 {
        self.cdf_lower(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;

    fn continuous_corpus() -> Vec<FamilySpec> {
        vec![
            FamilySpec::pareto(1.0).unwrap(),
            FamilySpec::pareto(2.5).unwrap(),
            FamilySpec::frechet(0.7).unwrap(),
            FamilySpec::loglogistic(5.0).unwrap(),
            FamilySpec::student(1.5).unwrap(),
            FamilySpec::student(0.5).unwrap(),
            FamilySpec::cauchy(),
            FamilySpec::piecewise_example(),
            FamilySpec::transformed_pareto(1.0, 2.0, 3.0).unwrap(),
            FamilySpec::pareto_at_zero(1.0).unwrap(),
        ]
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(FamilySpec::cauchy().cdf(0.0), 0.5);
        assert!((FamilySpec::pareto(1.0).unwrap().cdf(2.0) - 0.5).abs() < 1e-15);
        assert!((FamilySpec::piecewise_example().cdf(0.75) - 0.4).abs() < 1e-15);
        assert!((FamilySpec::cauchy().quantile(0.75).unwrap() - 1.0).abs() < 1e-14);
        assert!((FamilySpec::pareto(2.0).unwrap().quantile(0.75).unwrap() - 2.0).abs() < 1e-14);
        assert!((FamilySpec::loglogistic(1.0).unwrap().quantile(0.5).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mixture_atoms() {
        let m = FamilySpec::mixture();
        assert_eq!(m.cdf(-0.1), 0.0);
        assert!((m.cdf(0.0) - 0.225).abs() < 1e-15);
        assert!((m.cdf(0.99) - 0.225).abs() < 1e-15);
        assert!((m.cdf(1.0) - 0.45).abs() < 1e-15);
        assert!((m.cdf(2.0) - (0.45 + 0.55 * 0.5)).abs() < 1e-15);
        assert_eq!(m.quantile(0.2).unwrap(), 0.0);
        assert_eq!(m.quantile(0.3).unwrap(), 1.0);
        assert!((m.quantile(0.725).unwrap() - 2.0).abs() < 1e-12);
        let s = m.sample(4000, &mut rng_from(1)).unwrap();
        let zeros = s.values().iter().filter(|v| **v == 0.0).count() as f64 / 4000.0;
        assert!((zeros - 0.225).abs() < 0.03, "{zeros}");
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(FamilySpec::pareto(0.0), Err(Error::ParameterDomain(_))));
        assert!(matches!(FamilySpec::student(-1.0), Err(Error::ParameterDomain(_))));
        assert!(FamilySpec::transformed_pareto(1.0, 3.0, 2.0).is_err());
        assert!(FamilySpec::transformed_pareto(1.0, 0.5, 2.0).is_err());
        assert!(matches!(FamilySpec::cauchy().quantile(1.0), Err(Error::Domain(_))));
        assert!(FamilySpec::cauchy().quantile(0.0).is_err());
    }

    #[test]
    fn parse_and_display() {
        let p: FamilySpec = "pareto(sh=2)".parse().unwrap();
        assert_eq!(p, FamilySpec::pareto(2.0).unwrap());
        assert_eq!(p.to_string(), "pareto(sh=2)");
        let t: FamilySpec = "student(df=1.5)".parse().unwrap();
        assert_eq!(t.kind(), Family::StudentT { df: 1.5 });
        let m: FamilySpec = "mix-bern-pareto".parse().unwrap();
        assert_eq!(m.kind(), Family::BernoulliParetoMixture);
        let tp: FamilySpec = "transformed-pareto(alpha=1,a=2,b=3)".parse().unwrap();
        assert_eq!(tp.to_string(), "transformed-pareto(alpha=1,a=2,b=3)");
        assert!("pareto".parse::<FamilySpec>().is_err());
        assert!("pareto(sh=x)".parse::<FamilySpec>().is_err());
        assert!("gumbel".parse::<FamilySpec>().is_err());
        assert!(matches!("pareto(sh=-1)".parse::<FamilySpec>(), Err(Error::ParameterDomain(_))));
    }

    #[test]
    fn quantile_inverts_cdf() {
        let mut rng = rng_from(7);
        for f in continuous_corpus() {
            for _ in 0..1000 {
                let p: f64 = rng.random_range(1e-6..1.0 - 1e-6);
                let q = f.quantile(p).unwrap();
                let back = f.cdf(q);
                assert!((back - p).abs() < 1e-9, "{f}: p={p} q={q} cdf={back}");
            }
        }
    }

    #[test]
    fn cdf_monotone_on_grid() {
        for f in continuous_corpus().into_iter().chain([FamilySpec::st_petersburg(), FamilySpec::mixture()]) {
            let mut prev = 0.0;
            for i in 0..10_000 {
                let x = -50.0 + 1e-2 * i as f64;
                let v = f.cdf(x);
                assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v), "{f} at {x}");
                prev = v;
            }
        }
    }

    #[test]
    fn student_one_is_cauchy() {
        let t = FamilySpec::student(1.0).unwrap();
        let c = FamilySpec::cauchy();
        for i in 0..400 {
            let x = -200.0 + i as f64 * 1.0025;
            assert!((t.cdf(x) - c.cdf(x)).abs() < 1e-8, "x={x}");
        }
        assert!((t.cdf(1e7) - c.cdf(1e7)).abs() < 1e-8);
    }

    #[test]
    fn student_cdf_matches_reference() {
        use statrs::distribution::{ContinuousCDF, StudentsT};
        for df in [0.5, 1.5, 3.0, 5.0] {
            let t = FamilySpec::student(df).unwrap();
            let r = StudentsT::new(0.0, 1.0, df).unwrap();
            for x in [-30.0, -2.0, -0.1, 0.0, 0.7, 3.0, 100.0] {
                assert!((t.cdf(x) - r.cdf(x)).abs() < 1e-9, "df={df} x={x}");
            }
        }
    }

    #[test]
    fn st_petersburg_lattice() {
        let sp = FamilySpec::st_petersburg();
        assert_eq!(sp.cdf(1.99), 0.0);
        assert_eq!(sp.cdf(2.0), 0.5);
        assert_eq!(sp.cdf(7.9), 0.75);
        assert_eq!(sp.cdf(8.0), 0.875);
        assert_eq!(sp.quantile(0.5).unwrap(), 2.0);
        assert_eq!(sp.quantile(0.5000001).unwrap(), 4.0);
        assert_eq!(sp.quantile(0.875).unwrap(), 8.0);
        let d = sp.discrete().unwrap();
        let total: f64 = d.pmf().iter().sum::<f64>() + d.truncation_mass();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(d.truncation_mass(), (-40f64).exp2());
        assert!((d.cdf_lower(8.0) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn discrete_validation() {
        assert!(DiscreteDistribution::new(vec![1.0, 2.0], vec![0.5, 0.5], 0.0).is_ok());
        assert!(DiscreteDistribution::new(vec![2.0, 1.0], vec![0.5, 0.5], 0.0).is_err());
        assert!(DiscreteDistribution::new(vec![1.0, 2.0], vec![0.5, 0.4], 0.0).is_err());
        assert!(DiscreteDistribution::new(vec![1.0, 2.0], vec![0.5, 0.4], 0.1).is_ok());
    }

    #[test]
    fn samplers_match_targets() {
        let mut rng = rng_from(2024);
        let n = 100_000;
        let c = FamilySpec::cauchy().sample(n, &mut rng).unwrap();
        let median = c.values()[n / 2];
        assert!(median.abs() < 0.02, "median {median}");

        let p = FamilySpec::pareto(1.0).unwrap().sample(n, &mut rng).unwrap();
        let frac = p.values().iter().filter(|&&v| v <= 2.0).count() as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.01, "{frac}");

        let t = FamilySpec::student(1.0).unwrap().sample(n, &mut rng).unwrap();
        let cauchy = FamilySpec::cauchy();
        let ks = t
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let f = cauchy.cdf(v);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0f64, f64::max);
        assert!(ks < 0.01, "ks {ks}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = FamilySpec::mixture();
        let a = f.sample(50, &mut rng_from(3)).unwrap();
        let b = f.sample(50, &mut rng_from(3)).unwrap();
        assert_eq!(a, b);
        assert!(f.sample(0, &mut rng_from(3)).is_err());
    }
}
