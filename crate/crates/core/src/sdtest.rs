//! Tests of `H0: θ·X ≥st η·X` from one sample.
//!
//! The statistic is `T = sup_x max(F_{n,θ}(x) − F_{n,η}(x), 0)`. Two
//! calibrations are offered: the standard Cauchy law, which is least
//! favourable under the null and closed under convex combination, and a
//! multinomial bootstrap of the centred two-sided difference process.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::combine::plan::{
    positive_sup, uniform_statistic, uniform_statistic_with_size, use_exact, PairPlan, PlanScratch,
};
use crate::combine::{Evaluator, GridSpec, WeightVector, DEFAULT_TUPLE_BUDGET};
use crate::empirical::{cauchy_sample, multinomial_counts, Sample};
use crate::error::{Error, Result};
use crate::seed::{derive_keyed, rng_from};

/// Minimum number of reference draws.
pub const MIN_REPS: usize = 100;

const TOTAL_TOL: f64 = 1e-9;
const SUMMARY_LEVELS: [f64; 4] = [0.5, 0.9, 0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Cauchy,
    #[default]
    Bootstrap,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cauchy => "cauchy",
            Method::Bootstrap => "bootstrap",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cauchy" => Ok(Method::Cauchy),
            "bootstrap" => Ok(Method::Bootstrap),
            other => Err(Error::Parse {
                what: "test method",
                input: other.to_string(),
                reason: "expected cauchy or bootstrap".into(),
            }),
        }
    }
}

/// Settings shared by both tests. `reps` is the number of Monte Carlo Cauchy
/// samples or bootstrap resamples.
#[derive(Debug, Clone, PartialEq)]
pub struct TestConfig {
    pub alpha: f64,
    pub method: Method,
    pub reps: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub evaluator: Evaluator,
    pub budget: u64,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            alpha: 0.1,
            method: Method::Bootstrap,
            reps: 1000,
            seed: 0,
            grid: GridSpec::default(),
            evaluator: Evaluator::Auto,
            budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::ParameterDomain(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.reps < MIN_REPS {
            return Err(Error::ParameterDomain(format!(
                "at least {MIN_REPS} reference draws are needed, got {}",
                self.reps
            )));
        }
        Ok(())
    }
}

/// Outcome of one test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    /// `√n · T`.
    pub scaled_statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
    /// Smallest point where the positive part of `F_{n,θ} − F_{n,η}` peaks.
    pub witness: f64,
    /// Whether the exact evaluator was used (grid otherwise).
    pub exact: bool,
    /// Number of evaluation points behind the statistic.
    pub evaluation_points: usize,
    pub reps: usize,
    /// `(level, quantile)` pairs of the reference draws.
    pub reference_quantiles: Vec<(f64, f64)>,
}

impl TestResult {
    /// `key=value` lines for scripts.
    pub fn key_values(&self) -> String {
        let mut out = format!(
            "method={}\nstatistic={}\nscaled_statistic={}\ncritical_value={}\np_value={}\nreject={}\nwitness={}\nevaluator={}\nevaluation_points={}\nreps={}\n",
            self.method,
            self.statistic,
            self.scaled_statistic,
            self.critical_value,
            self.p_value,
            self.reject,
            self.witness,
            if self.exact { "exact" } else { "grid" },
            self.evaluation_points,
            self.reps
        );
        for (p, q) in &self.reference_quantiles {
            out.push_str(&format!("reference_q{p}={q}\n"));
        }
        out
    }
}

fn order_statistic(sorted: &[f64], alpha: f64) -> f64 {
    let m = sorted.len();
    let k = ((1.0 - alpha) * m as f64).ceil() as usize;
    sorted[k.clamp(1, m) - 1]
}

fn summary(sorted: &[f64]) -> Vec<(f64, f64)> {
    SUMMARY_LEVELS
        .iter()
        .map(|&p| (p, order_statistic(sorted, 1.0 - p)))
        .collect()
}

/// `T` and its witness for `sample`, using the exact evaluator when both
/// enumerations fit the budget and a shared grid otherwise.
pub fn test_statistic(
    sample: &Sample,
    theta: &WeightVector,
    eta: &WeightVector,
    cfg: &TestConfig,
) -> Result<(f64, f64)> {
    if sample.is_uniform() {
        return uniform_statistic(sample, theta, eta, &cfg.grid, cfg.evaluator, cfg.budget);
    }
    let plan = PairPlan::new(sample, theta, eta, &cfg.grid, cfg.evaluator, cfg.budget)?;
    let mut d = Vec::new();
    plan.difference(sample.weights(), sample.prefix(), &mut d, &mut PlanScratch::default());
    Ok(positive_sup(plan.points(), &d))
}

fn equal_totals(theta: &WeightVector, eta: &WeightVector) -> Result<(WeightVector, WeightVector)> {
    let (a, b) = (theta.total(), eta.total());
    if (a - b).abs() > TOTAL_TOL {
        return Err(Error::UnsupportedConfig(format!(
            "the Cauchy calibration needs weight totals equal to 1 after a common rescaling; \
             got {a} and {b}"
        )));
    }
    Ok((theta.normalized(), eta.normalized()))
}

/// Sorted `√n·T` over independent standard Cauchy samples of size `n`.
///
/// Depends only on `n`, the weights and the configuration, so one reference
/// can serve many observed samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyReference {
    n: usize,
    theta: WeightVector,
    eta: WeightVector,
    draws: Vec<f64>,
}

impl CauchyReference {
    pub fn generate(
        n: usize,
        theta: &WeightVector,
        eta: &WeightVector,
        cfg: &TestConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let (theta, eta) = equal_totals(theta, eta)?;
        if n == 0 {
            return Err(Error::Domain("sample size must be positive".into()));
        }
        let root_n = (n as f64).sqrt();
        let draws: Result<Vec<f64>> = (0..cfg.reps)
            .into_par_iter()
            .map(|m| {
                let mut rng = rng_from(derive_keyed(cfg.seed, "cauchy-reference", m as u64));
                let c = cauchy_sample(n, &mut rng)?;
                let (t, _) = uniform_statistic(&c, &theta, &eta, &cfg.grid, cfg.evaluator, cfg.budget)?;
                Ok(root_n * t)
            })
            .collect();
        let mut draws = draws?;
        draws.sort_unstable_by(f64::total_cmp);
        Ok(CauchyReference {
            n,
            theta,
            eta,
            draws,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    /// Order statistic of rank `⌈(1 − α)M⌉`.
    pub fn critical_value(&self, alpha: f64) -> f64 {
        order_statistic(&self.draws, alpha)
    }

    /// `(1 + #{draws ≥ observed}) / (M + 1)`.
    pub fn p_value(&self, scaled: f64) -> f64 {
        let below = self.draws.partition_point(|&d| d < scaled);
        let at_or_above = self.draws.len() - below;
        (1 + at_or_above) as f64 / (self.draws.len() + 1) as f64
    }
}

/// Cauchy-calibrated test. Requires `Σθ = Ση`; both are rescaled to total 1.
pub fn cauchy_test(
    sample: &Sample,
    theta: &WeightVector,
    eta: &WeightVector,
    cfg: &TestConfig,
) -> Result<TestResult> {
    let reference = CauchyReference::generate(sample.len(), theta, eta, cfg)?;
    cauchy_test_with_reference(sample, cfg, &reference)
}

/// Cauchy test against a precomputed reference.
pub fn cauchy_test_with_reference(
    sample: &Sample,
    cfg: &TestConfig,
    reference: &CauchyReference,
) -> Result<TestResult> {
    if reference.n != sample.len() {
        return Err(Error::Precondition(format!(
            "reference built for n = {}, sample has n = {}",
            reference.n,
            sample.len()
        )));
    }
    let (theta, eta) = (&reference.theta, &reference.eta);
    let exact = use_exact(sample.len(), theta, eta, cfg.evaluator, cfg.budget)?;
    let (t, witness, points) = if sample.is_uniform() {
        uniform_statistic_with_size(sample, theta, eta, &cfg.grid, cfg.evaluator, cfg.budget)?
    } else {
        let plan = PairPlan::new(sample, theta, eta, &cfg.grid, cfg.evaluator, cfg.budget)?;
        let mut d = Vec::new();
        plan.difference(sample.weights(), sample.prefix(), &mut d, &mut PlanScratch::default());
        let (t, at) = positive_sup(plan.points(), &d);
        (t, at, plan.points().len())
    };
    let scaled = (sample.len() as f64).sqrt() * t;
    let c = reference.critical_value(cfg.alpha);
    Ok(TestResult {
        method: Method::Cauchy,
        statistic: t,
        scaled_statistic: scaled,
        critical_value: c,
        p_value: reference.p_value(scaled),
        reject: scaled >= c,
        witness,
        exact,
        evaluation_points: points,
        reps: reference.draws.len(),
        reference_quantiles: summary(&reference.draws),
    })
}

/// Bootstrap test. The sample must carry uniform weights.
pub fn bootstrap_test(
    sample: &Sample,
    theta: &WeightVector,
    eta: &WeightVector,
    cfg: &TestConfig,
) -> Result<TestResult> {
    cfg.validate()?;
    if !sample.is_uniform() {
        return Err(Error::Precondition(
            "the bootstrap resamples raw observations; weighted samples are not supported".into(),
        ));
    }
    let n = sample.len();
    let plan = PairPlan::new(sample, theta, eta, &cfg.grid, cfg.evaluator, cfg.budget)?;
    let mut base = Vec::new();
    plan.difference(sample.weights(), sample.prefix(), &mut base, &mut PlanScratch::default());
    let (t, witness) = positive_sup(plan.points(), &base);
    let root_n = (n as f64).sqrt();
    let scaled = root_n * t;

    let mut draws: Vec<f64> = (0..cfg.reps)
        .into_par_iter()
        .map_init(
            || (PlanScratch::default(), Vec::new(), Vec::new(), Vec::new()),
            |(scratch, weights, prefix, d), b| {
                let mut rng = rng_from(derive_keyed(cfg.seed, "bootstrap", b as u64));
                let counts = multinomial_counts(n, &mut rng);
                weights.clear();
                prefix.clear();
                prefix.push(0.0);
                let mut acc = 0u64;
                for &c in &counts {
                    weights.push(f64::from(c) / n as f64);
                    acc += u64::from(c);
                    prefix.push(acc as f64 / n as f64);
                }
                plan.difference(weights, prefix, d, scratch);
                let sup = d
                    .iter()
                    .zip(&base)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                root_n * sup
            },
        )
        .collect();
    let exceed = draws.iter().filter(|&&g| g > scaled).count();
    draws.sort_unstable_by(f64::total_cmp);
    let c = order_statistic(&draws, cfg.alpha);
    Ok(TestResult {
        method: Method::Bootstrap,
        statistic: t,
        scaled_statistic: scaled,
        critical_value: c,
        p_value: exceed as f64 / cfg.reps as f64,
        reject: scaled > c,
        witness,
        exact: plan.is_exact(),
        evaluation_points: plan.points().len(),
        reps: cfg.reps,
        reference_quantiles: summary(&draws),
    })
}

/// Validates `cfg` and dispatches on its method.
pub fn run_test(
    sample: &Sample,
    theta: &WeightVector,
    eta: &WeightVector,
    cfg: &TestConfig,
) -> Result<TestResult> {
    cfg.validate()?;
    match cfg.method {
        Method::Cauchy => cauchy_test(sample, theta, eta, cfg),
        Method::Bootstrap => bootstrap_test(sample, theta, eta, cfg),
    }
}
