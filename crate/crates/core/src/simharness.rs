//! Monte Carlo power studies with reproducible, worker-independent seeding.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;

use crate::combine::{Evaluator, GridLayout, GridSpec, WeightVector, DEFAULT_TUPLE_BUDGET};
use crate::distributions::FamilySpec;
use crate::error::{Error, Result};
use crate::sdtest::{bootstrap_test, cauchy_test_with_reference, CauchyReference, Method, TestConfig};
use crate::seed::{derive_keyed, rng_from};

/// Smallest number of replications per cell.
pub const MIN_REPLICATIONS: usize = 50;

/// Grid size used by power studies unless configured otherwise.
pub const DEFAULT_STUDY_GRID_POINTS: usize = 2048;

pub const CSV_HEADER: &str = "family,param,theta,eta,n,method,rate,se,seconds";

/// One weight-vector comparison, testing `H0: θ·X ≥st η·X`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPair {
    pub theta: WeightVector,
    pub eta: WeightVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub families: Vec<FamilySpec>,
    pub pairs: Vec<WeightPair>,
    pub n: Vec<usize>,
    pub alpha: f64,
    pub methods: Vec<Method>,
    /// Datasets drawn per cell.
    pub replications: usize,
    /// Reference draws per test (Monte Carlo or bootstrap).
    pub reps: usize,
    pub seed: u64,
    /// Thread count; `None` uses the global pool.
    pub workers: Option<usize>,
    pub grid: GridSpec,
    pub budget: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            families: Vec::new(),
            pairs: Vec::new(),
            n: vec![100, 500],
            alpha: 0.1,
            methods: vec![Method::Bootstrap, Method::Cauchy],
            replications: 1000,
            reps: 1000,
            seed: 1,
            workers: None,
            grid: GridSpec::with_points(DEFAULT_STUDY_GRID_POINTS),
            budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    theta: String,
    eta: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    families: Vec<String>,
    pairs: Vec<RawPair>,
    n: Option<Vec<usize>>,
    alpha: Option<f64>,
    methods: Option<Vec<String>>,
    replications: Option<usize>,
    reps: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    grid_points: Option<usize>,
    grid_layout: Option<String>,
    budget: Option<u64>,
}

impl ScenarioConfig {
    /// Parses a TOML scenario. Keys: `families` (list of family specs such
    /// as `"pareto(sh=2)"`), `[[pairs]]` tables with `theta` and `eta`,
    /// `n`, `alpha`, `methods`, `replications`, `reps`, `seed`, `workers`,
    /// `grid_points`, `grid_layout`, `budget`.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Load {
            line: e
                .span()
                .map(|s| text[..s.start].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        let d = ScenarioConfig::default();
        let families = raw
            .families
            .iter()
            .map(|f| f.parse())
            .collect::<Result<Vec<FamilySpec>>>()?;
        let pairs = raw
            .pairs
            .iter()
            .map(|p| {
                Ok(WeightPair {
                    theta: p.theta.parse()?,
                    eta: p.eta.parse()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let methods = match raw.methods {
            Some(m) => m.iter().map(|s| s.parse()).collect::<Result<Vec<Method>>>()?,
            None => d.methods,
        };
        let layout = match raw.grid_layout {
            Some(l) => l.parse()?,
            None => GridLayout::default(),
        };
        let cfg = ScenarioConfig {
            families,
            pairs,
            n: raw.n.unwrap_or(d.n),
            alpha: raw.alpha.unwrap_or(d.alpha),
            methods,
            replications: raw.replications.unwrap_or(d.replications),
            reps: raw.reps.unwrap_or(d.reps),
            seed: raw.seed.unwrap_or(d.seed),
            workers: raw.workers,
            grid: GridSpec {
                points: raw.grid_points.unwrap_or(DEFAULT_STUDY_GRID_POINTS),
                range: None,
                layout,
            },
            budget: raw.budget.unwrap_or(d.budget),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::ParameterDomain(format!(
                "at least {MIN_REPLICATIONS} replications per cell are needed, got {}",
                self.replications
            )));
        }
        if self.n.contains(&0) {
            return Err(Error::ParameterDomain("sample sizes must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::ParameterDomain("workers must be positive".into()));
        }
        self.test_config(Method::Bootstrap, 0).validate()
    }

    fn test_config(&self, method: Method, seed: u64) -> TestConfig {
        TestConfig {
            alpha: self.alpha,
            method,
            reps: self.reps,
            seed,
            grid: self.grid,
            evaluator: Evaluator::Auto,
            budget: self.budget,
        }
    }
}

/// One cell of a power table. `rate` and `se` are `None` for skipped cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub family: String,
    pub param: String,
    pub theta: WeightVector,
    pub eta: WeightVector,
    pub n: usize,
    pub method: Method,
    pub rejections: usize,
    pub replications: usize,
    pub rate: Option<f64>,
    pub se: Option<f64>,
    pub seconds: f64,
    pub skipped: Option<String>,
}

fn joined(w: &WeightVector) -> String {
    w.to_string().replace(',', ";")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerTable {
    pub title: String,
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    /// Comma separated rows under [`CSV_HEADER`]; weights are joined with
    /// `;` and skipped cells show `skipped` in the rate column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let (rate, se) = match (r.rate, r.se) {
                (Some(rate), Some(se)) => (format!("{rate:.3}"), format!("{se:.4}")),
                _ => ("skipped".to_string(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{:.2}",
                r.family,
                r.param,
                joined(&r.theta),
                joined(&r.eta),
                r.n,
                r.method,
                rate,
                se,
                r.seconds
            );
        }
        out
    }

    /// First row matching the predicate.
    pub fn find(&self, pred: impl Fn(&PowerRow) -> bool) -> Option<&PowerRow> {
        self.rows.iter().find(|r| pred(r))
    }
}

fn cell_key(family: &FamilySpec, pair: &WeightPair, n: usize, method: Method) -> String {
    format!("{family}|{}|{}|{n}|{method}", pair.theta, pair.eta)
}

fn data_key(family: &FamilySpec, n: usize) -> String {
    format!("{family}|{n}")
}

fn run_cell(
    cfg: &ScenarioConfig,
    family: &FamilySpec,
    pair: &WeightPair,
    n: usize,
    method: Method,
) -> PowerRow {
    let start = Instant::now();
    let key = cell_key(family, pair, n, method);
    let dkey = data_key(family, n);
    let outcome: Result<usize> = (|| {
        let reference = match method {
            Method::Cauchy => {
                let tc = cfg.test_config(method, derive_keyed(cfg.seed, &key, u64::MAX));
                Some(CauchyReference::generate(n, &pair.theta, &pair.eta, &tc)?)
            }
            Method::Bootstrap => None,
        };
        let decisions: Result<Vec<bool>> = (0..cfg.replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng_from(derive_keyed(cfg.seed, &dkey, r as u64));
                let sample = family.sample(n, &mut rng)?;
                let tc = cfg.test_config(method, derive_keyed(cfg.seed, &key, r as u64));
                let res = match &reference {
                    Some(reference) => cauchy_test_with_reference(&sample, &tc, reference)?,
                    None => bootstrap_test(&sample, &pair.theta, &pair.eta, &tc)?,
                };
                Ok(res.reject)
            })
            .collect();
        Ok(decisions?.into_iter().filter(|&d| d).count())
    })();
    let seconds = start.elapsed().as_secs_f64();
    let base = PowerRow {
        family: family.name().to_string(),
        param: family.params(),
        theta: pair.theta.clone(),
        eta: pair.eta.clone(),
        n,
        method,
        rejections: 0,
        replications: cfg.replications,
        rate: None,
        se: None,
        seconds,
        skipped: None,
    };
    match outcome {
        Ok(k) => {
            let r = k as f64 / cfg.replications as f64;
            PowerRow {
                rejections: k,
                rate: Some(r),
                se: Some((r * (1.0 - r) / cfg.replications as f64).sqrt()),
                ..base
            }
        }
        Err(e) => PowerRow {
            skipped: Some(e.to_string()),
            ..base
        },
    }
}

/// Runs every (family, pair, n, method) cell. Infeasible cells are kept as
/// skipped rows carrying the reason.
pub fn run_power_study(cfg: &ScenarioConfig) -> Result<PowerTable> {
    cfg.validate()?;
    let body = || {
        let mut rows = Vec::new();
        for family in &cfg.families {
            for pair in &cfg.pairs {
                for &n in &cfg.n {
                    for &method in &cfg.methods {
                        rows.push(run_cell(cfg, family, pair, n, method));
                    }
                }
            }
        }
        rows
    };
    let rows = match cfg.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::CapacityLimit(format!("cannot start {k} workers: {e}")))?
            .install(body),
        None => body(),
    };
    Ok(PowerTable {
        title: String::new(),
        rows,
    })
}

/// Preset studies: `(id, description)`.
pub const TABLE_IDS: [(&str, &str); 12] = [
    ("pareto-means", "sample means of size 2 to 4 against one draw, Pareto data"),
    ("loglogistic-means", "sample means of size 2 to 4 against one draw, loglogistic data"),
    ("frechet-means", "sample means of size 2 to 4 against one draw, Frechet data"),
    ("student-means", "sample means of size 2 to 4 against one draw, Student t data"),
    ("mixture-means", "sample means of size 2 to 5 against one draw, Bernoulli plus Pareto mixture"),
    ("weighted-bootstrap", "two-term weighted sums against one draw, bootstrap test"),
    ("weighted-cauchy", "two-term weighted sums against one draw, Cauchy test"),
    ("weighted-pairs-bootstrap", "two-term weighted sums against the mean of two, bootstrap test"),
    ("weighted-pairs-cauchy", "two-term weighted sums against the mean of two, Cauchy test"),
    ("nonmajorized-1", "three-term sums with nonmajorized weights (0.1,0.35,0.55) and (0.15,0.25,0.6)"),
    ("nonmajorized-2", "three-term sums with nonmajorized weights (0.09,0.41,0.5) and (0.1,0.1,0.8)"),
    ("direction-majorized", "three-term sums with majorized weights (0.2,0.3,0.5) and (0.1,0.1,0.8)"),
];

fn wv(v: &[f64]) -> WeightVector {
    WeightVector::new(v.to_vec()).expect("preset weights are positive")
}

fn means_pairs(sizes: &[usize]) -> Vec<WeightPair> {
    sizes
        .iter()
        .map(|&s| WeightPair {
            theta: WeightVector::sample_mean(s),
            eta: wv(&[1.0]),
        })
        .collect()
}

fn both_ways(a: &[f64], b: &[f64]) -> Vec<WeightPair> {
    vec![
        WeightPair {
            theta: wv(a),
            eta: wv(b),
        },
        WeightPair {
            theta: wv(b),
            eta: wv(a),
        },
    ]
}

fn shape_families(make: fn(f64) -> Result<FamilySpec>, shapes: &[f64]) -> Vec<FamilySpec> {
    shapes.iter().map(|&s| make(s).expect("preset shapes are valid")).collect()
}

fn weighted_families() -> Vec<FamilySpec> {
    let sh = [1.0, 2.0, 3.0, 4.0, 5.0];
    let mut f = shape_families(FamilySpec::pareto, &sh);
    f.extend(shape_families(FamilySpec::loglogistic, &sh));
    f.extend(shape_families(FamilySpec::frechet, &sh));
    f.extend(shape_families(FamilySpec::student, &[0.5, 1.0, 1.5, 3.0, 5.0]));
    f
}

/// Full-scale configuration of a preset study.
pub fn preset(id: &str) -> Result<ScenarioConfig> {
    let sh = [1.0, 2.0, 3.0, 4.0, 5.0];
    let direction_sh = [1.0, 0.8, 0.6];
    let d = ScenarioConfig::default();
    let cfg = match id {
        "pareto-means" | "loglogistic-means" | "frechet-means" | "student-means" => {
            let families = match id {
                "pareto-means" => shape_families(FamilySpec::pareto, &sh),
                "loglogistic-means" => shape_families(FamilySpec::loglogistic, &sh),
                "frechet-means" => shape_families(FamilySpec::frechet, &sh),
                _ => shape_families(FamilySpec::student, &[0.5, 1.0, 1.5, 3.0, 5.0]),
            };
            ScenarioConfig {
                families,
                pairs: means_pairs(&[2, 3, 4]),
                ..d
            }
        }
        "mixture-means" => ScenarioConfig {
            families: vec![FamilySpec::mixture()],
            pairs: means_pairs(&[2, 3, 4, 5]),
            ..d
        },
        "weighted-bootstrap" | "weighted-cauchy" => ScenarioConfig {
            families: weighted_families(),
            pairs: [[0.4, 0.6], [0.2, 0.8]]
                .iter()
                .map(|t| WeightPair {
                    theta: wv(t),
                    eta: wv(&[1.0]),
                })
                .collect(),
            n: vec![500],
            methods: vec![if id == "weighted-bootstrap" {
                Method::Bootstrap
            } else {
                Method::Cauchy
            }],
            ..d
        },
        "weighted-pairs-bootstrap" | "weighted-pairs-cauchy" => ScenarioConfig {
            families: weighted_families(),
            pairs: [[0.1, 0.9], [0.25, 0.75]]
                .iter()
                .map(|t| WeightPair {
                    theta: wv(t),
                    eta: wv(&[0.5, 0.5]),
                })
                .collect(),
            n: vec![500],
            methods: vec![if id == "weighted-pairs-bootstrap" {
                Method::Bootstrap
            } else {
                Method::Cauchy
            }],
            ..d
        },
        "nonmajorized-1" | "nonmajorized-2" | "direction-majorized" => {
            let pairs = match id {
                "nonmajorized-1" => both_ways(&[0.1, 0.35, 0.55], &[0.15, 0.25, 0.6]),
                "nonmajorized-2" => both_ways(&[0.09, 0.41, 0.5], &[0.1, 0.1, 0.8]),
                _ => both_ways(&[0.2, 0.3, 0.5], &[0.1, 0.1, 0.8]),
            };
            ScenarioConfig {
                families: shape_families(FamilySpec::loglogistic, &direction_sh),
                pairs,
                n: vec![500],
                ..d
            }
        }
        other => {
            return Err(Error::UnknownTable {
                id: other.to_string(),
                valid: TABLE_IDS.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", "),
            })
        }
    };
    Ok(cfg)
}

/// Scales replications and reference draws of a configuration by `scale`,
/// respecting the minimums.
pub fn scaled(mut cfg: ScenarioConfig, scale: f64) -> Result<ScenarioConfig> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::ParameterDomain(format!("scale must lie in (0, 1], got {scale}")));
    }
    cfg.replications = ((cfg.replications as f64 * scale).round() as usize).max(MIN_REPLICATIONS);
    cfg.reps = ((cfg.reps as f64 * scale).round() as usize).max(crate::sdtest::MIN_REPS);
    Ok(cfg)
}

/// Runs a preset study at reduced scale.
pub fn reproduce_table(id: &str, scale: f64) -> Result<PowerTable> {
    let cfg = scaled(preset(id)?, scale)?;
    let mut table = run_power_study(&cfg)?;
    table.title = TABLE_IDS
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, t)| t.to_string())
        .unwrap_or_default();
    Ok(table)
}
