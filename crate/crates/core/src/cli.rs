//! Command-line front end. [`run`] parses arguments, dispatches, and maps
//! errors onto exit codes: 0 success (a rejection is still success), 2 usage,
//! 3 data, 4 capability or capacity.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::{
    cauchy_covariance, empirical_process_covariance, total_covariance, CovarianceSpec,
};
use crate::combine::{
    exact_combination_cdf, grid_combination_cdf, parametric_combination_cdf, pointwise_combination_cdf,
    Evaluator, GridLayout, GridSpec, WeightVector, DEFAULT_TUPLE_BUDGET,
};
use crate::distributions::FamilySpec;
use crate::empirical::{load_sample, Sample};
use crate::error::{Error, Result};
use crate::majorization::{
    compare, dominance_network, is_h_split_majorized, t_transform_chain, DominanceEdge, Relation,
    H_SPLIT_MAX_DIM,
};
use crate::sdtest::{run_test, Method, TestConfig};
use crate::shapeclass::{self, Property, ShapeGrid};
use crate::simharness::{self, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_CAPABILITY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "sdcomb", version, about = "Stochastic dominance between linear combinations of i.i.d. samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test H0: θ·X ≥st η·X on one sample.
    Test(TestArgs),
    /// Run a power study from a config file or a preset table.
    Simulate(SimulateArgs),
    /// Grid check of a shape class for a family.
    CheckClass(CheckClassArgs),
    /// Compare two weight vectors under majorization.
    Majorize(MajorizeArgs),
    /// Closure of sample-mean dominance relations.
    Network(NetworkArgs),
    /// Export CDF curves of weighted sums as x,value text.
    Curves(CurvesArgs),
    /// Limiting covariance of the plug-in process.
    Covariance(CovarianceArgs),
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Grid size when the grid evaluator is used.
    #[arg(long, default_value_t = crate::combine::DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Fixed grid range `lo:hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    grid_range: Option<(f64, f64)>,
    /// uniform or asinh.
    #[arg(long, default_value = "asinh", value_parser = parse_from_str::<GridLayout>)]
    grid_layout: GridLayout,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            points: self.grid_points,
            range: self.grid_range,
            layout: self.grid_layout,
        }
    }
}

#[derive(Args, Debug)]
struct TestArgs {
    /// Sample file, one value per line.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_parser = parse_weights)]
    theta: WeightVector,
    #[arg(long, value_parser = parse_weights)]
    eta: WeightVector,
    /// cauchy or bootstrap.
    #[arg(long, default_value = "bootstrap", value_parser = parse_from_str::<Method>)]
    method: Method,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Monte Carlo draws or bootstrap resamples.
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// auto, exact or grid.
    #[arg(long, default_value = "auto", value_parser = parse_from_str::<Evaluator>)]
    evaluator: Evaluator,
    /// Largest tuple count enumerated exactly.
    #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
    budget: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// TOML scenario file.
    #[arg(long, conflicts_with = "table", required_unless_present = "table")]
    config: Option<PathBuf>,
    /// Preset study id, e.g. loglogistic-means.
    #[arg(long)]
    table: Option<String>,
    /// Fraction of the full replication and reference counts.
    #[arg(long, default_value_t = 0.5)]
    scale: f64,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the scenario grid size.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckClassArgs {
    #[arg(long, value_parser = parse_from_str::<FamilySpec>)]
    family: FamilySpec,
    /// classL, invertedConcave, antiStarshaped, subadditive or all.
    #[arg(long, default_value = "all")]
    property: String,
    #[arg(long, default_value_t = shapeclass::DEFAULT_TOLERANCE)]
    tol: f64,
    /// Class 𝓛 x range `lo:hi`, log-spaced; defaults to family quantiles.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, requires = "h_range")]
    x_range: Option<(f64, f64)>,
    /// Range `lo:hi` for the arguments of the inverted CDF.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, requires = "x_range")]
    h_range: Option<(f64, f64)>,
}

#[derive(Args, Debug)]
struct MajorizeArgs {
    #[arg(value_parser = parse_weights)]
    theta: WeightVector,
    #[arg(value_parser = parse_weights)]
    eta: WeightVector,
    /// Also decide h-split majorization (dimensions up to 12).
    #[arg(long)]
    h_split: bool,
}

#[derive(Args, Debug)]
struct NetworkArgs {
    /// Base relations `a:b` (X̄_a ≥st X̄_b), comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_from_str::<DominanceEdge>)]
    base: Vec<DominanceEdge>,
    #[arg(long)]
    max: u32,
}

#[derive(Args, Debug)]
struct CurvesArgs {
    /// Parametric family.
    #[arg(long, value_parser = parse_from_str::<FamilySpec>, conflicts_with = "data", required_unless_present = "data")]
    family: Option<FamilySpec>,
    /// Sample file instead of a family.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Weight vectors, one curve each; repeatable.
    #[arg(long, value_parser = parse_weights)]
    theta: Vec<WeightVector>,
    /// Sample-mean sizes, e.g. 1,2,3,4.
    #[arg(long, value_delimiter = ',')]
    means: Vec<usize>,
    /// Output range `lo:hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: Option<(f64, f64)>,
    /// Output points per curve.
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct CovarianceArgs {
    #[arg(long, value_parser = parse_from_str::<FamilySpec>)]
    family: FamilySpec,
    #[arg(long, value_parser = parse_weights)]
    theta: WeightVector,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    /// Monte Carlo check, `n=2000,reps=5000`.
    #[arg(long, value_parser = parse_oracle)]
    oracle: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weights(s: &str) -> std::result::Result<WeightVector, String> {
    parse_from_str(s)
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad lower bound {a:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad upper bound {b:?}"))?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(format!("need finite lo < hi, got {s:?}"));
    }
    Ok((lo, hi))
}

fn parse_oracle(s: &str) -> std::result::Result<(usize, usize), String> {
    let (mut n, mut reps) = (None, None);
    for part in s.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, got {part:?}"))?;
        let v: usize = v.trim().parse().map_err(|_| format!("bad count {v:?}"))?;
        match k.trim() {
            "n" => n = Some(v),
            "reps" => reps = Some(v),
            other => return Err(format!("unknown oracle key {other:?}")),
        }
    }
    Ok((n.unwrap_or(2000), reps.unwrap_or(5000)))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::UnknownTable { .. } | Error::ParameterDomain(_) => EXIT_USAGE,
        Error::Io(_) | Error::Load { .. } | Error::Domain(_) | Error::Precondition(_) | Error::Range { .. } => {
            EXIT_DATA
        }
        Error::Capacity { .. } | Error::CapacityLimit(_) | Error::Capability(_) | Error::UnsupportedConfig(_) => {
            EXIT_CAPABILITY
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match workers {
        None => f(),
        Some(0) => Err(Error::ParameterDomain("workers must be positive".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::CapacityLimit(format!("cannot start {k} workers: {e}")))?
            .install(f),
    }
}

/// Runs the command line `args` (program name first).
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Test(a) => cmd_test(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::CheckClass(a) => cmd_check_class(a, out),
        Command::Majorize(a) => cmd_majorize(a, out),
        Command::Network(a) => cmd_network(a, out),
        Command::Curves(a) => cmd_curves(a, out),
        Command::Covariance(a) => cmd_covariance(a, out),
    }
}

fn cmd_test(a: TestArgs, out: &mut dyn Write) -> Result<()> {
    let sample = load_sample(&a.data)?;
    let cfg = TestConfig {
        alpha: a.alpha,
        method: a.method,
        reps: a.reps,
        seed: a.seed,
        grid: a.grid.spec(),
        evaluator: a.evaluator,
        budget: a.budget,
    };
    let r = with_workers(a.workers, || run_test(&sample, &a.theta, &a.eta, &cfg))?;
    writeln!(out, "H0: ({})·X >=st ({})·X", a.theta, a.eta).map_err(io)?;
    writeln!(
        out,
        "n={} method={} alpha={} -> {}",
        sample.len(),
        r.method,
        a.alpha,
        if r.reject { "reject H0" } else { "do not reject H0" }
    )
    .map_err(io)?;
    writeln!(out).map_err(io)?;
    write!(out, "{}", r.key_values()).map_err(io)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let (mut cfg, title) = match (&a.config, &a.table) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            (ScenarioConfig::from_toml(&text)?, None)
        }
        (None, Some(id)) => {
            let cfg = simharness::scaled(simharness::preset(id)?, a.scale)?;
            let title = simharness::TABLE_IDS.iter().find(|(k, _)| k == id).map(|(_, t)| *t);
            (cfg, title)
        }
        (None, None) => return Err(Error::ParameterDomain("give --config or --table".into())),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    if let Some(p) = a.grid_points {
        cfg.grid.points = p;
    }
    let table = simharness::run_power_study(&cfg)?;
    let mut csv = String::new();
    if let Some(t) = title {
        csv.push_str(&format!("# {t}\n"));
    }
    csv.push_str(&table.to_csv());
    match a.out {
        Some(path) => std::fs::write(&path, csv).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(csv.as_bytes()).map_err(io),
    }
}

fn cmd_check_class(a: CheckClassArgs, out: &mut dyn Write) -> Result<()> {
    let props: Vec<Property> = if a.property.eq_ignore_ascii_case("all") {
        Property::ALL.to_vec()
    } else {
        vec![a.property.parse()?]
    };
    let grid = match (a.x_range, a.h_range) {
        (Some(x), Some(h)) => ShapeGrid::for_ranges(x, h)?,
        _ => ShapeGrid::for_family(&a.family)?,
    };
    writeln!(out, "family={}", a.family).map_err(io)?;
    for p in props {
        let r = shapeclass::check(p, &a.family, &grid, a.tol)?;
        writeln!(out).map_err(io)?;
        write!(out, "{}", r.key_values()).map_err(io)?;
    }
    Ok(())
}

fn cmd_majorize(a: MajorizeArgs, out: &mut dyn Write) -> Result<()> {
    let (t, e) = (a.theta.as_slice(), a.eta.as_slice());
    let rel = compare(t, e);
    writeln!(out, "{rel}").map_err(io)?;
    writeln!(out, "relation={}", match rel {
        Relation::Equivalent => "equivalent",
        Relation::Majorized => "majorized",
        Relation::Majorizes => "majorizes",
        Relation::Incomparable => "incomparable",
    })
    .map_err(io)?;
    let chain = match rel {
        Relation::Majorized | Relation::Equivalent => t_transform_chain(t, e).map(|c| ("eta", c)),
        Relation::Majorizes => t_transform_chain(e, t).map(|c| ("theta", c)),
        Relation::Incomparable => None,
    };
    if let Some((from, c)) = chain {
        writeln!(out, "# T-transforms applied to {from}, 1-based indices").map_err(io)?;
        for tr in c {
            writeln!(out, "{tr}").map_err(io)?;
        }
    }
    if a.h_split {
        if t.len().max(e.len()) > H_SPLIT_MAX_DIM {
            writeln!(out, "h_split=skipped (dimension above {H_SPLIT_MAX_DIM})").map_err(io)?;
        } else {
            writeln!(out, "h_split={}", is_h_split_majorized(t, e)?).map_err(io)?;
        }
    }
    Ok(())
}

fn cmd_network(a: NetworkArgs, out: &mut dyn Write) -> Result<()> {
    let net = dominance_network(&a.base, a.max)?;
    for edge in &net {
        writeln!(out, "{edge}").map_err(io)?;
    }
    Ok(())
}

fn curve_weights(a: &CurvesArgs) -> Result<Vec<WeightVector>> {
    let mut ws = a.theta.clone();
    for &s in &a.means {
        if s == 0 {
            return Err(Error::ParameterDomain("sample-mean size must be >= 1".into()));
        }
        ws.push(WeightVector::sample_mean(s));
    }
    if ws.is_empty() {
        ws.push(WeightVector::sample_mean(1));
    }
    Ok(ws)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn cmd_curves(a: CurvesArgs, out: &mut dyn Write) -> Result<()> {
    if a.points < 2 {
        return Err(Error::ParameterDomain("need at least 2 points".into()));
    }
    let weights = curve_weights(&a)?;
    let sample: Option<Sample> = a.data.as_ref().map(|p| load_sample(p)).transpose()?;
    let (lo, hi) = match (a.range, &a.family, &sample) {
        (Some(r), _, _) => r,
        (None, Some(f), _) => (f.quantile(0.005)?, f.quantile(0.95)?),
        (None, None, Some(s)) => (s.min(), s.max()),
        (None, None, None) => unreachable!("clap requires --family or --data"),
    };
    let xs = linspace(lo, hi, a.points);
    for (i, w) in weights.iter().enumerate() {
        let values: Vec<f64> = match (&a.family, &sample) {
            (Some(f), _) => {
                let c = parametric_combination_cdf(f, w, &a.grid.spec())?;
                let pts = c.cdf.points();
                let (tlo, thi) = (pts[0], pts[pts.len() - 1]);
                // the table only spans the central quantiles
                xs.iter()
                    .map(|&x| {
                        if f.discrete().is_none() && (x < tlo || x > thi) {
                            pointwise_combination_cdf(f, w.as_slice(), x)
                        } else {
                            c.eval(x)
                        }
                    })
                    .collect()
            }
            (None, Some(s)) => {
                let c = match exact_combination_cdf(s, w) {
                    Ok(c) => c,
                    Err(Error::Capacity { .. }) => grid_combination_cdf(s, w, &a.grid.spec())?,
                    Err(e) => return Err(e),
                };
                c.eval_sorted(&xs)
            }
            (None, None) => unreachable!(),
        };
        if i > 0 {
            writeln!(out).map_err(io)?;
        }
        writeln!(out, "# theta={w}").map_err(io)?;
        writeln!(out, "x,value").map_err(io)?;
        for (x, v) in xs.iter().zip(values) {
            writeln!(out, "{x},{v}").map_err(io)?;
        }
    }
    Ok(())
}

fn cmd_covariance(a: CovarianceArgs, out: &mut dyn Write) -> Result<()> {
    let spec = CovarianceSpec::new(a.family, a.theta.clone())?;
    let cov = total_covariance(&spec, a.x, a.y)?;
    writeln!(out, "covariance={cov}").map_err(io)?;
    let is_cauchy = a.family == FamilySpec::cauchy();
    if is_cauchy && (a.theta.total() - 1.0).abs() <= 1e-9 {
        writeln!(out, "cauchy_form={}", cauchy_covariance(&a.theta, a.x, a.y)?).map_err(io)?;
    }
    if let Some((n, reps)) = a.oracle {
        let (est, se) = with_workers(a.workers, || {
            empirical_process_covariance(&a.family, &a.theta, a.x, a.y, n, reps, a.seed)
        })?;
        writeln!(out, "oracle_estimate={est}").map_err(io)?;
        writeln!(out, "oracle_se={se}").map_err(io)?;
        let z = if se > 0.0 { (est - cov) / se } else { 0.0 };
        writeln!(out, "oracle_z={z}").map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("sdcomb").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn majorize_output() {
        let (code, out, _) = call(&["majorize", "0.5,0.5", "1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("θ ≺ η"));
        assert!(out.contains("λ=0.5"), "{out}");
    }

    #[test]
    fn network_output() {
        let (code, out, _) = call(&["network", "--base", "2:1,3:2", "--max", "24"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "24 -> 16"));
        assert!(out.lines().any(|l| l == "18 -> 12"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["majorize", "0.5,-1", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["test", "--data", "/nonexistent", "--theta", "1", "--eta", "1"]).0, EXIT_DATA);
        assert_eq!(call(&["network", "--base", "2:1", "--max", "100000"]).0, EXIT_CAPABILITY);
        assert_eq!(call(&["simulate", "--table", "nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["check-class", "--family", "cauchy"]).0, EXIT_DATA);
    }

    #[test]
    fn help_everywhere() {
        for sub in ["test", "simulate", "check-class", "majorize", "network", "curves", "covariance"] {
            let (code, out, _) = call(&[sub, "--help"]);
            assert_eq!(code, 0, "{sub}");
            assert!(out.contains("Usage"), "{sub}");
        }
    }

    #[test]
    fn curves_are_monotone() {
        let (code, out, _) = call(&["curves", "--family", "pareto(sh=1)", "--means", "1,2", "--points", "50"]);
        assert_eq!(code, 0);
        let mut prev = f64::NEG_INFINITY;
        let mut blocks = 0;
        for line in out.lines() {
            if line.starts_with('#') {
                blocks += 1;
                prev = f64::NEG_INFINITY;
                continue;
            }
            if let Some((_, v)) = line.split_once(',') {
                if let Ok(v) = v.parse::<f64>() {
                    assert!(v >= prev);
                    prev = v;
                }
            }
        }
        assert_eq!(blocks, 2);
    }

    #[test]
    fn ranges_and_oracle_specs() {
        assert_eq!(parse_range("-1:2.5").unwrap(), (-1.0, 2.5));
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("2").is_err());
        assert_eq!(parse_oracle("n=10,reps=2000").unwrap(), (10, 2000));
        assert!(parse_oracle("m=3").is_err());
    }
}
