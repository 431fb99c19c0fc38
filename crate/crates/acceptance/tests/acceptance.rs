//! Acceptance criteria runner. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use sdcomb::asymptotics::{
    cauchy_covariance, empirical_process_covariance_matrix, samplemean_covariance, total_covariance,
    CovarianceSpec,
};
use sdcomb::combine::{
    exact_combination_cdf, grid_combination_cdf, parametric_combination_cdf, sup_abs_diff, sup_positive_diff,
};
use sdcomb::majorization::{dominance_network, DominanceEdge};
use sdcomb::seed::rng_from;
use sdcomb::shapeclass::{check_family, Property, DEFAULT_TOLERANCE};
use sdcomb::simharness::{run_power_study, PowerTable, ScenarioConfig, WeightPair};
use sdcomb::{FamilySpec, GridSpec, Method, WeightVector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn w(v: &[f64]) -> WeightVector {
    WeightVector::new(v.to_vec()).unwrap()
}

fn means_pair(s: usize) -> WeightPair {
    WeightPair {
        theta: WeightVector::sample_mean(s),
        eta: WeightVector::sample_mean(1),
    }
}

fn study(family: FamilySpec, pairs: Vec<WeightPair>, methods: Vec<Method>, r: usize, reps: usize) -> PowerTable {
    let cfg = ScenarioConfig {
        families: vec![family],
        pairs,
        n: vec![500],
        methods,
        replications: r,
        reps,
        seed: 2024,
        ..ScenarioConfig::default()
    };
    run_power_study(&cfg).unwrap()
}

fn rate_of(table: &PowerTable, theta: &WeightVector, eta: &WeightVector, method: Method) -> (f64, f64) {
    let row = table
        .find(|r| &r.theta == theta && &r.eta == eta && r.method == method)
        .expect("cell present");
    (row.rate.expect("cell ran"), row.se.unwrap())
}

fn c1() -> Outcome {
    let t = study(FamilySpec::cauchy(), vec![means_pair(2)], vec![Method::Cauchy], 500, 1000);
    let (rate, se) = rate_of(&t, &WeightVector::sample_mean(2), &WeightVector::sample_mean(1), Method::Cauchy);
    let tol = 0.04f64.max(3.0 * se);
    Outcome {
        pass: (rate - 0.1).abs() <= tol,
        detail: format!("cauchy size rate={rate:.3} se={se:.4}, allowed 0.1±{tol:.3}"),
    }
}

fn c2() -> Outcome {
    let methods = vec![Method::Bootstrap, Method::Cauchy];
    let t = study(
        FamilySpec::pareto(1.0).unwrap(),
        (2..=4).map(means_pair).collect(),
        methods.clone(),
        200,
        500,
    );
    let mut pass = true;
    let mut parts = Vec::new();
    for s in 2..=4 {
        for &m in &methods {
            let (rate, se) = rate_of(&t, &WeightVector::sample_mean(s), &WeightVector::sample_mean(1), m);
            pass &= rate <= 0.02f64.max(3.0 * se);
            parts.push(format!("s={s} {m}={rate:.3}"));
        }
    }
    Outcome {
        pass,
        detail: format!("pareto sh=1 sub-null, each <= 0.02: {}", parts.join(" ")),
    }
}

fn c3() -> Outcome {
    let t = study(
        FamilySpec::loglogistic(5.0).unwrap(),
        vec![means_pair(2)],
        vec![Method::Bootstrap],
        300,
        500,
    );
    let (rate, se) = rate_of(&t, &WeightVector::sample_mean(2), &WeightVector::sample_mean(1), Method::Bootstrap);
    let tol = 0.05f64.max(3.0 * se);
    Outcome {
        pass: (rate - 0.956).abs() <= tol,
        detail: format!("loglogistic sh=5 s=2 power={rate:.3} se={se:.4}, target 0.956±{tol:.3}"),
    }
}

fn c4() -> Outcome {
    let t = study(
        FamilySpec::mixture(),
        vec![means_pair(2), means_pair(4)],
        vec![Method::Bootstrap],
        300,
        500,
    );
    let one = WeightVector::sample_mean(1);
    let (r2, se2) = rate_of(&t, &WeightVector::sample_mean(2), &one, Method::Bootstrap);
    let (r4, se4) = rate_of(&t, &WeightVector::sample_mean(4), &one, Method::Bootstrap);
    let tol2 = 0.06f64.max(3.0 * se2);
    let ok2 = (r2 - 0.520).abs() <= tol2;
    let ok4 = r4 <= 0.02f64.max(3.0 * se4);
    Outcome {
        pass: ok2 && ok4,
        detail: format!(
            "mixture s=2 power={r2:.3} se={se2:.4} target 0.520±{tol2:.3} [{}]; s=4 rate={r4:.3} <= 0.02 [{}]",
            if ok2 { "ok" } else { "miss" },
            if ok4 { "ok" } else { "miss" }
        ),
    }
}

fn c5() -> Outcome {
    let unbalanced = w(&[0.1, 0.1, 0.8]);
    let balanced = w(&[0.2, 0.3, 0.5]);
    let pairs = vec![
        WeightPair {
            theta: unbalanced.clone(),
            eta: balanced.clone(),
        },
        WeightPair {
            theta: balanced.clone(),
            eta: unbalanced.clone(),
        },
    ];
    let t = study(FamilySpec::loglogistic(1.0).unwrap(), pairs, vec![Method::Bootstrap], 200, 500);
    let (fwd, fse) = rate_of(&t, &unbalanced, &balanced, Method::Bootstrap);
    let (rev, rse) = rate_of(&t, &balanced, &unbalanced, Method::Bootstrap);
    let ok_f = fwd >= 1.0 - 0.05f64.max(3.0 * fse);
    let ok_r = rev <= 0.03f64.max(3.0 * rse);
    Outcome {
        pass: ok_f && ok_r,
        detail: format!(
            "loglogistic sh=1: H0 (0.1,0.1,0.8)X >=st (0.2,0.3,0.5)X rejects {fwd:.3} (>= 0.95); \
             H0 (0.2,0.3,0.5)X >=st (0.1,0.1,0.8)X rejects {rev:.3} (<= 0.03)"
        ),
    }
}

fn c6() -> Outcome {
    let pareto = FamilySpec::pareto(1.0).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = rng_from(seed);
        let sample = pareto.sample(50, &mut rng).unwrap();
        for s in [2, 3] {
            let theta = WeightVector::sample_mean(s);
            let exact = exact_combination_cdf(&sample, &theta).unwrap();
            let grid = grid_combination_cdf(&sample, &theta, &GridSpec::with_points(4096)).unwrap();
            let dev = grid
                .points()
                .iter()
                .map(|&x| (grid.eval(x) - exact.eval(x)).abs())
                .fold(0.0, f64::max);
            worst = worst.max(dev);
        }
    }
    let against_steps = {
        let mut rng = rng_from(0);
        let sample = pareto.sample(50, &mut rng).unwrap();
        let theta = WeightVector::sample_mean(3);
        let exact = exact_combination_cdf(&sample, &theta).unwrap();
        let grid = grid_combination_cdf(&sample, &theta, &GridSpec::with_points(4096)).unwrap();
        sup_abs_diff(&exact, &grid).0
    };
    Outcome {
        pass: worst <= 0.005,
        detail: format!(
            "exact vs grid, 20 seeds, s=2,3: max deviation at grid points {worst:.2e} (<= 0.005); \
             seed 0 s=3 over all jumps {against_steps:.2e}"
        ),
    }
}

fn c7() -> Outcome {
    let f = FamilySpec::st_petersburg();
    let grid = GridSpec::default();
    let one = parametric_combination_cdf(&f, &WeightVector::sample_mean(1), &grid).unwrap();
    let two = parametric_combination_cdf(&f, &WeightVector::sample_mean(2), &grid).unwrap();
    let three = parametric_combination_cdf(&f, &WeightVector::sample_mean(3), &grid).unwrap();
    let slack = two.truncation_slack + one.truncation_slack;
    let (t2, _) = sup_positive_diff(&two.cdf, &one.cdf);
    let (t3, at3) = sup_positive_diff(&three.cdf, &one.cdf);
    let ok2 = t2 <= 1e-9 + slack;
    let ok3 = t3 - three.truncation_slack >= 1e-3;
    Outcome {
        pass: ok2 && ok3,
        detail: format!("st petersburg K=40: s=2 positive part {t2:.2e} (<= 1e-9); s=3 positive part {t3:.4} at x={at3}"),
    }
}

fn c8() -> Outcome {
    let drawn = [
        (2, 1),
        (3, 2),
        (4, 2),
        (6, 4),
        (6, 3),
        (8, 4),
        (9, 3),
        (9, 6),
        (10, 5),
        (12, 4),
        (12, 6),
        (14, 7),
        (15, 10),
        (16, 8),
        (18, 9),
        (18, 12),
        (20, 10),
        (21, 14),
        (22, 11),
        (24, 16),
        (24, 12),
    ];
    let base = [DominanceEdge::new(2, 1).unwrap(), DominanceEdge::new(3, 2).unwrap()];
    let net = dominance_network(&base, 24).unwrap();
    let missing: Vec<String> = drawn
        .iter()
        .filter(|(a, b)| !net.contains(&DominanceEdge::new(*a, *b).unwrap()))
        .map(|(a, b)| format!("{a}->{b}"))
        .collect();
    Outcome {
        pass: missing.is_empty(),
        detail: format!(
            "{} drawn arrows, network has {} edges, missing [{}]",
            drawn.len(),
            net.len(),
            missing.join(" ")
        ),
    }
}

fn c9() -> Outcome {
    use Property::*;
    let expected: [(FamilySpec, &[(Property, bool)]); 3] = [
        (
            FamilySpec::pareto_at_zero(1.0).unwrap(),
            &[(ClassL, true), (InvertedConcave, true), (AntiStarshaped, true)],
        ),
        (
            FamilySpec::transformed_pareto(1.0, 2.0, 3.0).unwrap(),
            &[(ClassL, true), (InvertedConcave, false)],
        ),
        (
            FamilySpec::piecewise_example(),
            &[(ClassL, false), (InvertedConcave, false), (AntiStarshaped, true)],
        ),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (family, cells) in &expected {
        let reports = check_family(family, DEFAULT_TOLERANCE).unwrap();
        let holds = |p: Property| reports.iter().find(|r| r.property == p).unwrap();
        for &(p, want) in *cells {
            let r = holds(p);
            if r.holds != want {
                pass = false;
                notes.push(format!("{} {p}: expected {want}, got {} (violation {:.2e})", family.name(), r.holds, r.worst_violation));
            }
        }
        let (l, c, a, s) = (
            holds(ClassL).holds,
            holds(InvertedConcave).holds,
            holds(AntiStarshaped).holds,
            holds(Subadditive).holds,
        );
        if (c && !a) || (a && !s) || (c && !l) {
            pass = false;
            notes.push(format!("{} breaks the implication chain", family.name()));
        }
    }
    Outcome {
        pass,
        detail: if notes.is_empty() {
            "holds-pattern and implication chain as expected".into()
        } else {
            notes.join("; ")
        },
    }
}

fn c10() -> Outcome {
    let theta = WeightVector::sample_mean(2);
    let cauchy = FamilySpec::cauchy();
    let points = [0.0, 1.0];
    let est = empirical_process_covariance_matrix(&cauchy, &theta, &points, 2000, 5000, 7).unwrap();
    let spec = CovarianceSpec::new(cauchy, theta.clone()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut cross = 0.0f64;
    for i in 0..2 {
        for j in i..2 {
            let (x, y) = (points[i], points[j]);
            let formula = cauchy_covariance(&theta, x, y).unwrap();
            let general = total_covariance(&spec, x, y).unwrap();
            let mean_form = samplemean_covariance(&cauchy, 2, x, y).unwrap();
            cross = cross.max((general - formula).abs()).max((mean_form - formula).abs());
            let (mc, se) = (est.estimate[i][j], est.se[i][j]);
            let z = (mc - formula) / se;
            pass &= z.abs() <= 3.0;
            parts.push(format!("({x},{y}) formula={formula:.4} mc={mc:.4} z={z:.2}"));
        }
    }
    pass &= cross <= 1e-5;
    Outcome {
        pass,
        detail: format!("{}; cross-check gap {cross:.1e}", parts.join(" ")),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("C1", c1),
        ("C2", c2),
        ("C3", c3),
        ("C4", c4),
        ("C5", c5),
        ("C6", c6),
        ("C7", c7),
        ("C8", c8),
        ("C9", c9),
        ("C10", c10),
    ];
    let mut failed = Vec::new();
    for (id, run) in criteria {
        if !args.is_empty() && !args.iter().any(|a| a.eq_ignore_ascii_case(id)) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("{id} {verdict} [{:.1}s] {}", start.elapsed().as_secs_f64(), out.detail);
        if !out.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(" "));
        ExitCode::FAILURE
    }
}
