//! Both tests of H0: θ·X ≥st η·X on a log-logistic sample, where the null is
//! false for shape above one.

use sdcomb::empirical::parse_sample;
use sdcomb::sdtest::run_test;
use sdcomb::seed::rng_from;
use sdcomb::{FamilySpec, GridSpec, Method, TestConfig, WeightVector};

fn main() -> sdcomb::Result<()> {
    let sample = FamilySpec::loglogistic(5.0)?.sample(300, &mut rng_from(3))?;
    let theta = WeightVector::sample_mean(2);
    let eta = WeightVector::sample_mean(1);

    for method in [Method::Bootstrap, Method::Cauchy] {
        let cfg = TestConfig {
            method,
            reps: 300,
            seed: 5,
            grid: GridSpec::with_points(2048),
            ..TestConfig::default()
        };
        let r = run_test(&sample, &theta, &eta, &cfg)?;
        println!(
            "{method}: sqrt(n)T={:.3} c={:.3} p={:.3} reject={} witness={:.3}",
            r.scaled_statistic, r.critical_value, r.p_value, r.reject, r.witness
        );
    }

    // samples can also come from text, one value per line
    let small = parse_sample("# toy data\n0\n1\n")?;
    let cfg = TestConfig {
        reps: 200,
        ..TestConfig::default()
    };
    let r = run_test(&small, &theta, &eta, &cfg)?;
    println!("toy: T={} at x={}", r.statistic, r.witness);
    Ok(())
}
