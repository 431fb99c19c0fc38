//! Limiting covariance of the plug-in process against a Monte Carlo oracle.

use sdcomb::asymptotics::{cauchy_covariance, empirical_process_covariance, total_covariance, CovarianceSpec};
use sdcomb::{FamilySpec, WeightVector};

fn main() -> sdcomb::Result<()> {
    let theta = WeightVector::sample_mean(2);
    for (x, y) in [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        let formula = cauchy_covariance(&theta, x, y)?;
        let (mc, se) = empirical_process_covariance(&FamilySpec::cauchy(), &theta, x, y, 1000, 2000, 1)?;
        println!("cauchy ({x},{y}): formula {formula:.4}, monte carlo {mc:.4} ± {se:.4}");
    }

    let spec = CovarianceSpec::new(FamilySpec::pareto(2.0)?, WeightVector::new(vec![0.3, 0.7])?)?;
    println!("pareto(2), θ=(0.3,0.7), (2,3): {:.5}", total_covariance(&spec, 2.0, 3.0)?);
    Ok(())
}
