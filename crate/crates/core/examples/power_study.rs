//! A small power study read from TOML, written out as CSV.

use sdcomb::simharness::{run_power_study, ScenarioConfig};

const SCENARIO: &str = r#"
families = ["loglogistic(sh=3)", "pareto(sh=1)"]
n = [100]
methods = ["bootstrap", "cauchy"]
replications = 50
reps = 200
seed = 9
grid_points = 1024

[[pairs]]
theta = "1/2,1/2"
eta = "1"
"#;

fn main() -> sdcomb::Result<()> {
    let cfg = ScenarioConfig::from_toml(SCENARIO)?;
    let table = run_power_study(&cfg)?;
    print!("{}", table.to_csv());
    Ok(())
}
