//! Plug-in CDFs of weighted sums from one Pareto sample: exact enumeration,
//! the grid recursion, and the parametric reference.

use sdcomb::combine::{exact_combination_cdf, grid_combination_cdf, parametric_combination_cdf};
use sdcomb::seed::rng_from;
use sdcomb::{FamilySpec, GridSpec, WeightVector};

fn main() -> sdcomb::Result<()> {
    let family = FamilySpec::pareto(1.5)?;
    let sample = family.sample(200, &mut rng_from(11))?;
    let theta = WeightVector::new(vec![0.3, 0.7])?;

    let exact = exact_combination_cdf(&sample, &theta)?;
    let grid = grid_combination_cdf(&sample, &theta, &GridSpec::with_points(2048))?;
    let truth = parametric_combination_cdf(&family, &theta, &GridSpec::default())?;

    println!("x,exact,grid,population");
    for x in [1.2, 1.5, 2.0, 3.0, 5.0, 10.0] {
        println!("{x},{:.4},{:.4},{:.4}", exact.eval(x), grid.eval(x), truth.eval(x));
    }

    // three summands: n^3 tuples is still cheap here, but the grid is what
    // larger s falls back to
    let mean3 = WeightVector::sample_mean(3);
    let g3 = grid_combination_cdf(&sample, &mean3, &GridSpec::with_points(4096))?;
    println!("P(mean of 3 <= 2) ~ {:.4} on {} points", g3.eval(2.0), g3.points().len());
    Ok(())
}
