//! Grid checks of class 𝓛 and of the inverted-CDF shape properties.

use sdcomb::shapeclass::{check, check_family, Property, ShapeGrid, DEFAULT_TOLERANCE};
use sdcomb::FamilySpec;

fn main() -> sdcomb::Result<()> {
    let corpus = [
        FamilySpec::pareto_at_zero(1.0)?,
        FamilySpec::transformed_pareto(1.0, 2.0, 3.0)?,
        FamilySpec::piecewise_example(),
        FamilySpec::pareto(2.0)?,
    ];
    for f in &corpus {
        println!("{f}");
        for r in check_family(f, DEFAULT_TOLERANCE)? {
            println!("  {:<16} holds={:<5} worst={:.2e} at {:?}", r.property, r.holds, r.worst_violation, r.witness);
        }
    }

    // any closure works as a CDF
    let lomax = |x: f64| if x <= 0.0 { 0.0 } else { x / (1.0 + x) };
    let grid = ShapeGrid::for_ranges((0.01, 100.0), (0.01, 100.0))?;
    let r = check(Property::Subadditive, &lomax, &grid, DEFAULT_TOLERANCE)?;
    println!("closure subadditive: {}", r.holds);
    Ok(())
}
