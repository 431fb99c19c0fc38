//! Grid checks for the shape classes that guarantee ordering of weighted sums.
//!
//! All checks work through the inverted CDF `H(x) = 1 - F(1/x)` or, for
//! class 𝓛, the function `V(z) = F(x + yz) + F(x + y/z)`. A check "holds"
//! when no violation above the tolerance shows up on the grid; it is a
//! falsification test, not a proof.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::distributions::FamilySpec;
use crate::error::{Error, Result};
use crate::Cdf;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Caps the number of evaluations in the subadditivity check.
pub const SUBADDITIVE_MAX_EVALS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    ClassL,
    InvertedConcave,
    AntiStarshaped,
    Subadditive,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::ClassL,
        Property::InvertedConcave,
        Property::AntiStarshaped,
        Property::Subadditive,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::ClassL => "classL",
            Property::InvertedConcave => "invertedConcave",
            Property::AntiStarshaped => "antiStarshaped",
            Property::Subadditive => "subadditive",
        })
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match norm.as_str() {
            "classl" | "l" => Ok(Property::ClassL),
            "invertedconcave" | "concave" => Ok(Property::InvertedConcave),
            "antistarshaped" => Ok(Property::AntiStarshaped),
            "subadditive" => Ok(Property::Subadditive),
            _ => Err(Error::Parse {
                what: "property",
                input: s.to_string(),
                reason: "expected classL, invertedConcave, antiStarshaped or subadditive".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub property: Property,
    pub holds: bool,
    pub worst_violation: f64,
    /// `(x, y, z)` for class 𝓛, `(u, v)` for concavity, `(x, λ)` for
    /// anti-starshapedness, `(x, y)` for subadditivity.
    pub witness: Vec<f64>,
    pub tolerance: f64,
}

impl ShapeReport {
    fn new(property: Property, worst: f64, witness: Vec<f64>, tolerance: f64) -> Self {
        let worst = worst.max(0.0);
        ShapeReport {
            property,
            holds: worst <= tolerance,
            worst_violation: worst,
            witness,
            tolerance,
        }
    }

    pub fn key_values(&self) -> String {
        let w: Vec<String> = self.witness.iter().map(|v| v.to_string()).collect();
        format!(
            "property={}\nholds={}\nworst_violation={:e}\nwitness={}\ntolerance={:e}\n",
            self.property,
            self.holds,
            self.worst_violation,
            w.join(","),
            self.tolerance
        )
    }
}

/// Probe points for the shape checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeGrid {
    /// `x` values for class 𝓛.
    pub x: Vec<f64>,
    pub y_points: usize,
    pub z_points: usize,
    /// Smallest `z` on the class 𝓛 grid.
    pub z_min: f64,
    /// Log-spaced range for the arguments of `H`.
    pub h_range: (f64, f64),
    pub h_points: usize,
    pub lambda_points: usize,
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

impl ShapeGrid {
    /// `x` on 64 quantile levels from 0.01 to 0.999 of the family, and `H`
    /// probed over the reciprocals of its central quantiles, clipped to
    /// `[1e-6, 1e6]`.
    pub fn for_family(family: &FamilySpec) -> Result<Self> {
        let x: Vec<f64> = (0..64)
            .map(|i| family.quantile(0.01 + 0.989 * i as f64 / 63.0))
            .collect::<Result<_>>()?;
        let q_lo = family.quantile(1e-3)?;
        let q_hi = family.quantile(1.0 - 1e-3)?;
        let hi = if q_lo > 0.0 { (1.0 / q_lo).min(1e6) } else { 1e6 };
        let lo = if q_hi > 0.0 { (1.0 / q_hi).max(1e-6) } else { 1e-6 };
        Ok(ShapeGrid::with_ranges(x, (lo.min(hi / 10.0), hi)))
    }

    /// Class 𝓛 `x` values log-spaced over `x_range`, `H` over `h_range`.
    pub fn for_ranges(x_range: (f64, f64), h_range: (f64, f64)) -> Result<Self> {
        let ok = |(a, b): (f64, f64)| a > 0.0 && b > a && b.is_finite();
        if !ok(x_range) || !ok(h_range) {
            return Err(Error::ParameterDomain(format!(
                "ranges must satisfy 0 < lo < hi, got {x_range:?} and {h_range:?}"
            )));
        }
        Ok(ShapeGrid::with_ranges(log_space(x_range.0, x_range.1, 64), h_range))
    }

    fn with_ranges(x: Vec<f64>, h_range: (f64, f64)) -> Self {
        ShapeGrid {
            x,
            y_points: 32,
            z_points: 64,
            z_min: 1e-3,
            h_range,
            h_points: 512,
            lambda_points: 64,
        }
    }

    fn h_grid(&self) -> Vec<f64> {
        log_space(self.h_range.0, self.h_range.1, self.h_points)
    }
}

fn precondition<F: Cdf + ?Sized>(f: &F, tol: f64) -> Result<()> {
    let at0 = f.cdf(0.0);
    if at0 > tol {
        return Err(Error::Precondition(format!("F(0) = {at0} but the classes need F(0) = 0")));
    }
    Ok(())
}

fn inverted<F: Cdf + ?Sized>(f: &F) -> impl Fn(f64) -> f64 + '_ {
    move |x: f64| 1.0 - f.cdf(1.0 / x)
}

/// Largest violation and its witness, reduced in a fixed order.
fn worst_of(items: impl ParallelIterator<Item = (f64, Vec<f64>)>) -> (f64, Vec<f64>) {
    items
        .reduce(
            || (f64::NEG_INFINITY, Vec::new()),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        )
}

/// Checks that `V(z) = F(x + yz) + F(x + y/z)` is nonincreasing in
/// `z ∈ (0, 1]` for `0 ≤ y ≤ x`. The violation is the largest increase of
/// `V` between neighbouring `z` values.
pub fn check_class_l<F: Cdf + Sync + ?Sized>(f: &F, grid: &ShapeGrid, tol: f64) -> Result<ShapeReport> {
    precondition(f, tol)?;
    let z = log_space(1.0, grid.z_min, grid.z_points);
    let ny = grid.y_points.max(2);
    let (worst, witness) = worst_of(grid.x.par_iter().map(|&x| {
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for j in 0..ny {
            let y = x * j as f64 / (ny - 1) as f64;
            let v = |z: f64| f.cdf(x + y * z) + f.cdf(x + y / z);
            let mut hi_z = v(z[0]);
            for k in 1..z.len() {
                let lo_z = v(z[k]);
                let d = hi_z - lo_z;
                if d > best.0 {
                    best = (d, vec![x, y, z[k - 1]]);
                }
                hi_z = lo_z;
            }
        }
        best
    }));
    Ok(ShapeReport::new(Property::ClassL, worst, witness, tol))
}

/// Midpoint concavity of `H`: `H((u+v)/2) ≥ (H(u) + H(v))/2`.
pub fn check_inverted_concavity<F: Cdf + Sync + ?Sized>(f: &F, grid: &ShapeGrid, tol: f64) -> Result<ShapeReport> {
    precondition(f, tol)?;
    let h = inverted(f);
    let pts = grid.h_grid();
    let hv: Vec<f64> = pts.iter().map(|&u| h(u)).collect();
    let (worst, witness) = worst_of((0..pts.len()).into_par_iter().map(|i| {
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for j in i + 1..pts.len() {
            let d = 0.5 * (hv[i] + hv[j]) - h(0.5 * (pts[i] + pts[j]));
            if d > best.0 {
                best = (d, vec![pts[i], pts[j]]);
            }
        }
        best
    }));
    Ok(ShapeReport::new(Property::InvertedConcave, worst, witness, tol))
}

/// `H(λx) ≥ λH(x)` for `λ ∈ (0, 1)`.
pub fn check_anti_starshaped<F: Cdf + Sync + ?Sized>(f: &F, grid: &ShapeGrid, tol: f64) -> Result<ShapeReport> {
    precondition(f, tol)?;
    let h = inverted(f);
    let pts = grid.h_grid();
    let nl = grid.lambda_points;
    let (worst, witness) = worst_of(pts.par_iter().map(|&x| {
        let hx = h(x);
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for k in 1..=nl {
            let lambda = k as f64 / (nl + 1) as f64;
            let d = lambda * hx - h(lambda * x);
            if d > best.0 {
                best = (d, vec![x, lambda]);
            }
        }
        best
    }));
    Ok(ShapeReport::new(Property::AntiStarshaped, worst, witness, tol))
}

/// `H(x + y) ≤ H(x) + H(y)`.
pub fn check_subadditive<F: Cdf + Sync + ?Sized>(f: &F, grid: &ShapeGrid, tol: f64) -> Result<ShapeReport> {
    precondition(f, tol)?;
    let h = inverted(f);
    let side = grid.h_points.min((SUBADDITIVE_MAX_EVALS as f64).sqrt() as usize);
    let pts = log_space(grid.h_range.0, grid.h_range.1, side);
    let hv: Vec<f64> = pts.iter().map(|&u| h(u)).collect();
    let (worst, witness) = worst_of((0..pts.len()).into_par_iter().map(|i| {
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for j in i..pts.len() {
            let d = h(pts[i] + pts[j]) - hv[i] - hv[j];
            if d > best.0 {
                best = (d, vec![pts[i], pts[j]]);
            }
        }
        best
    }));
    Ok(ShapeReport::new(Property::Subadditive, worst, witness, tol))
}

pub fn check<F: Cdf + Sync + ?Sized>(
    property: Property,
    f: &F,
    grid: &ShapeGrid,
    tol: f64,
) -> Result<ShapeReport> {
    match property {
        Property::ClassL => check_class_l(f, grid, tol),
        Property::InvertedConcave => check_inverted_concavity(f, grid, tol),
        Property::AntiStarshaped => check_anti_starshaped(f, grid, tol),
        Property::Subadditive => check_subadditive(f, grid, tol),
    }
}

/// All four reports for a family, on its default grid.
pub fn check_family(family: &FamilySpec, tol: f64) -> Result<Vec<ShapeReport>> {
    let grid = ShapeGrid::for_family(family)?;
    Property::ALL
        .iter()
        .map(|&p| check(p, family, &grid, tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn holds(f: &FamilySpec) -> Vec<bool> {
        check_family(f, DEFAULT_TOLERANCE).unwrap().iter().map(|r| r.holds).collect()
    }

    #[test]
    fn lomax_is_in_every_class() {
        assert_eq!(holds(&FamilySpec::pareto_at_zero(1.0).unwrap()), vec![true; 4]);
    }

    #[test]
    fn piecewise_example_is_anti_starshaped_only() {
        let f = FamilySpec::piecewise_example();
        assert_eq!(holds(&f), vec![false, false, true, true]);
    }

    #[test]
    fn transformed_pareto_is_not_inverted_concave() {
        let f = FamilySpec::transformed_pareto(1.0, 2.0, 3.0).unwrap();
        let grid = ShapeGrid::for_family(&f).unwrap();
        let r = check_inverted_concavity(&f, &grid, DEFAULT_TOLERANCE).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn convex_inverse_fails_anti_starshaped() {
        // Pareto(2) has H(x) = x^2 on [0, 1]
        let f = FamilySpec::pareto(2.0).unwrap();
        let grid = ShapeGrid::for_ranges((1.0, 30.0), (0.01, 1.0)).unwrap();
        let a = check_anti_starshaped(&f, &grid, DEFAULT_TOLERANCE).unwrap();
        assert!(!a.holds);
        assert!((a.worst_violation - 0.25).abs() < 5e-3, "{}", a.worst_violation);
        assert!(!check_subadditive(&f, &grid, DEFAULT_TOLERANCE).unwrap().holds);
    }

    #[test]
    fn chain_of_implications() {
        let corpus = [
            FamilySpec::pareto_at_zero(1.0).unwrap(),
            FamilySpec::pareto_at_zero(0.5).unwrap(),
            FamilySpec::transformed_pareto(1.0, 2.0, 3.0).unwrap(),
            FamilySpec::piecewise_example(),
            FamilySpec::pareto(1.0).unwrap(),
            FamilySpec::pareto(2.0).unwrap(),
            FamilySpec::loglogistic(1.0).unwrap(),
            FamilySpec::frechet(1.0).unwrap(),
        ];
        for f in corpus {
            let h = holds(&f);
            let (l, c, a, s) = (h[0], h[1], h[2], h[3]);
            assert!(!c || a, "{f}");
            assert!(!a || s, "{f}");
            assert!(!c || l, "{f}");
        }
    }

    #[test]
    fn mass_at_zero_is_rejected() {
        let grid = ShapeGrid::for_family(&FamilySpec::cauchy()).unwrap();
        for p in Property::ALL {
            assert!(matches!(check(p, &FamilySpec::cauchy(), &grid, DEFAULT_TOLERANCE), Err(Error::Precondition(_))));
        }
    }

    #[test]
    fn closures_are_accepted() {
        let f = |x: f64| if x <= 0.0 { 0.0 } else { x / (1.0 + x) };
        let grid = ShapeGrid::for_ranges((0.01, 100.0), (0.01, 100.0)).unwrap();
        assert!(check_class_l(&f, &grid, DEFAULT_TOLERANCE).unwrap().holds);
    }

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.to_string().parse::<Property>().unwrap(), p);
        }
        assert_eq!("inverted-concave".parse::<Property>().unwrap(), Property::InvertedConcave);
        assert!("convex".parse::<Property>().is_err());
    }
}
