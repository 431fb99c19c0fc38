use super::{monotone_clamp, CombinationCdf, GridSpec, WeightVector};
use crate::empirical::Sample;
use crate::error::{Error, Result};

/// Reusable buffers for [`grid_levels`].
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    scaled: Vec<f64>,
    prev: Vec<f64>,
}

/// CDF of `θ·X` at every grid point for atoms `values` (sorted) with masses
/// `weights` and cumulative masses `prefix` (`prefix.len() == n + 1`).
///
/// The first two summands are combined exactly at the grid points; later
/// summands integrate the linear interpolant of the previous level.
pub(crate) fn grid_levels(
    values: &[f64],
    weights: &[f64],
    prefix: &[f64],
    theta: &[f64],
    grid: &[f64],
    out: &mut Vec<f64>,
    scratch: &mut Scratch,
) {
    let n = values.len();
    let p_len = grid.len();
    out.clear();
    out.resize(p_len, 0.0);
    let t1 = theta[0];
    scratch.scaled.clear();
    scratch.scaled.extend(values.iter().map(|v| t1 * v));
    let scaled = &scratch.scaled;

    if theta.len() == 1 {
        let mut j = 0;
        for (p, g) in grid.iter().enumerate() {
            while j < n && scaled[j] <= *g {
                j += 1;
            }
            out[p] = prefix[j];
        }
        monotone_clamp(out);
        return;
    }

    let t2 = theta[1];
    for (vi, wi) in values.iter().zip(weights) {
        if *wi <= 0.0 {
            continue;
        }
        let shift = t2 * vi;
        let mut j = 0;
        for (p, g) in grid.iter().enumerate() {
            while j < n && scaled[j] + shift <= *g {
                j += 1;
            }
            out[p] += wi * prefix[j];
        }
    }

    let lo = grid[0];
    let hi = grid[p_len - 1];
    for &tk in &theta[2..] {
        std::mem::swap(out, &mut scratch.prev);
        out.clear();
        out.resize(p_len, 0.0);
        let prev = &scratch.prev;
        for (vi, wi) in values.iter().zip(weights) {
            if *wi <= 0.0 {
                continue;
            }
            let shift = tk * vi;
            let mut q = 0;
            for (p, g) in grid.iter().enumerate() {
                let y = g - shift;
                let f = if y < lo {
                    0.0
                } else if y >= hi {
                    1.0
                } else {
                    while grid[q + 1] <= y {
                        q += 1;
                    }
                    let t = (y - grid[q]) / (grid[q + 1] - grid[q]);
                    prev[q] + t * (prev[q + 1] - prev[q])
                };
                out[p] += wi * f;
            }
        }
    }
    monotone_clamp(out);
}

/// Grid CDF of `θ·X` under the sample's weighted empirical law.
///
/// Fails with a range error when a fixed grid range misses part of the
/// reachable support.
pub fn grid_combination_cdf(
    sample: &Sample,
    theta: &WeightVector,
    grid: &GridSpec,
) -> Result<CombinationCdf> {
    let points = grid.build(sample, &[theta])?;
    Ok(grid_on(sample, theta, points))
}

/// Grid CDF of `θ·X` on caller-supplied increasing `points`.
pub fn grid_combination_cdf_on(
    sample: &Sample,
    theta: &WeightVector,
    points: Vec<f64>,
) -> Result<CombinationCdf> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::ParameterDomain(
            "grid points must be strictly increasing, at least 2".into(),
        ));
    }
    let (need_lo, need_hi) = theta.partial_support(sample.min(), sample.max());
    let (lo, hi) = (points[0], points[points.len() - 1]);
    if lo > need_lo || hi < need_hi {
        return Err(Error::Range {
            lo,
            hi,
            need_lo,
            need_hi,
        });
    }
    Ok(grid_on(sample, theta, points))
}

fn grid_on(sample: &Sample, theta: &WeightVector, points: Vec<f64>) -> CombinationCdf {
    let mut values = Vec::new();
    grid_levels(
        sample.values(),
        sample.weights(),
        sample.prefix(),
        theta.as_slice(),
        &points,
        &mut values,
        &mut Scratch::default(),
    );
    CombinationCdf::GridValues {
        grid: points,
        values,
    }
}
