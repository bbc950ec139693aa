//! Schwarz symmetrization: the radially symmetric decreasing rearrangement of `|u|`.

use std::cmp::Ordering;

use super::field::{RadialProfile, WaveField};
use super::grid::{radius_of_measure, RadialGrid};
use super::quadrature::MonotoneCubic;
use crate::error::Result;

/// Relative tolerance under which sorted samples count as one level set.
const TIE_TOL: f64 = 1e-12;

/// Radially symmetric decreasing rearrangement of `|field|`.
///
/// Sorted magnitudes fill concentric shells of equal cell measure. Samples
/// that tie (up to a relative `1e-12`) share one shell and are placed at its
/// measure midpoint. The shell radii and values are joined by a monotone
/// cubic (flat at the origin) and sampled on a radial grid reaching
/// the equal-measure radius of the box.
pub fn schwarz_rearrange(field: &WaveField) -> Result<RadialProfile> {
    field.ensure_finite()?;
    let grid = &field.grid;
    let dim = grid.dim();
    let cell = grid.cell_volume();

    let mut mags: Vec<f64> = field.values.iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let top = mags[0];
    let tol = TIE_TOL * top;

    let mut radii = Vec::new();
    let mut levels = Vec::new();
    let mut covered = 0.0;
    let mut start = 0;
    while start < mags.len() {
        let lead = mags[start];
        let mut end = start + 1;
        while end < mags.len() && lead - mags[end] <= tol {
            end += 1;
        }
        let count = (end - start) as f64;
        let mean = mags[start..end].iter().sum::<f64>() / count;
        // In 1-D the top level sits at the origin: f* is flat in measure there,
        // so this is exact for even samples and second order otherwise.
        let r = if start == 0 && dim == 1 {
            0.0
        } else {
            radius_of_measure(dim, covered + 0.5 * count * cell)
        };
        radii.push(r);
        levels.push(mean);
        covered += count * cell;
        start = end;
    }

    // extend to the origin with the even quadratic through the first two shells
    if radii[0] > 0.0 && radii.len() > 1 {
        let c2 = (levels[1] - levels[0]) / (radii[1] * radii[1] - radii[0] * radii[0]);
        radii.insert(0, 0.0);
        levels.insert(0, levels[0] - c2 * radii[1] * radii[1]);
    }

    let per_axis = if dim == 1 { 8 } else { 32 };
    let out_grid = RadialGrid::new(grid.equal_measure_radius(), per_axis * grid.points_per_axis() + 1)?;
    let curve = MonotoneCubic::new(radii, levels, true);
    RadialProfile::from_fn(out_grid, dim, |r| curve.eval(r))
}
