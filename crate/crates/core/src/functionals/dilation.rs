//! The mass-preserving dilation `𝒫(β,ψ)(x) = β^{N/2} ψ(βx)`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numerics::{CartesianGrid, RadialProfile, Spectral, WaveField};

/// Largest mass fraction allowed to fall outside the box.
pub const DILATION_LEAK_TOL: f64 = 1e-12;

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!("dilation factor {beta} must be positive")));
    }
    Ok(())
}

/// Dilation of a radial profile: the grid is compressed by `β`.
pub fn dilate_profile(beta: f64, profile: &RadialProfile) -> Result<RadialProfile> {
    check_beta(beta)?;
    let amp = beta.powf(profile.dim as f64 / 2.0);
    RadialProfile::new(
        profile.grid.scaled(1.0 / beta)?,
        profile.values.iter().map(|v| amp * v).collect(),
        profile.dim,
    )
}

/// Dilation of a Cartesian field by trigonometric interpolation at `βx`.
///
/// For `β < 1` the part of `ψ` outside `[-βL, βL]^N` is pushed out of the box;
/// its mass fraction must stay below `1e-12`.
pub fn dilate_field(beta: f64, field: &WaveField) -> Result<WaveField> {
    check_beta(beta)?;
    field.ensure_finite()?;
    if beta == 1.0 {
        return Ok(field.clone());
    }
    let grid = field.grid;
    if beta < 1.0 {
        let leak = mass_outside_cube(field, beta * grid.half_width());
        if leak > DILATION_LEAK_TOL {
            return Err(Error::BoundaryLeakage { fraction: leak });
        }
    }

    let n = grid.points_per_axis();
    let spectral = Spectral::new(&grid);
    let mut coeffs = field.values.clone();
    spectral.forward(&mut coeffs);
    let scale = 1.0 / n as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);

    let axis = grid.axis();
    let targets: Vec<f64> = axis.iter().map(|x| beta * x).collect();
    let basis = Basis::new(&grid, &targets);
    let amp = beta.powf(grid.dim() as f64 / 2.0);

    let values = match grid.dim() {
        1 => basis.apply(&coeffs).into_iter().map(|v| v * amp).collect(),
        _ => {
            // coefficients are per-axis DFTs already divided by n once; divide again
            coeffs.iter_mut().for_each(|c| *c *= scale);
            // rows first: each row of coefficients evaluated along the second axis
            let mut half = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                let row = basis.apply(&coeffs[i * n..(i + 1) * n]);
                half[i * n..(i + 1) * n].copy_from_slice(&row);
            }
            let mut out = vec![Complex64::new(0.0, 0.0); n * n];
            let mut column = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    column[i] = half[i * n + j];
                }
                let vals = basis.apply(&column);
                for i in 0..n {
                    out[i * n + j] = vals[i] * amp;
                }
            }
            out
        }
    };
    WaveField::new(grid, values, field.time, field.params)
}

/// Evaluates a 1-D trigonometric interpolant with symmetric wavenumbers.
struct Basis {
    /// `e^{i dk (y + L)}` per target point (zero outside the box).
    steps: Vec<Option<Complex64>>,
    n: usize,
}

impl Basis {
    fn new(grid: &CartesianGrid, targets: &[f64]) -> Self {
        let l = grid.half_width();
        let dk = std::f64::consts::PI / l;
        let steps = targets
            .iter()
            .map(|&y| (y.abs() < l).then(|| Complex64::from_polar(1.0, dk * (y + l))))
            .collect();
        Basis {
            steps,
            n: grid.points_per_axis(),
        }
    }

    fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let half = n / 2;
        self.steps
            .iter()
            .map(|step| {
                let Some(z) = step else {
                    return Complex64::new(0.0, 0.0);
                };
                // positive modes 0..n/2 and negative modes -1..-(n/2-1); Nyquist dropped
                let mut acc = coeffs[0];
                let mut up = Complex64::new(1.0, 0.0);
                let zc = z.conj();
                let mut down = Complex64::new(1.0, 0.0);
                for m in 1..half {
                    up *= z;
                    down *= zc;
                    acc += coeffs[m] * up + coeffs[n - m] * down;
                }
                acc
            })
            .collect()
    }
}

fn mass_outside_cube(field: &WaveField, half: f64) -> f64 {
    let grid = field.grid;
    let axis = grid.axis();
    let n = grid.points_per_axis();
    let inside = |i: usize| axis[i].abs() < half;
    let mut total = 0.0;
    let mut out = 0.0;
    for (idx, v) in field.values.iter().enumerate() {
        let d = v.norm_sqr();
        total += d;
        let keep = match grid.dim() {
            1 => inside(idx),
            _ => inside(idx / n) && inside(idx % n),
        };
        if !keep {
            out += d;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        out / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{field_norms, RadialGrid};
    use crate::params::ModelParams;

    fn gauss(dim: usize, n: usize) -> WaveField {
        let p = ModelParams::unit(dim, 2.0).unwrap();
        let g = CartesianGrid::new(dim, 16.0, n).unwrap();
        WaveField::from_real_fn(g, p, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            (-r2 / 2.0).exp() * (1.0 + 0.2 * x[0])
        })
        .unwrap()
    }

    #[test]
    fn unit_factor_is_identity() {
        let f = gauss(1, 256);
        assert_eq!(dilate_field(1.0, &f).unwrap().values, f.values);
    }

    #[test]
    fn matches_direct_sampling() {
        for dim in [1, 2] {
            let f = gauss(dim, if dim == 1 { 512 } else { 128 });
            for beta in [0.6, 1.7] {
                let d = dilate_field(beta, &f).unwrap();
                let amp = beta.powf(dim as f64 / 2.0);
                let exact = WaveField::from_real_fn(f.grid, f.params, |x| {
                    let r2: f64 = x.iter().map(|c| c * c * beta * beta).sum();
                    amp * (-r2 / 2.0).exp() * (1.0 + 0.2 * beta * x[0])
                })
                .unwrap();
                assert!(d.sup_distance(&exact) < 1e-10, "dim {dim} β {beta}");
            }
        }
    }

    #[test]
    fn preserves_mass() {
        let f = gauss(1, 1024);
        let m0 = field_norms(&f, &[], false).unwrap().mass;
        for beta in [0.5, 0.8, 1.3, 2.0, 3.0] {
            let m = field_norms(&dilate_field(beta, &f).unwrap(), &[], false).unwrap().mass;
            assert!((m / m0 - 1.0).abs() < 1e-10, "β {beta}");
        }
    }

    #[test]
    fn wide_field_leaks() {
        let f = gauss(1, 256);
        assert!(matches!(dilate_field(0.2, &f), Err(Error::BoundaryLeakage { .. })));
        assert!(dilate_field(-1.0, &f).is_err());
    }

    #[test]
    fn profile_dilation_rescales_grid() {
        let p = RadialProfile::from_fn(RadialGrid::new(10.0, 101).unwrap(), 2, |r| (-r).exp()).unwrap();
        let d = dilate_profile(2.0, &p).unwrap();
        assert!((d.grid.r_max() - 5.0).abs() < 1e-12);
        assert!((d.values[0] - 2.0).abs() < 1e-12);
    }
}
