use num_complex::Complex64;

use super::{is_positive_decreasing, GroundState, Method};
use crate::error::{invalid, Error, Result};
use crate::numerics::{field_norms, schwarz_rearrange, CartesianGrid, Spectral, WaveField};
use crate::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointOptions {
    /// Stop when successive iterates differ by less than this (scaled by `max(1, peak)`).
    pub tol: f64,
    pub max_iter: usize,
    /// Largest admissible `|Φ|` on the box edge relative to the peak.
    pub edge_tol: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tol: 1e-12,
            max_iter: 10_000,
            edge_tol: 1e-8,
        }
    }
}

/// Stabilized spectral fixed-point iteration
/// `Φ ← S^θ (ω-Δ)^{-1}[λ|Φ|^α Φ]`, `S = ⟨(ω-Δ)Φ,Φ⟩ / ⟨λ|Φ|^αΦ,Φ⟩`, `θ = (α+1)/α`,
/// started from a Gaussian and radialized by Schwarz symmetrization.
pub fn solve_fixed_point(params: &ModelParams, grid: &CartesianGrid, opts: FixedPointOptions) -> Result<GroundState> {
    params.validate()?;
    if params.dim != grid.dim() {
        return Err(invalid(format!(
            "params dimension {} does not match grid dimension {}",
            params.dim,
            grid.dim()
        )));
    }
    let ModelParams { alpha, lambda, omega, .. } = *params;
    let theta = (alpha + 1.0) / alpha;
    let spectral = Spectral::new(grid);
    let symbol: Vec<f64> = grid.k_squared().iter().map(|k2| omega + k2).collect();
    let cell = grid.cell_volume();
    let total = grid.len() as f64;

    let amp0 = (omega * (alpha + 2.0) / (2.0 * lambda)).powf(1.0 / alpha);
    let start = WaveField::from_real_fn(*grid, *params, |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        amp0 * (-0.5 * omega * r2).exp()
    })?;
    let mut u: Vec<f64> = start.values.iter().map(|v| v.re).collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];

    let mut converged = false;
    for _ in 0..opts.max_iter {
        for (b, &v) in buf.iter_mut().zip(&u) {
            *b = Complex64::new(v, 0.0);
        }
        spectral.forward(&mut buf);
        let linear: f64 = symbol.iter().zip(&buf).map(|(m, h)| m * h.norm_sqr()).sum::<f64>() * cell / total;

        let nonlinear: Vec<f64> = u.iter().map(|&v| lambda * v.abs().powf(alpha) * v).collect();
        let pairing: f64 = nonlinear.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() * cell;
        if !(pairing > 0.0) {
            return Err(Error::ConvergenceFailure("fixed-point iterate collapsed to zero".into()));
        }
        let factor = (linear / pairing).powf(theta);

        for (b, &v) in buf.iter_mut().zip(&nonlinear) {
            *b = Complex64::new(v, 0.0);
        }
        spectral.forward(&mut buf);
        for (b, m) in buf.iter_mut().zip(&symbol) {
            *b *= factor / m;
        }
        spectral.inverse(&mut buf);

        let mut diff = 0.0_f64;
        let mut peak = 0.0_f64;
        for (old, new) in u.iter_mut().zip(&buf) {
            diff = diff.max((new.re - *old).abs());
            peak = peak.max(new.re.abs());
            *old = new.re;
        }
        if !diff.is_finite() {
            return Err(Error::ConvergenceFailure("fixed-point iteration diverged".into()));
        }
        if diff < opts.tol * peak.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(format!(
            "fixed-point iteration did not converge in {} iterations",
            opts.max_iter
        )));
    }

    let field = WaveField::new(
        *grid,
        u.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        0.0,
        *params,
    )?;
    let peak = field.max_abs();
    let edge = edge_amplitude(&field) / peak;
    if edge > opts.edge_tol {
        return Err(Error::BoundaryLeakage { fraction: edge });
    }

    let residual_linf = spectral_residual(&field, &spectral, &symbol);
    let norms = field_norms(&field, &[alpha + 2.0], false)?;
    let profile = schwarz_rearrange(&field)?;
    if !is_positive_decreasing(&profile.values, 1e-10) {
        return Err(Error::ConvergenceFailure(
            "fixed-point profile is not positive and decreasing".into(),
        ));
    }
    Ok(GroundState {
        profile,
        params: *params,
        norms,
        method: Method::FixedPoint,
        residual_linf,
        field: Some(field),
    })
}

fn edge_amplitude(field: &WaveField) -> f64 {
    let mask = field.grid.boundary_mask(0.0);
    field
        .values
        .iter()
        .zip(&mask)
        .filter(|(_, m)| **m)
        .fold(0.0_f64, |m, (v, _)| m.max(v.norm()))
}

/// `sup |(ω-Δ)Φ - λ|Φ|^α Φ|` with a spectral Laplacian.
fn spectral_residual(field: &WaveField, spectral: &Spectral, symbol: &[f64]) -> f64 {
    let ModelParams { alpha, lambda, .. } = field.params;
    let mut buf = field.values.clone();
    spectral.forward(&mut buf);
    for (b, m) in buf.iter_mut().zip(symbol) {
        *b *= *m;
    }
    spectral.inverse(&mut buf);
    buf.iter()
        .zip(&field.values)
        .map(|(lin, v)| (lin.re - lambda * v.norm().powf(alpha) * v.re).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_state::{default_radial_grid, pohozaev_residuals, solve_shooting};

    #[test]
    fn agrees_with_shooting_in_one_dimension() {
        let p = ModelParams::unit(1, 8.0).unwrap();
        let fp = solve_fixed_point(&p, &CartesianGrid::new(1, 25.0, 4096).unwrap(), FixedPointOptions::default()).unwrap();
        let sh = solve_shooting(&p, &default_radial_grid(1.0).unwrap()).unwrap();
        let field = fp.field.as_ref().unwrap();
        let grid = field.grid;
        let err = (0..grid.len())
            .map(|i| (field.values[i].re - sh.profile.eval(grid.coord(i).abs())).abs())
            .fold(0.0, f64::max);
        let radial = sh
            .profile
            .grid
            .nodes()
            .take_while(|&r| r < 20.0)
            .map(|r| (fp.profile.eval(r) - sh.profile.eval(r)).abs())
            .fold(0.0, f64::max);
        assert!(pohozaev_residuals(&fp).max() < 1e-6);
        assert!(fp.residual_linf < 1e-8);
        assert!(err < 1e-5, "{err:e}");
        assert!(radial < 1e-5, "{radial:e}");
    }

    #[test]
    fn two_dimensional_pohozaev() {
        let p = ModelParams::unit(2, 3.0).unwrap();
        let gs = solve_fixed_point(&p, &CartesianGrid::new(2, 20.0, 256).unwrap(), FixedPointOptions::default()).unwrap();
        let res = pohozaev_residuals(&gs);
        assert!(res.max() < 1e-6, "{res:?}");
    }

    #[test]
    fn coupling_scaling() {
        let grid = CartesianGrid::new(1, 25.0, 2048).unwrap();
        let one = solve_fixed_point(&ModelParams::unit(1, 8.0).unwrap(), &grid, FixedPointOptions::default()).unwrap();
        let p2 = ModelParams::new(1, 8.0, 2.0, 1.0).unwrap();
        let two = solve_fixed_point(&p2, &grid, FixedPointOptions::default()).unwrap();
        let s = 2f64.powf(-1.0 / 8.0);
        let (f1, f2) = (one.field.unwrap(), two.field.unwrap());
        let err = f1.values.iter().zip(&f2.values).map(|(a, b)| (s * a.re - b.re).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err:e}");
    }
}
