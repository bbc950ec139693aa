//! Initial data: the blow-up family `φ_{a,b}` built from a dilated, rescaled
//! ground state, norm-prescribed Gaussians, and radial-to-Cartesian embedding.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::functionals::{action_from_norms, constraint_from_norms, dilate_profile, ThresholdSet};
use crate::ground_state::{profile_norms, rescale_unit_to_model, GroundState};
use crate::numerics::{unit_sphere_area, CartesianGrid, NormSet, RadialProfile, WaveField};
use crate::params::ModelParams;

/// Relative tolerance on the prescribed norms of a constructed datum.
pub const NORM_TOL: f64 = 1e-6;

/// Box for the embedded datum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoxChoice {
    /// Half-width `1.5×` the radius holding all but `1e-12` of the mass.
    Auto { points_per_axis: usize },
    Fixed(CartesianGrid),
}

/// The blow-up datum `φ_{a,b} = 𝒫(β, ψ)` with `ψ(x) = ν R(√ω x)`.
#[derive(Clone, Debug)]
pub struct PhiAbCertificate {
    pub a: f64,
    pub b: f64,
    pub nu: f64,
    pub omega: f64,
    pub beta: f64,
    /// `ψ`, the ground state at frequency `ω`.
    pub psi: GroundState,
    /// `φ_{a,b}` in radial form.
    pub profile: RadialProfile,
    /// Radial norms of `φ_{a,b}` (with the `α+2` exponent).
    pub norms: NormSet,
    /// `S(ψ)`, the minimal action at frequency `ω`.
    pub m: f64,
    pub energy: f64,
    pub action: f64,
    pub constraint: f64,
    pub field: WaveField,
}

/// Builds `φ_{a,b}` from the unit ground state for `a > r*(b)`.
///
/// `ω = (λ^{-1/α}‖R‖/a)^{4α/(Nα-4)}` makes `‖ψ‖ = a` and
/// `‖∇ψ‖ = r*⁻¹(a)`; the dilation `β = b/r*⁻¹(a) > 1` then sets the gradient
/// norm to `b`. Both the norms and `Q < 0`, `S < m` are checked before the
/// profile is embedded.
pub fn make_phi_ab(a: f64, b: f64, ts: &ThresholdSet, unit: &GroundState, choice: BoxChoice) -> Result<PhiAbCertificate> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(invalid(format!("norms must be positive, got a = {a}, b = {b}")));
    }
    let params = ts.params;
    if unit.params.dim != params.dim || unit.params.alpha != params.alpha {
        return Err(invalid("ground state and thresholds must share N and α"));
    }
    let r_star = ts.evaluate(b)?.r;
    let r_inv = ts.invert(a)?.r;
    let beta = b / r_inv;
    if !(a > r_star) || !(beta > 1.0) {
        return Err(Error::PreconditionViolation(format!(
            "φ_(a,b) needs a > r*(b): a = {a}, r*(b) = {r_star}"
        )));
    }
    let omega = ((ts.critical_mass() / a).ln() * 4.0 * params.alpha / params.supercritical_gap()).exp();
    let nu = (omega / params.lambda).powf(1.0 / params.alpha);

    let psi = rescale_unit_to_model(unit, omega, params.lambda)?;
    let psi_norms = profile_norms(&psi.profile, &psi.params)?;
    check_norm("‖ψ‖", psi_norms.l2(), a)?;
    check_norm("‖∇ψ‖", psi_norms.grad_l2(), r_inv)?;

    let local = params.with_omega(omega);
    let profile = dilate_profile(beta, &psi.profile)?;
    let norms = profile_norms(&profile, &local)?;
    check_norm("‖φ‖", norms.l2(), a)?;
    check_norm("‖∇φ‖", norms.grad_l2(), b)?;

    let m = action_from_norms(&psi_norms, &local)?;
    let action = action_from_norms(&norms, &local)?;
    let constraint = constraint_from_norms(&norms, &local)?;
    let energy = crate::functionals::energy_from_norms(&norms, &local)?;
    if !(constraint < 0.0) || !(action < m) {
        return Err(Error::PreconditionViolation(format!(
            "constructed datum is not in the blow-up set: Q = {constraint:e}, S - m = {:e}",
            action - m
        )));
    }

    let grid = match choice {
        BoxChoice::Fixed(g) => g,
        BoxChoice::Auto { points_per_axis } => {
            CartesianGrid::new(params.dim, auto_half_width(&profile), points_per_axis)?
        }
    };
    let field = embed_radial(&profile, &grid, local)?;
    Ok(PhiAbCertificate {
        a,
        b,
        nu,
        omega,
        beta,
        psi,
        profile,
        norms,
        m,
        energy,
        action,
        constraint,
        field,
    })
}

fn check_norm(name: &str, got: f64, want: f64) -> Result<()> {
    if (got / want - 1.0).abs() > NORM_TOL {
        return Err(Error::ConvergenceFailure(format!(
            "{name} = {got} misses its target {want} by more than {NORM_TOL:e}"
        )));
    }
    Ok(())
}

/// `1.5×` the radius holding all but `1e-12` of the mass, widened if needed
/// so that the profile has decayed below a tenth of the embedding tolerance.
pub fn auto_half_width(profile: &RadialProfile) -> f64 {
    let peak = profile.peak();
    let decayed = profile
        .grid
        .nodes()
        .zip(&profile.values)
        .find(|(_, v)| v.abs() < 0.1 * EMBED_TAIL_TOL * peak)
        .map_or(profile.grid.r_max(), |(r, _)| r);
    (1.5 * mass_radius(profile, 1e-12)).max(decayed)
}

/// Smallest radius outside which at most `tail` of the mass lies.
pub fn mass_radius(profile: &RadialProfile, tail: f64) -> f64 {
    let area = unit_sphere_area(profile.dim);
    let dr = profile.grid.dr();
    let dens: Vec<f64> = profile
        .grid
        .nodes()
        .zip(&profile.values)
        .map(|(r, v)| area * r.powi(profile.dim as i32 - 1) * v * v)
        .collect();
    // trapezoid masses of the cells, accumulated from the outside in
    let total: f64 = dens.windows(2).map(|w| 0.5 * dr * (w[0] + w[1])).sum();
    let mut outside = 0.0;
    for j in (1..dens.len()).rev() {
        outside += 0.5 * dr * (dens[j - 1] + dens[j]);
        if outside > tail * total {
            return profile.grid.node(j);
        }
    }
    profile.grid.node(1)
}

/// Tail tolerance for embedding a radial profile into a box.
pub const EMBED_TAIL_TOL: f64 = 1e-10;

/// Samples `profile(|x|)` on the box by cubic interpolation.
pub fn embed_radial(profile: &RadialProfile, grid: &CartesianGrid, params: ModelParams) -> Result<WaveField> {
    profile.ensure_finite()?;
    if profile.dim != grid.dim() {
        return Err(invalid(format!(
            "profile lives in R^{} but the grid is {}-dimensional",
            profile.dim,
            grid.dim()
        )));
    }
    let peak = profile.peak();
    if peak > 0.0 {
        let tail = profile.eval(grid.half_width()).abs() / peak;
        if tail >= EMBED_TAIL_TOL {
            return Err(Error::BoundaryLeakage { fraction: tail });
        }
    }
    WaveField::from_real_fn(*grid, params, |x| {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        profile.eval(r)
    })
}

/// Centered Gaussian `A exp(-|x|²/(2s²))` with `‖φ‖_{L²} = a` and `‖∇φ‖_{L²} = b`.
pub fn gaussian_with_norms(a: f64, b: f64, grid: &CartesianGrid, params: ModelParams) -> Result<WaveField> {
    let (amp, width) = gaussian_shape(a, b, grid.dim())?;
    let edge = (-(grid.half_width() / width).powi(2)).exp();
    if edge > 1e-14 {
        return Err(Error::BoundaryLeakage { fraction: edge });
    }
    if width < 3.0 * grid.dx() {
        return Err(invalid(format!(
            "gaussian width {width:e} is under-resolved by spacing {:e}",
            grid.dx()
        )));
    }
    WaveField::from_real_fn(*grid, params, |x| {
        let r2 = x.iter().map(|c| c * c).sum::<f64>();
        amp * (-r2 / (2.0 * width * width)).exp()
    })
}

/// Amplitude and width of the Gaussian with prescribed `L²` and gradient norms.
pub fn gaussian_shape(a: f64, b: f64, dim: usize) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(invalid(format!("gaussian norms must be positive, got a = {a}, b = {b}")));
    }
    let n = dim as f64;
    // ‖∇g‖²/‖g‖² = N/(2s²)
    let width = a / b * (n / 2.0).sqrt();
    let amp = a / (PI * width * width).powf(n / 4.0);
    Ok((amp, width))
}
