//! Positive radial solutions of `-ΔΦ + ωΦ = λ|Φ|^α Φ`, computed by two
//! independent methods and certified by the Pohozaev identities.

mod fixed_point;
mod ode;
mod shooting;

pub use fixed_point::{solve_fixed_point, FixedPointOptions};
pub use shooting::{default_radial_grid, solve_shooting};

use crate::error::{invalid, Result};
use crate::numerics::{radial_norms, CartesianGrid, NormSet, RadialProfile, WaveField};
use crate::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Shooting,
    FixedPoint,
}

/// A converged ground state together with its norms and solver diagnostics.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub profile: RadialProfile,
    pub params: ModelParams,
    /// `‖Φ‖²`, `‖∇Φ‖²` and `‖Φ‖^{α+2}_{α+2}`.
    pub norms: NormSet,
    pub method: Method,
    pub residual_linf: f64,
    /// Cartesian solution, kept by the fixed-point solver.
    pub field: Option<WaveField>,
}

impl GroundState {
    pub fn l2(&self) -> f64 {
        self.norms.l2()
    }

    pub fn grad_sq(&self) -> f64 {
        self.norms.grad_sq
    }

    /// `‖Φ‖^{α+2}_{L^{α+2}}`.
    pub fn potential_norm(&self) -> f64 {
        self.norms
            .lp(self.params.alpha + 2.0)
            .expect("ground-state norms always carry the α+2 exponent")
    }

    pub fn peak(&self) -> f64 {
        self.profile.values[0]
    }
}

/// Relative residuals of the three Pohozaev identities for a bound state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PohozaevResiduals {
    /// `‖∇ψ‖² = ωNα/(4-α(N-2)) ‖ψ‖²`
    pub gradient_mass: f64,
    /// `‖ψ‖^{α+2}_{α+2} = 2ω(α+2)/(λ(4-α(N-2))) ‖ψ‖²`
    pub potential_mass: f64,
    /// `‖ψ‖^{α+2}_{α+2} = 2(α+2)/(λNα) ‖∇ψ‖²`
    pub potential_gradient: f64,
}

impl PohozaevResiduals {
    pub fn max(&self) -> f64 {
        self.gradient_mass.max(self.potential_mass).max(self.potential_gradient)
    }
}

pub fn pohozaev_residuals(gs: &GroundState) -> PohozaevResiduals {
    pohozaev_from_norms(&gs.norms, &gs.params)
}

/// Pohozaev residuals of any field whose norms carry the `α+2` exponent.
pub fn pohozaev_from_norms(norms: &NormSet, params: &ModelParams) -> PohozaevResiduals {
    let ModelParams { alpha, lambda, omega, .. } = *params;
    let mass = norms.mass;
    let grad = norms.grad_sq;
    let pot = norms.lp(alpha + 2.0).unwrap_or(f64::NAN);
    let d = params.energy_gap();
    let na = params.n_alpha();
    let rel = |lhs: f64, rhs: f64| (lhs - rhs).abs() / lhs.abs();
    PohozaevResiduals {
        gradient_mass: rel(grad, omega * na / d * mass),
        potential_mass: rel(pot, 2.0 * omega * (alpha + 2.0) / (lambda * d) * mass),
        potential_gradient: rel(pot, 2.0 * (alpha + 2.0) / (lambda * na) * grad),
    }
}

/// Maps the unit ground state (`λ = ω = 1`) to `Φ(x) = (ω/λ)^{1/α} R(√ω x)`.
pub fn rescale_unit_to_model(unit: &GroundState, omega: f64, lambda: f64) -> Result<GroundState> {
    if !(omega > 0.0 && omega.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("omega = {omega} and lambda = {lambda} must be positive")));
    }
    if unit.params.omega != 1.0 || unit.params.lambda != 1.0 {
        return Err(invalid("rescaling expects the unit problem (λ = ω = 1)"));
    }
    let alpha = unit.params.alpha;
    let n = unit.params.n();
    let amp = (omega / lambda).powf(1.0 / alpha);
    let stretch = 1.0 / omega.sqrt();
    let params = unit.params.with_omega(omega).with_lambda(lambda);

    let grid = unit.profile.grid.scaled(stretch)?;
    let profile = RadialProfile::new(grid, unit.profile.values.iter().map(|v| amp * v).collect(), unit.profile.dim)?;

    let vol = stretch.powf(n);
    let p = alpha + 2.0;
    let norms = NormSet {
        mass: amp * amp * vol * unit.norms.mass,
        grad_sq: amp * amp * vol / (stretch * stretch) * unit.norms.grad_sq,
        lp: unit
            .norms
            .lp
            .iter()
            .map(|&(q, v)| (q, amp.powf(q) * vol * v))
            .collect(),
        variance: None,
    };
    debug_assert!(norms.lp(p).is_some());

    let field = match &unit.field {
        Some(f) => {
            let g = CartesianGrid::new(f.grid.dim(), f.grid.half_width() * stretch, f.grid.points_per_axis())?;
            Some(WaveField::new(g, f.values.iter().map(|v| v * amp).collect(), 0.0, params)?)
        }
        None => None,
    };
    Ok(GroundState {
        profile,
        params,
        norms,
        method: unit.method,
        // the equation residual scales like ω·(ω/λ)^{1/α}
        residual_linf: unit.residual_linf * omega * amp,
        field,
    })
}

/// Norms with the `α+2` exponent attached, by radial quadrature.
pub(crate) fn profile_norms(profile: &RadialProfile, params: &ModelParams) -> Result<NormSet> {
    radial_norms(profile, &[params.alpha + 2.0])
}

/// Checks positivity and monotone decay above `floor·peak`.
pub(crate) fn is_positive_decreasing(values: &[f64], floor: f64) -> bool {
    let peak = values[0];
    if peak <= 0.0 {
        return false;
    }
    let cut = floor * peak;
    values.windows(2).all(|w| {
        if w[0] > cut {
            w[1] < w[0] && w[0] > 0.0
        } else {
            w[1] <= w[0] && w[1] >= 0.0
        }
    })
}
