//! Conserved quantities, the action and constraint functionals, the Weinstein
//! quotient, the sharp Gagliardo–Nirenberg constant and the explicit
//! thresholds in the (mass, gradient) plane.

mod dilation;
mod gn;
mod thresholds;

pub use dilation::{dilate_field, dilate_profile};
pub use gn::{gn_constant_formula, gn_constant_minimize, GnOptions, GnReport};
pub use thresholds::{EnergySign, RegionLabel, ThresholdSet, ThresholdTriple};

use crate::error::{invalid, Error, Result};
use crate::ground_state::GroundState;
use crate::numerics::{NormSet, Normed};
use crate::params::ModelParams;

/// Norms carrying the `α+2` exponent needed by every functional here.
pub fn functional_norms<F: Normed>(f: &F, params: &ModelParams) -> Result<NormSet> {
    f.norm_set(&[params.alpha + 2.0])
}

fn potential(norms: &NormSet, params: &ModelParams) -> Result<f64> {
    norms
        .lp(params.alpha + 2.0)
        .ok_or_else(|| invalid(format!("norm set lacks the L^{} norm", params.alpha + 2.0)))
}

/// `E = ½‖∇φ‖² - λ/(α+2) ‖φ‖^{α+2}_{α+2}`.
pub fn energy_from_norms(norms: &NormSet, params: &ModelParams) -> Result<f64> {
    let p = potential(norms, params)?;
    Ok(0.5 * norms.grad_sq - params.lambda / (params.alpha + 2.0) * p)
}

/// `S = ½‖∇ψ‖² - λ/(α+2) ‖ψ‖^{α+2}_{α+2} + ω/2 ‖ψ‖²`.
pub fn action_from_norms(norms: &NormSet, params: &ModelParams) -> Result<f64> {
    Ok(energy_from_norms(norms, params)? + 0.5 * params.omega * norms.mass)
}

/// `Q = ‖∇ψ‖² - λNα/(2(α+2)) ‖ψ‖^{α+2}_{α+2}`.
pub fn constraint_from_norms(norms: &NormSet, params: &ModelParams) -> Result<f64> {
    let p = potential(norms, params)?;
    Ok(norms.grad_sq - params.lambda * params.n_alpha() / (2.0 * (params.alpha + 2.0)) * p)
}

/// `β*` itself, the `2/(Nα-4)`-th root of `2(α+2)/(λNα) ‖∇ψ‖² / ‖ψ‖^{α+2}_{α+2}`.
pub fn beta_star_from_norms(norms: &NormSet, params: &ModelParams) -> Result<f64> {
    if !params.is_supercritical() {
        return Err(Error::UnsupportedRegime(format!(
            "β* needs α > 4/N, got α = {} with N = {}",
            params.alpha, params.dim
        )));
    }
    let p = potential(norms, params)?;
    if !(norms.mass > 0.0 && p > 0.0) {
        return Err(invalid("β* is undefined for the zero field"));
    }
    let power = 2.0 * (params.alpha + 2.0) / (params.lambda * params.n_alpha()) * norms.grad_sq / p;
    Ok(power.powf(2.0 / params.supercritical_gap()))
}

/// `J = ‖f‖^{(4-α(N-2))/2} ‖∇f‖^{Nα/2} / ‖f‖^{α+2}_{α+2}`.
pub fn weinstein_from_norms(norms: &NormSet, params: &ModelParams) -> Result<f64> {
    let p = potential(norms, params)?;
    if !(norms.mass > 0.0 && p > 0.0) {
        return Err(invalid("the Weinstein quotient is undefined for the zero field"));
    }
    let log_j = params.energy_gap() / 4.0 * norms.mass.ln() + params.n_alpha() / 4.0 * norms.grad_sq.ln() - p.ln();
    Ok(log_j.exp())
}

pub fn energy<F: Normed>(f: &F, params: &ModelParams) -> Result<f64> {
    energy_from_norms(&functional_norms(f, params)?, params)
}

pub fn action_s<F: Normed>(f: &F, params: &ModelParams) -> Result<f64> {
    action_from_norms(&functional_norms(f, params)?, params)
}

pub fn constraint_q<F: Normed>(f: &F, params: &ModelParams) -> Result<f64> {
    constraint_from_norms(&functional_norms(f, params)?, params)
}

pub fn beta_star<F: Normed>(f: &F, params: &ModelParams) -> Result<f64> {
    beta_star_from_norms(&functional_norms(f, params)?, params)
}

pub fn weinstein_j<F: Normed>(f: &F, params: &ModelParams) -> Result<f64> {
    weinstein_from_norms(&functional_norms(f, params)?, params)
}

/// The level `m = S(ground state)` of the action over the constraint set.
#[derive(Clone, Debug)]
pub struct VariationalContext {
    pub params: ModelParams,
    pub ground_state: GroundState,
    pub m: f64,
}

impl VariationalContext {
    /// Tolerance on `|Q(Φ)|` relative to `‖∇Φ‖²`.
    pub const Q_TOL: f64 = 1e-8;

    pub fn new(ground_state: GroundState) -> Result<Self> {
        let params = ground_state.params;
        let m = action_from_norms(&ground_state.norms, &params)?;
        let q = constraint_from_norms(&ground_state.norms, &params)?;
        if q.abs() > Self::Q_TOL * ground_state.grad_sq().max(1.0) {
            return Err(Error::ConvergenceFailure(format!(
                "ground state violates Q = 0 (Q = {q:e})"
            )));
        }
        if !(m > 0.0) {
            return Err(Error::ConvergenceFailure(format!("ground-state action {m} is not positive")));
        }
        Ok(VariationalContext { params, ground_state, m })
    }
}
