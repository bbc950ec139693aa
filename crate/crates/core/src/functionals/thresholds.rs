//! The explicit thresholds `γ*`, `r*`, `ρ*` in the (mass, gradient) plane and
//! the region classifier built on them.

use crate::error::{invalid, Error, Result};
use crate::ground_state::GroundState;
use crate::params::ModelParams;

use super::gn::gn_constant_formula;

/// Relative tolerance for treating `a = ρ*(b)` as the zero-energy curve.
pub const ZERO_ENERGY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdTriple {
    pub gamma: f64,
    pub r: f64,
    pub rho: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergySign {
    Negative,
    Zero,
    Positive,
}

impl EnergySign {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergySign::Negative => "negative",
            EnergySign::Zero => "zero",
            EnergySign::Positive => "positive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionLabel {
    /// `a ≤ γ*(b)`: every datum with these norms is global.
    GuaranteedGlobal,
    /// `a > r*(b)`: the datum `φ_{a,b}` blows up; the sign is that of its energy.
    BlowUpConstructible(EnergySign),
    Gap,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::GuaranteedGlobal => "guaranteed-global",
            RegionLabel::BlowUpConstructible(_) => "blow-up-constructible",
            RegionLabel::Gap => "gap",
        }
    }

    pub fn energy_sign(self) -> Option<EnergySign> {
        match self {
            RegionLabel::BlowUpConstructible(s) => Some(s),
            _ => None,
        }
    }
}

/// `‖R‖_{L²}` of the unit ground state, `C*`, and the six threshold maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdSet {
    pub params: ModelParams,
    pub r_l2: f64,
    pub c_star: f64,
}

impl ThresholdSet {
    pub fn new(params: ModelParams, r_l2: f64) -> Result<Self> {
        params.validate()?;
        let c_star = gn_constant_formula(&params, r_l2)?;
        Ok(ThresholdSet { params, r_l2, c_star })
    }

    /// Reads `‖R‖` off any ground state using
    /// `‖Φ_{ω,λ}‖² = (ω/λ)^{2/α} ω^{-N/2} ‖R‖²`; `λ` of `params` may differ.
    pub fn from_ground_state(gs: &GroundState, params: ModelParams) -> Result<Self> {
        let g = gs.params;
        if g.dim != params.dim || g.alpha != params.alpha {
            return Err(invalid("ground state and thresholds must share N and α"));
        }
        let log_scale = 2.0 / g.alpha * (g.omega / g.lambda).ln() - g.n() / 2.0 * g.omega.ln();
        let r_l2 = (0.5 * (gs.norms.mass.ln() - log_scale)).exp();
        Self::new(params, r_l2)
    }

    /// `λ^{-1/α} ‖R‖_{L²}`, the critical-case threshold.
    pub fn critical_mass(&self) -> f64 {
        (self.log_critical_mass()).exp()
    }

    fn log_critical_mass(&self) -> f64 {
        self.r_l2.ln() - self.params.lambda.ln() / self.params.alpha
    }

    fn check(&self, a: f64) -> Result<()> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(invalid(format!("threshold argument {a} must be positive")));
        }
        if !self.params.is_supercritical() {
            return Err(Error::UnsupportedRegime(format!(
                "thresholds need α > 4/N, got α = {} with N = {}",
                self.params.alpha, self.params.dim
            )));
        }
        Ok(())
    }

    fn exponents(&self) -> (f64, f64, f64) {
        let p = &self.params;
        (p.n_alpha(), p.energy_gap(), p.supercritical_gap())
    }

    /// `(γ*(a), r*(a), ρ*(a))`.
    pub fn evaluate(&self, a: f64) -> Result<ThresholdTriple> {
        self.check(a)?;
        let (na, d, k) = self.exponents();
        let alpha = self.params.alpha;
        let log_r = k / (2.0 * d) * (na / d).ln() + 2.0 * alpha / d * self.log_critical_mass() - k / d * a.ln();
        let log_gamma = k / (2.0 * d) * (k / na).ln() + log_r;
        let log_rho = 2.0 / d * (na / 4.0).ln() + log_r;
        Ok(ThresholdTriple {
            gamma: log_gamma.exp(),
            r: log_r.exp(),
            rho: log_rho.exp(),
        })
    }

    /// `(γ*⁻¹(a), r*⁻¹(a), ρ*⁻¹(a))`.
    pub fn invert(&self, a: f64) -> Result<ThresholdTriple> {
        self.check(a)?;
        let (na, d, k) = self.exponents();
        let alpha = self.params.alpha;
        let log_r = 0.5 * (na / d).ln() + 2.0 * alpha / k * self.log_critical_mass() - d / k * a.ln();
        let log_gamma = 0.5 * (k / na).ln() + log_r;
        let log_rho = 2.0 / k * (na / 4.0).ln() + log_r;
        Ok(ThresholdTriple {
            gamma: log_gamma.exp(),
            r: log_r.exp(),
            rho: log_rho.exp(),
        })
    }

    /// Label of a datum with `‖φ‖_{L²} = a` and `‖∇φ‖_{L²} = b`.
    pub fn classify(&self, a: f64, b: f64) -> Result<RegionLabel> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(invalid(format!("mass norm {a} must be positive")));
        }
        let t = self.evaluate(b)?;
        Ok(if a <= t.gamma {
            RegionLabel::GuaranteedGlobal
        } else if a > t.r {
            let sign = if (a - t.rho).abs() <= ZERO_ENERGY_TOL * t.rho {
                EnergySign::Zero
            } else if a < t.rho {
                EnergySign::Positive
            } else {
                EnergySign::Negative
            };
            RegionLabel::BlowUpConstructible(sign)
        } else {
            RegionLabel::Gap
        })
    }
}
