use crate::error::{invalid, Result};

/// Criticality of the exponent relative to the mass-critical power `4/N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Physical parameters of `i u_t + Δu + λ|u|^α u = 0` and of the
/// stationary problem `-ΔΦ + ωΦ = λ|Φ|^α Φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub dim: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub omega: f64,
}

const CRITICAL_TOL: f64 = 1e-12;

impl ModelParams {
    pub fn new(dim: usize, alpha: f64, lambda: f64, omega: f64) -> Result<Self> {
        let p = ModelParams {
            dim,
            alpha,
            lambda,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit problem `λ = ω = 1`.
    pub fn unit(dim: usize, alpha: f64) -> Result<Self> {
        Self::new(dim, alpha, 1.0, 1.0)
    }

    /// Linear Schrödinger problem `λ = 0`, only meaningful for time evolution.
    pub fn free(dim: usize, alpha: f64) -> Result<Self> {
        let p = ModelParams {
            dim,
            alpha,
            lambda: 0.0,
            omega: 1.0,
        };
        p.validate_dynamics()?;
        Ok(p)
    }

    /// As [`validate`](Self::validate) but also admitting `λ = 0`.
    pub fn validate_dynamics(&self) -> Result<()> {
        if self.lambda == 0.0 {
            return self.with_lambda(1.0).validate();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(invalid(format!("dimension {} not in 1..=3", self.dim)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(invalid(format!("alpha = {} must be positive", self.alpha)));
        }
        if let Some(max) = self.alpha_max() {
            if self.alpha >= max {
                return Err(invalid(format!(
                    "alpha = {} is not energy-subcritical (must be < {max})",
                    self.alpha
                )));
            }
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid(format!("lambda = {} must be positive", self.lambda)));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(invalid(format!("omega = {} must be positive", self.omega)));
        }
        Ok(())
    }

    /// Upper bound `4/(N-2)` on α, absent for `N ≤ 2`.
    pub fn alpha_max(&self) -> Option<f64> {
        (self.dim > 2).then(|| 4.0 / (self.dim as f64 - 2.0))
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    /// `Nα`.
    pub fn n_alpha(&self) -> f64 {
        self.n() * self.alpha
    }

    /// `Nα - 4`, positive in the supercritical regime.
    pub fn supercritical_gap(&self) -> f64 {
        self.n_alpha() - 4.0
    }

    /// `4 - α(N-2)`, positive whenever α is energy-subcritical.
    pub fn energy_gap(&self) -> f64 {
        4.0 - self.alpha * (self.n() - 2.0)
    }

    pub fn regime(&self) -> Regime {
        let gap = self.supercritical_gap();
        if gap.abs() <= CRITICAL_TOL * 4.0 {
            Regime::Critical
        } else if gap > 0.0 {
            Regime::Supercritical
        } else {
            Regime::Subcritical
        }
    }

    pub fn is_supercritical(&self) -> bool {
        self.regime() == Regime::Supercritical
    }

    pub fn with_omega(self, omega: f64) -> Self {
        ModelParams { omega, ..self }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        ModelParams { lambda, ..self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_flags() {
        assert_eq!(ModelParams::unit(1, 8.0).unwrap().regime(), Regime::Supercritical);
        assert_eq!(ModelParams::unit(1, 4.0).unwrap().regime(), Regime::Critical);
        assert_eq!(ModelParams::unit(2, 2.0).unwrap().regime(), Regime::Critical);
        assert_eq!(ModelParams::unit(3, 1.0).unwrap().regime(), Regime::Subcritical);
    }

    #[test]
    fn rejects_energy_supercritical() {
        assert!(ModelParams::unit(3, 4.0).is_err());
        assert!(ModelParams::unit(3, 3.9).is_ok());
        assert!(ModelParams::unit(2, 100.0).is_ok());
        assert!(ModelParams::new(1, 8.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1, 8.0, 1.0, -1.0).is_err());
        assert!(ModelParams::unit(4, 1.0).is_err());
    }
}
