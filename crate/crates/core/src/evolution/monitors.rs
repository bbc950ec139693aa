use super::series::ObservableSeries;
use crate::error::{invalid, Error, Result};
use crate::functionals::ThresholdSet;
use crate::params::ModelParams;

/// Relative spread of record spacings still treated as uniform.
const UNIFORM_TOL: f64 = 1e-9;

/// Discrete `h''` against the two closed forms of the virial identity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VirialResiduals {
    pub times: Vec<f64>,
    pub h_second: Vec<f64>,
    /// `|h'' - 8Q| / max(|h''|, 1)`.
    pub res_8q: Vec<f64>,
    /// `|h'' - (4NαE - 2(Nα-4)‖∇u‖²)| / max(|h''|, 1)`.
    pub res_energy: Vec<f64>,
}

impl VirialResiduals {
    pub fn max_8q(&self) -> f64 {
        self.res_8q.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_energy(&self) -> f64 {
        self.res_energy.iter().copied().fold(0.0, f64::max)
    }
}

/// Fourth-order central second differences of `h` at the interior records.
pub fn virial_residuals(series: &ObservableSeries, params: &ModelParams) -> Result<VirialResiduals> {
    let recs = &series.records;
    if recs.len() < 5 {
        return Err(invalid(format!("virial check needs at least 5 records, got {}", recs.len())));
    }
    let step = recs[1].t - recs[0].t;
    if let Some(w) = recs
        .windows(2)
        .find(|w| ((w[1].t - w[0].t) - step).abs() > UNIFORM_TOL * step.max(w[0].t.abs()))
    {
        return Err(invalid(format!(
            "records are not uniformly spaced: gap {} at t = {} vs {step}",
            w[1].t - w[0].t,
            w[0].t
        )));
    }
    let (na, k) = (params.n_alpha(), params.supercritical_gap());
    let mut out = VirialResiduals::default();
    for i in 2..recs.len() - 2 {
        let h = |j: usize| recs[j].variance;
        let d2 = (-h(i - 2) + 16.0 * h(i - 1) - 30.0 * h(i) + 16.0 * h(i + 1) - h(i + 2)) / (12.0 * step * step);
        let r = &recs[i];
        let scale = d2.abs().max(1.0);
        out.times.push(r.t);
        out.h_second.push(d2);
        out.res_8q.push((d2 - 8.0 * r.q).abs() / scale);
        out.res_energy
            .push((d2 - (4.0 * na * r.energy - 2.0 * k * r.grad_sq)).abs() / scale);
    }
    Ok(out)
}

/// The scalar bound `f(x) = a - x + b x^p` controlling `x = ‖∇u(t)‖²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapBound {
    /// `‖∇φ‖²`.
    pub a: f64,
    /// `2λ/(α+2) · C* · ‖φ‖^{(4-α(N-2))/2}`.
    pub b_coef: f64,
    /// `Nα/4`.
    pub p: f64,
    /// Zero of `f'`: `(b p)^{-1/(p-1)}`.
    pub x_bar: f64,
    /// `(p-1)/p · x̄`, the largest `a` with `f(x̄) ≤ 0`.
    pub b_star: f64,
    pub mass_l2: f64,
}

impl BootstrapBound {
    /// Relative tolerance of the identity `x̄ = [r*⁻¹(‖φ‖)]²`.
    pub const IDENTITY_TOL: f64 = 1e-10;

    pub fn new(mass_l2: f64, grad_sq: f64, ts: &ThresholdSet) -> Result<Self> {
        let params = ts.params;
        if !params.is_supercritical() {
            return Err(Error::UnsupportedRegime("the bootstrap bound needs α > 4/N".into()));
        }
        if !(mass_l2 > 0.0 && grad_sq > 0.0) {
            return Err(invalid("the bootstrap bound needs a nonzero datum"));
        }
        let p = params.n_alpha() / 4.0;
        let b_coef = 2.0 * params.lambda / (params.alpha + 2.0) * ts.c_star * mass_l2.powf(params.energy_gap() / 2.0);
        let x_bar = (b_coef * p).powf(-1.0 / (p - 1.0));
        let bound = BootstrapBound {
            a: grad_sq,
            b_coef,
            p,
            x_bar,
            b_star: (p - 1.0) / p * x_bar,
            mass_l2,
        };
        let r_inv = ts.invert(mass_l2)?.r;
        let rel = (x_bar / (r_inv * r_inv) - 1.0).abs();
        if rel > Self::IDENTITY_TOL {
            return Err(Error::ConvergenceFailure(format!(
                "x̄ disagrees with [r*⁻¹(‖φ‖)]² by {rel:e}"
            )));
        }
        Ok(bound)
    }

    pub fn f(&self, x: f64) -> f64 {
        self.a - x + self.b_coef * x.powf(self.p)
    }

    /// `a ≤ b*`, i.e. the datum lies in the region of guaranteed global existence.
    pub fn in_region(&self) -> bool {
        self.a <= self.b_star
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonitorReport {
    pub passed: bool,
    /// `min_t (x̄ - ‖∇u(t)‖²)`.
    pub margin: f64,
    /// `min_t f(‖∇u(t)‖²)`.
    pub min_f: f64,
    /// `E(φ) > (Nα-4)/(2Nα) ‖∇u(t)‖²` at every record.
    pub energy_bound_holds: bool,
    pub records_checked: usize,
    /// Time of the first record violating any bound.
    pub first_failure: Option<f64>,
}

/// Checks `f(‖∇u(t)‖²) > 0`, `‖∇u(t)‖² < x̄` and the lower energy bound at every record.
pub fn bootstrap_monitor(series: &ObservableSeries, bound: &BootstrapBound, params: &ModelParams) -> Result<MonitorReport> {
    if !bound.in_region() {
        return Err(invalid(format!(
            "datum is outside the global region: ‖∇φ‖² = {} > b* = {}",
            bound.a, bound.b_star
        )));
    }
    let first = series.first().ok_or_else(|| invalid("empty observable series"))?;
    let e0 = first.energy;
    let coef = params.supercritical_gap() / (2.0 * params.n_alpha());
    let mut report = MonitorReport {
        passed: true,
        margin: f64::INFINITY,
        min_f: f64::INFINITY,
        energy_bound_holds: true,
        records_checked: 0,
        first_failure: None,
    };
    for r in &series.records {
        let x = r.grad_sq;
        let fx = bound.f(x);
        let gap = bound.x_bar - x;
        let energy_ok = e0 > coef * x;
        report.margin = report.margin.min(gap);
        report.min_f = report.min_f.min(fx);
        report.energy_bound_holds &= energy_ok;
        report.records_checked += 1;
        if !(fx > 0.0 && gap > 0.0 && energy_ok) {
            report.passed = false;
            report.first_failure.get_or_insert(r.t);
        }
    }
    Ok(report)
}
