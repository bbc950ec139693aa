//! The verification suite: every invariant check run once for a parameter
//! set, each reported as pass, fail or skipped with its margin.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{bootstrap_monitor, split_step_evolve, virial_residuals, BootstrapBound, EvolveOptions, ObservableSeries, RunStatus};
use crate::functionals::{
    action_from_norms, beta_star_from_norms, constraint_from_norms, dilate_profile, gn_constant_formula, gn_constant_minimize, GnOptions,
    ThresholdSet,
};
use crate::ground_state::{default_radial_grid, pohozaev_residuals, profile_norms, GroundState};
use crate::initial_data::gaussian_with_norms;
use crate::numerics::{CartesianGrid, WaveField};
use crate::params::ModelParams;

use super::cache::{ground_state, GroundStateCache};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Distance to the tolerance: positive when passing.
    pub margin: Option<f64>,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:<15}", self.status.as_str(), self.name)?;
        match self.margin {
            Some(m) => write!(f, " margin {m:+.3e}")?,
            None => write!(f, " {:17}", "")?,
        }
        write!(f, "  {}", self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| c.status == CheckStatus::Fail).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Multiplies the ground-state values before the Pohozaev check.
    pub ground_state_scale: f64,
    /// Length of the bootstrap run, in units of `1/ω`.
    pub bootstrap_t_end: f64,
    pub cache_dir: Option<std::path::PathBuf>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            ground_state_scale: 1.0,
            bootstrap_t_end: 2.0,
            cache_dir: None,
        }
    }
}

pub const POHOZAEV_TOL: f64 = 1e-6;
pub const GN_TOL: f64 = 5e-3;
pub const THRESHOLD_TOL: f64 = 1e-12;
pub const FUNCTIONAL_TOL: f64 = 1e-6;
pub const VIRIAL_TOL: f64 = 1e-3;
pub const MASS_TOL: f64 = 1e-12;
pub const ENERGY_TOL: f64 = 1e-6;

fn pass_if(name: &'static str, ok: bool, margin: f64, detail: String) -> CheckResult {
    CheckResult {
        name,
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        margin: Some(margin),
        detail,
    }
}

fn skipped(name: &'static str, why: &str) -> CheckResult {
    CheckResult {
        name,
        status: CheckStatus::Skipped,
        margin: None,
        detail: why.to_string(),
    }
}

fn errored(name: &'static str, e: Error) -> CheckResult {
    match e {
        Error::UnsupportedRegime(msg) => skipped(name, &msg),
        e => CheckResult {
            name,
            status: CheckStatus::Fail,
            margin: None,
            detail: e.to_string(),
        },
    }
}

/// Natural units of the model: the ground state is `(ω/λ)^{1/α} R(√ω x)`,
/// so amplitudes, lengths and times scale by these factors.
#[derive(Clone, Copy, Debug)]
struct Units {
    amp: f64,
    len: f64,
    time: f64,
}

impl Units {
    fn of(p: &ModelParams) -> Self {
        Units {
            amp: (p.omega / p.lambda).powf(1.0 / p.alpha),
            len: 1.0 / p.omega.sqrt(),
            time: 1.0 / p.omega,
        }
    }
}

/// Runs the suite serially; failures are report content, never errors.
pub fn run_verify(params: &ModelParams, opts: &VerifyOptions) -> VerifyReport {
    let mut report = VerifyReport::default();
    if let Err(e) = params.validate() {
        report.checks.push(errored("parameters", e));
        return report;
    }
    let cache = opts.cache_dir.as_ref().map(GroundStateCache::new);
    let gs = default_radial_grid(params.omega).and_then(|g| ground_state(params, &g, cache.as_ref()));
    let unit = ModelParams::unit(params.dim, params.alpha)
        .and_then(|u| ground_state(&u, &default_radial_grid(1.0)?, cache.as_ref()));
    let (gs, unit) = match (gs, unit) {
        (Ok(g), Ok(u)) => (g, u),
        (Err(e), _) | (_, Err(e)) => {
            report.checks.push(errored("ground-state", e));
            return report;
        }
    };
    let supercritical = params.is_supercritical();
    let sub = "supercritical-only check (α ≤ 4/N)";
    let run = |name: &'static str, f: &dyn Fn() -> Result<CheckResult>| f().unwrap_or_else(|e| errored(name, e));

    report.checks.push(run("pohozaev", &|| check_pohozaev(&gs, opts.ground_state_scale)));
    report.checks.push(run("gn-constant", &|| check_gn(&unit)));
    for (name, check) in [
        ("thresholds", &(|| check_thresholds(&gs, params)) as &dyn Fn() -> Result<CheckResult>),
        ("functionals", &|| check_functionals(&gs)),
    ] {
        report.checks.push(if supercritical { run(name, check) } else { skipped(name, sub) });
    }
    report.checks.push(run("virial", &|| check_virial(&gs)));
    report.checks.push(run("conservation", &|| check_conservation(&gs)));
    report.checks.push(if supercritical {
        run("bootstrap", &|| check_bootstrap(&gs, opts.bootstrap_t_end))
    } else {
        skipped("bootstrap", sub)
    });
    report.checks.push(run("critical-limit", &|| check_critical_limit(params, cache.as_ref())));
    report
}

fn check_pohozaev(gs: &GroundState, scale: f64) -> Result<CheckResult> {
    let mut gs = gs.clone();
    if scale != 1.0 {
        gs.profile = gs.profile.scale_values(scale);
        gs.norms = profile_norms(&gs.profile, &gs.params)?;
    }
    let worst = pohozaev_residuals(&gs).max();
    Ok(pass_if(
        "pohozaev",
        worst < POHOZAEV_TOL,
        POHOZAEV_TOL - worst,
        format!("max relative residual {worst:.3e} (tol {POHOZAEV_TOL:e})"),
    ))
}

fn check_gn(unit: &GroundState) -> Result<CheckResult> {
    let p = unit.params;
    if p.dim > 2 {
        return Ok(skipped("gn-constant", "minimization runs on 1D and 2D grids only"));
    }
    let formula = gn_constant_formula(&p, unit.l2())?;
    let report = gn_constant_minimize(&p, &GnOptions::default_for(p.dim)?)?;
    let rel = (report.c_star / formula - 1.0).abs();
    Ok(pass_if(
        "gn-constant",
        rel < GN_TOL,
        GN_TOL - rel,
        format!("minimized {:.8} vs closed form {formula:.8} ({rel:.2e} relative)", report.c_star),
    ))
}

fn check_thresholds(gs: &GroundState, params: &ModelParams) -> Result<CheckResult> {
    let ts = ThresholdSet::from_ground_state(gs, *params)?;
    let mut worst = 0.0f64;
    let mut ordered = true;
    for i in 0..100 {
        let a = 10f64.powf(-2.0 + 4.0 * i as f64 / 99.0);
        let t = ts.evaluate(a)?;
        let inv = ts.invert(a)?;
        ordered &= t.gamma < t.r && t.r < t.rho;
        for (x, y) in [
            (ts.evaluate(inv.gamma)?.gamma, a),
            (ts.evaluate(inv.r)?.r, a),
            (ts.evaluate(inv.rho)?.rho, a),
            (ts.invert(t.r)?.r, a),
        ] {
            worst = worst.max((x / y - 1.0).abs());
        }
    }
    Ok(pass_if(
        "thresholds",
        ordered && worst < THRESHOLD_TOL,
        THRESHOLD_TOL - worst,
        format!("inverse pairs to {worst:.1e}, γ* < r* < ρ* {}", if ordered { "holds" } else { "violated" }),
    ))
}

/// `Q(Φ) = 0`, `β*(Φ) = 1`, and `β ↦ S(𝒫(β, Φ))` peaking at `β = 1`.
fn check_functionals(gs: &GroundState) -> Result<CheckResult> {
    let p = gs.params;
    let q = constraint_from_norms(&gs.norms, &p)? / gs.grad_sq();
    let beta = beta_star_from_norms(&gs.norms, &p)?;
    let m = action_from_norms(&gs.norms, &p)?;
    let mut excess = f64::NEG_INFINITY;
    for b in [0.8, 0.9, 0.99, 1.01, 1.1, 1.25] {
        let dilated = profile_norms(&dilate_profile(b, &gs.profile)?, &p)?;
        excess = excess.max(action_from_norms(&dilated, &p)? - m);
    }
    let worst = q.abs().max((beta - 1.0).abs());
    let ok = worst < FUNCTIONAL_TOL && excess < 0.0;
    Ok(pass_if(
        "functionals",
        ok,
        (FUNCTIONAL_TOL - worst).min(-excess),
        format!("Q/‖∇Φ‖² = {q:.1e}, β* - 1 = {:.1e}, max S(𝒫(β,Φ)) - m = {excess:.3e}", beta - 1.0),
    ))
}

/// Gaussian `0.7 Φ(0) e^{-ω|x|²/2}` on a box sized for its dimension.
fn test_gaussian(gs: &GroundState) -> Result<WaveField> {
    let p = gs.params;
    let u = Units::of(&p);
    let (half, n) = match p.dim {
        1 => (30.0, 2048),
        2 => (16.0, 128),
        _ => return Err(Error::UnsupportedRegime("evolution runs on 1D and 2D grids only".into())),
    };
    let grid = CartesianGrid::new(p.dim, half * u.len, n)?;
    let amp = 0.7 * gs.peak();
    let k = 1.0 / (2.0 * u.len * u.len);
    WaveField::from_fn(grid, p, |x| Complex64::new(amp * (-k * x.iter().map(|c| c * c).sum::<f64>()).exp(), 0.0))
}

fn fixed_run(phi: &WaveField, t_end: f64, dt: f64, records: usize) -> Result<ObservableSeries> {
    let steps = (t_end / dt).round() as usize;
    let opts = EvolveOptions::new(t_end, dt, (steps / records).max(1)).fixed_step();
    let (out, series) = split_step_evolve(phi, &opts)?;
    if out.status != RunStatus::GlobalOnWindow {
        return Err(Error::PreconditionViolation(format!(
            "test run ended {}: {}",
            out.status.as_str(),
            out.reason.unwrap_or_default()
        )));
    }
    Ok(series)
}

fn check_virial(gs: &GroundState) -> Result<CheckResult> {
    let phi = test_gaussian(gs)?;
    let t = Units::of(&gs.params).time;
    let fine = virial_residuals(&fixed_run(&phi, 0.1 * t, 1e-4 * t, 100)?, &gs.params)?;
    let coarse = virial_residuals(&fixed_run(&phi, 0.1 * t, 2e-4 * t, 100)?, &gs.params)?;
    let r = fine.max_8q();
    let ok = r < VIRIAL_TOL && r < coarse.max_8q();
    Ok(pass_if(
        "virial",
        ok,
        VIRIAL_TOL - r,
        format!("max |h'' - 8Q|/|8Q| = {r:.2e} (dt/2) vs {:.2e} (dt)", coarse.max_8q()),
    ))
}

fn check_conservation(gs: &GroundState) -> Result<CheckResult> {
    let phi = test_gaussian(gs)?;
    let t = Units::of(&gs.params).time;
    let fine = fixed_run(&phi, t, 1e-4 * t, 100)?;
    let coarse = fixed_run(&phi, t, 2e-4 * t, 100)?;
    let (dm, de) = (fine.mass_drift(), fine.energy_drift());
    let ratio = coarse.energy_drift() / de;
    let ok = dm < MASS_TOL && de < ENERGY_TOL && (3.5..4.5).contains(&ratio);
    Ok(pass_if(
        "conservation",
        ok,
        (1.0 - dm / MASS_TOL).min(1.0 - de / ENERGY_TOL),
        format!("mass drift {dm:.1e}, energy drift {de:.1e}, halving dt shrinks it {ratio:.2}×"),
    ))
}

/// Gaussian at `‖φ‖ = 0.9 γ*(b)` evolved on a wide box; the bootstrap bound
/// must hold at every record.
fn check_bootstrap(gs: &GroundState, t_end: f64) -> Result<CheckResult> {
    let p = gs.params;
    let u = Units::of(&p);
    let (half, n) = match p.dim {
        1 => (320.0, 8192),
        2 => (48.0, 256),
        _ => return Err(Error::UnsupportedRegime("evolution runs on 1D and 2D grids only".into())),
    };
    let ts = ThresholdSet::from_ground_state(gs, p)?;
    let b = u.amp * u.len.powf(p.n() / 2.0 - 1.0);
    let a = 0.9 * ts.evaluate(b)?.gamma;
    let grid = CartesianGrid::new(p.dim, half * u.len, n)?;
    let phi = gaussian_with_norms(a, b, &grid, p)?;
    let bound = BootstrapBound::new(a, b * b, &ts)?;
    let (out, series) = split_step_evolve(&phi, &EvolveOptions::new(t_end * u.time, 1e-3 * u.time, 100))?;
    let report = bootstrap_monitor(&series, &bound, &p)?;
    let ok = out.status == RunStatus::GlobalOnWindow && report.passed && report.margin > 0.0;
    Ok(pass_if(
        "bootstrap",
        ok,
        report.margin,
        format!(
            "{} to t = {}, min (x̄ - ‖∇u‖²) = {:.3e} over {} records",
            out.status.as_str(),
            t_end * u.time,
            report.margin,
            report.records_checked
        ),
    ))
}

/// `|γ*(1) - λ^{-1/α}‖R_α‖|` and the same for `r*` shrink as `α ↘ 4/N`.
pub fn critical_limit_gaps(params: &ModelParams, cache: Option<&GroundStateCache>) -> Result<Vec<(f64, f64, f64)>> {
    let crit = 4.0 / params.n();
    let mut gaps = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let alpha = crit + eps;
        let unit = ground_state(&ModelParams::unit(params.dim, alpha)?, &default_radial_grid(1.0)?, cache)?;
        let ts = ThresholdSet::new(ModelParams::new(params.dim, alpha, params.lambda, 1.0)?, unit.l2())?;
        let t = ts.evaluate(1.0)?;
        let m = ts.critical_mass();
        gaps.push((alpha, (t.gamma - m).abs(), (t.r - m).abs()));
    }
    Ok(gaps)
}

fn check_critical_limit(params: &ModelParams, cache: Option<&GroundStateCache>) -> Result<CheckResult> {
    let gaps = critical_limit_gaps(params, cache)?;
    let shrinking = |k: usize| {
        gaps.windows(2).all(|w| {
            let (x, y) = if k == 0 { (w[0].1, w[1].1) } else { (w[0].2, w[1].2) };
            y < x
        })
    };
    let ok = shrinking(0) && shrinking(1);
    let last = gaps.last().map(|g| g.1.max(g.2)).unwrap_or(f64::NAN);
    let list: Vec<String> = gaps.iter().map(|(a, g, r)| format!("α={a:.2}: {g:.2e}/{r:.2e}")).collect();
    Ok(CheckResult {
        name: "critical-limit",
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        margin: Some(if ok { 1.0 } else { -1.0 } * last),
        detail: format!("γ*/r* gaps {}", list.join(", ")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbed_ground_state_fails_pohozaev() {
        let p = ModelParams::unit(1, 8.0).unwrap();
        let gs = ground_state(&p, &default_radial_grid(1.0).unwrap(), None).unwrap();
        assert_eq!(check_pohozaev(&gs, 1.0).unwrap().status, CheckStatus::Pass);
        assert_eq!(check_pohozaev(&gs, 1.01).unwrap().status, CheckStatus::Fail);
    }

    #[test]
    fn functional_identities_hold_for_the_ground_state() {
        let p = ModelParams::unit(1, 8.0).unwrap();
        let gs = ground_state(&p, &default_radial_grid(1.0).unwrap(), None).unwrap();
        let c = check_functionals(&gs).unwrap();
        assert_eq!(c.status, CheckStatus::Pass, "{c}");
        let c = check_thresholds(&gs, &p).unwrap();
        assert_eq!(c.status, CheckStatus::Pass, "{c}");
    }

    #[test]
    fn critical_limit_gaps_shrink() {
        let p = ModelParams::unit(1, 8.0).unwrap();
        let c = check_critical_limit(&p, None).unwrap();
        assert_eq!(c.status, CheckStatus::Pass, "{c}");
    }

    #[test]
    fn bad_parameters_are_report_content() {
        let mut p = ModelParams::unit(1, 8.0).unwrap();
        p.lambda = -1.0;
        let r = run_verify(&p, &VerifyOptions::default());
        assert!(!r.passed());
        assert_eq!(r.checks.len(), 1);
    }

    #[test]
    fn display_lines() {
        let c = skipped("bootstrap", "why");
        assert!(c.to_string().starts_with("SKIP bootstrap"));
    }
}
