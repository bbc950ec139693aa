//! Strang split-step spectral integration of `i u_t + Δu + λ|u|^α u = 0`
//! with conservation, virial, bootstrap and blow-up diagnostics.

mod detector;
mod monitors;
mod series;

pub use detector::{blow_up_detector, fit_blow_up_time, spectral_tail_fraction, DetectorOptions, DetectorVerdict};
pub use monitors::{bootstrap_monitor, virial_residuals, BootstrapBound, MonitorReport, VirialResiduals};
pub use series::{ObservableRecord, ObservableSeries};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::functionals::{action_from_norms, constraint_from_norms, energy_from_norms};
use crate::numerics::norms::{field_norms_with_spectrum, modulus_pow, GridTables};
use crate::numerics::{Spectral, WaveField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    GlobalOnWindow,
    BlowUpDetected,
    Undecided,
    DiagnosticsViolated,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::GlobalOnWindow => "global-on-window",
            RunStatus::BlowUpDetected => "blow-up-detected",
            RunStatus::Undecided => "undecided",
            RunStatus::DiagnosticsViolated => "diagnostics-violated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub blow_up_time: Option<f64>,
    /// Why the run ended the way it did, when that is not obvious from the status.
    pub reason: Option<String>,
    /// `Q(u(t)) < 0` was seen at some record.
    pub negative_q_seen: bool,
    pub final_field: WaveField,
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub dt0: f64,
    /// Record observables every this many steps.
    pub stride: usize,
    /// `dt = dt0·min(1, ‖∇u(0)‖²/‖∇u(t)‖²)`, rounded down to a `2^{1/32}`
    /// ladder; fixed `dt0` otherwise.
    pub adaptive: bool,
    /// Outer fraction of the box watched for escaping mass.
    pub boundary_fraction: f64,
    /// Largest tolerated relative mass in that outer shell.
    pub boundary_tol: f64,
    /// Run the blow-up detector at every record.
    pub detect: bool,
    pub detector: DetectorOptions,
    pub dt_floor: f64,
    /// Stop as undecided after this many steps, e.g. when a collapse saturates
    /// at the grid scale and the adaptive step stalls.
    pub max_steps: Option<usize>,
    /// Use SIMD transforms; faster on large grids at the price of a larger
    /// roundoff drift in the mass.
    pub fast_transforms: bool,
}

impl EvolveOptions {
    pub fn new(t_end: f64, dt0: f64, stride: usize) -> Self {
        EvolveOptions {
            t_end,
            dt0,
            stride,
            adaptive: true,
            boundary_fraction: 0.1,
            boundary_tol: 1e-10,
            detect: true,
            detector: DetectorOptions::default(),
            dt_floor: 1e-14,
            max_steps: None,
            fast_transforms: false,
        }
    }

    pub fn fixed_step(mut self) -> Self {
        self.adaptive = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) {
            return Err(invalid(format!("dt0 = {} must be positive", self.dt0)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid(format!("t_end = {} must be non-negative", self.t_end)));
        }
        if self.stride == 0 {
            return Err(invalid("observer stride must be at least 1"));
        }
        Ok(())
    }
}

/// Relative size of `Q < 0` that counts as observed.
const NEGATIVE_Q_TOL: f64 = 1e-8;

pub fn split_step_evolve(phi: &WaveField, opts: &EvolveOptions) -> Result<(RunOutcome, ObservableSeries)> {
    split_step_evolve_with(phi, opts, |_, _| Ok(()))
}

/// As [`split_step_evolve`], calling `observe` with the field at every record.
pub fn split_step_evolve_with(
    phi: &WaveField,
    opts: &EvolveOptions,
    mut observe: impl FnMut(&WaveField, &ObservableRecord) -> Result<()>,
) -> Result<(RunOutcome, ObservableSeries)> {
    opts.validate()?;
    phi.ensure_finite()?;
    phi.params.validate_dynamics()?;
    let params = phi.params;
    let grid = phi.grid;
    let spectral = if opts.fast_transforms {
        Spectral::fast(&grid)
    } else {
        Spectral::new(&grid)
    };
    let tables = GridTables::new(&grid);
    let k2 = &tables.k2;
    let (alpha, lambda) = (params.alpha, params.lambda);

    let mut u = phi.clone();
    let mut uh = u.values.clone();
    spectral.forward(&mut uh);

    let mut series = ObservableSeries::default();
    let first = record(&u, &uh, opts.dt0, &tables)?;
    let g0 = first.grad_sq;
    let mut negative_q = first.q < -NEGATIVE_Q_TOL * first.grad_sq;
    observe(&u, &first)?;
    series.push(first)?;

    let mut kick = vec![Complex64::new(1.0, 0.0); grid.len()];
    let mut kick_dt = f64::NAN;
    let mut steps = 0usize;
    let mut t = phi.time;
    let t_stop = phi.time + opts.t_end;
    let mut since_record = 0usize;

    let finish = |status, u: WaveField, reason: Option<String>, blow, negative_q, steps| RunOutcome {
        status,
        blow_up_time: blow,
        reason,
        negative_q_seen: negative_q,
        final_field: u,
        steps,
    };

    while t < t_stop * (1.0 - 1e-15) {
        let g = if opts.adaptive {
            spectral_grad_sq(&uh, k2, grid.cell_volume())
        } else {
            g0
        };
        let mut dt = if opts.adaptive && g > g0 { ladder_step(opts.dt0, g0 / g) } else { opts.dt0 };
        let stop = if dt < opts.dt_floor {
            Some(format!("time step fell below {:e}", opts.dt_floor))
        } else {
            opts.max_steps
                .filter(|&m| steps >= m)
                .map(|m| format!("step budget of {m} exhausted at t = {t}"))
        };
        if let Some(reason) = stop {
            u.values = uh.clone();
            spectral.inverse(&mut u.values);
            u.time = t;
            return Ok((finish(RunStatus::Undecided, u, Some(reason), None, negative_q, steps), series));
        }
        if t + dt > t_stop {
            dt = t_stop - t;
        }
        if dt != kick_dt {
            for (m, k) in kick.iter_mut().zip(k2) {
                *m = Complex64::from_polar(1.0, -k * dt / 2.0);
            }
            kick_dt = dt;
        }

        uh.iter_mut().zip(&kick).for_each(|(v, m)| *v *= m);
        spectral.inverse(&mut uh);
        if lambda != 0.0 {
            for v in uh.iter_mut() {
                let (sin, cos) = (lambda * modulus_pow(v.norm_sqr(), alpha) * dt).sin_cos();
                *v *= Complex64::new(cos, sin);
            }
        }
        spectral.forward(&mut uh);
        uh.iter_mut().zip(&kick).for_each(|(v, m)| *v *= m);
        t += dt;
        steps += 1;
        since_record += 1;

        let at_end = t >= t_stop * (1.0 - 1e-15);
        if since_record < opts.stride && !at_end {
            continue;
        }
        since_record = 0;

        u.values.copy_from_slice(&uh);
        spectral.inverse(&mut u.values);
        u.time = t;
        if u.ensure_finite().is_err() {
            // the detector would already have fired at the previous record
            return Ok((
                finish(RunStatus::Undecided, u, Some("numerical overflow".into()), None, negative_q, steps),
                series,
            ));
        }
        let rec = record(&u, &uh, dt, &tables)?;
        negative_q |= rec.q < -NEGATIVE_Q_TOL * rec.grad_sq;
        observe(&u, &rec)?;
        series.push(rec)?;

        let leak = u.boundary_mass_fraction(opts.boundary_fraction);
        if leak > opts.boundary_tol {
            return Ok((
                finish(
                    RunStatus::DiagnosticsViolated,
                    u,
                    Some(format!("boundary mass fraction {leak:e}")),
                    None,
                    negative_q,
                    steps,
                ),
                series,
            ));
        }
        if opts.detect {
            let verdict = blow_up_detector(&u, &series, &opts.detector);
            if verdict.fired {
                return Ok((
                    finish(RunStatus::BlowUpDetected, u, None, verdict.blow_up_time, negative_q, steps),
                    series,
                ));
            }
        }
    }

    u.values.copy_from_slice(&uh);
    spectral.inverse(&mut u.values);
    u.time = t;
    let (status, reason) = if negative_q {
        (RunStatus::Undecided, Some("Q < 0 was observed without a detector firing".to_string()))
    } else {
        (RunStatus::GlobalOnWindow, None)
    };
    Ok((finish(status, u, reason, None, negative_q, steps), series))
}

/// Rungs per octave of the adaptive step ladder.
const LADDER_RUNGS: f64 = 32.0;

/// `dt0·ratio` rounded down to the ladder `dt0·2^{-j/32}`, so the cached
/// kinetic multipliers survive many consecutive steps.
fn ladder_step(dt0: f64, ratio: f64) -> f64 {
    let rung = (-ratio.log2() * LADDER_RUNGS).ceil();
    dt0 * (-rung / LADDER_RUNGS).exp2()
}

fn spectral_grad_sq(uh: &[Complex64], k2: &[f64], cell: f64) -> f64 {
    let total = uh.len() as f64;
    uh.iter().zip(k2).map(|(v, k)| k * v.norm_sqr()).sum::<f64>() * cell / total
}

fn record(u: &WaveField, uh: &[Complex64], dt: f64, tables: &GridTables) -> Result<ObservableRecord> {
    let params = &u.params;
    let norms = field_norms_with_spectrum(u, uh, &[params.alpha + 2.0], true, tables);
    Ok(ObservableRecord {
        t: u.time,
        mass: norms.mass,
        energy: energy_from_norms(&norms, params)?,
        grad_sq: norms.grad_sq,
        variance: norms.variance.unwrap_or(f64::NAN),
        q: constraint_from_norms(&norms, params)?,
        s: action_from_norms(&norms, params)?,
        dt,
    })
}
