//! Sweeps over the `(a, b) = (‖φ‖, ‖∇φ‖)` plane: theoretical label versus
//! the outcome of an actual run at every grid point.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{split_step_evolve, EvolveOptions, RunStatus};
use crate::functionals::{energy_from_norms, functional_norms, EnergySign, RegionLabel, ThresholdSet, ThresholdTriple};
use crate::ground_state::{default_radial_grid, GroundState};
use crate::initial_data::{gaussian_with_norms, make_phi_ab, BoxChoice};
use crate::numerics::{CartesianGrid, WaveField};
use crate::params::ModelParams;

use super::cache::{ground_state, GroundStateCache};
use super::config::{DatumFamily, SweepConfig};
use super::output::PlotMarker;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub a: f64,
    pub b: f64,
    pub thresholds: ThresholdTriple,
    pub label: RegionLabel,
    /// Family of the datum actually evolved.
    pub family: DatumFamily,
    /// `E(φ)` at construction, when the datum was built.
    pub energy: Option<f64>,
    pub status: RunStatus,
    pub blow_up_time: Option<f64>,
    pub negative_q_seen: bool,
    pub steps: usize,
    pub reason: Option<String>,
}

impl SweepPoint {
    /// `a/γ*(b) - 1`: positive above the global curve.
    pub fn margin_gamma(&self) -> f64 {
        self.a / self.thresholds.gamma - 1.0
    }

    /// `a/r*(b) - 1`: positive in the blow-up-constructible region.
    pub fn margin_r(&self) -> f64 {
        self.a / self.thresholds.r - 1.0
    }

    pub fn energy_sign(&self) -> Option<EnergySign> {
        self.energy.map(|e| {
            if e == 0.0 {
                EnergySign::Zero
            } else if e < 0.0 {
                EnergySign::Negative
            } else {
                EnergySign::Positive
            }
        })
    }
}

/// Row-major over `a` (outer) then `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub thresholds: ThresholdSet,
    pub points: Vec<SweepPoint>,
}

pub const CSV_HEADER: &str = "a,b,gamma_star,r_star,rho_star,label,energy,energy_sign,family,status,blow_up_time,negative_q,steps,margin_gamma,margin_r,reason";

impl SweepResult {
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                p.a,
                p.b,
                p.thresholds.gamma,
                p.thresholds.r,
                p.thresholds.rho,
                p.label.as_str(),
                opt(p.energy),
                p.energy_sign().map(EnergySign::as_str).unwrap_or(""),
                p.family,
                p.status.as_str(),
                opt(p.blow_up_time),
                p.negative_q_seen,
                p.steps,
                p.margin_gamma(),
                p.margin_r(),
                p.reason.as_deref().map(csv_field).unwrap_or_default(),
            )?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn markers(&self) -> Vec<PlotMarker> {
        self.points
            .iter()
            .map(|p| PlotMarker { a: p.a, b: p.b, status: p.status })
            .collect()
    }
}

/// Keeps a free-text reason on one CSV cell.
fn csv_field(s: &str) -> String {
    s.chars().map(|c| if matches!(c, ',' | '\n' | '\r' | '"') { ';' } else { c }).collect()
}

/// Unit ground state and threshold set for `params`.
pub fn sweep_context(params: &ModelParams, cache: Option<&GroundStateCache>) -> Result<(GroundState, ThresholdSet)> {
    let unit_params = ModelParams::unit(params.dim, params.alpha)?;
    let unit = ground_state(&unit_params, &default_radial_grid(1.0)?, cache)?;
    let ts = ThresholdSet::from_ground_state(&unit, *params)?;
    Ok((unit, ts))
}

/// Datum for `(a, b)`: `φ_{a,b}` above `r*(b)` for the `phi_ab` family, a
/// norm-prescribed Gaussian otherwise.
pub fn build_datum(a: f64, b: f64, cfg: &SweepConfig, unit: &GroundState, ts: &ThresholdSet) -> Result<(DatumFamily, WaveField)> {
    if cfg.family == DatumFamily::PhiAb && a > ts.evaluate(b)?.r {
        let cert = make_phi_ab(a, b, ts, unit, BoxChoice::Auto { points_per_axis: cfg.points_per_axis })?;
        return Ok((DatumFamily::PhiAb, cert.field));
    }
    let grid = CartesianGrid::new(cfg.params.dim, cfg.gaussian_half_width, cfg.points_per_axis)?;
    Ok((DatumFamily::Gaussian, gaussian_with_norms(a, b, &grid, cfg.params)?))
}

pub fn evolve_options(cfg: &SweepConfig) -> EvolveOptions {
    let mut opts = EvolveOptions::new(cfg.t_end, cfg.dt0, cfg.stride);
    opts.fast_transforms = !cfg.reproducible;
    opts.max_steps = Some(cfg.max_steps);
    opts
}

fn run_point(a: f64, b: f64, cfg: &SweepConfig, unit: &GroundState, ts: &ThresholdSet) -> Result<SweepPoint> {
    let thresholds = ts.evaluate(b)?;
    let label = ts.classify(a, b)?;
    let mut point = SweepPoint {
        a,
        b,
        thresholds,
        label,
        family: cfg.family,
        energy: None,
        status: RunStatus::Undecided,
        blow_up_time: None,
        negative_q_seen: false,
        steps: 0,
        reason: None,
    };
    let attempt = (|| -> Result<()> {
        let (family, datum) = build_datum(a, b, cfg, unit, ts)?;
        point.family = family;
        point.energy = Some(energy_from_norms(&functional_norms(&datum, &cfg.params)?, &cfg.params)?);
        let (out, _) = split_step_evolve(&datum, &evolve_options(cfg))?;
        point.status = out.status;
        point.blow_up_time = out.blow_up_time;
        point.negative_q_seen = out.negative_q_seen;
        point.steps = out.steps;
        point.reason = out.reason;
        Ok(())
    })();
    if let Err(e) = attempt {
        point.status = RunStatus::Undecided;
        point.reason = Some(e.to_string());
    }
    Ok(point)
}

/// Evolves every grid point on a pool of `cfg.parallelism` workers and
/// returns the points in row-major grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let cache = cfg.cache_dir.as_ref().map(GroundStateCache::new);
    let (unit, ts) = sweep_context(&cfg.params, cache.as_ref())?;
    let grid: Vec<(f64, f64)> = cfg
        .a_range
        .values()
        .into_iter()
        .flat_map(|a| cfg.b_range.values().into_iter().map(move |b| (a, b)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.parallelism)))?;
    let points = pool.install(|| {
        grid.par_iter()
            .map(|&(a, b)| run_point(a, b, cfg, &unit, &ts))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepResult { thresholds: ts, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ConfigMap, LogRange};

    fn small(parallelism: usize) -> SweepConfig {
        let m = ConfigMap::parse(
            "a_min = 0.3\na_max = 3\na_count = 2\nb_min = 0.5\nt_end = 0.01\ndt = 1e-3\nstride = 5\npoints = 256\nhalf_width = 20\nfamily = gaussian\nreproducible = true",
        )
        .unwrap();
        SweepConfig { parallelism, ..SweepConfig::from_map(&m).unwrap() }
    }

    #[test]
    fn points_come_back_in_grid_order() {
        let mut cfg = small(2);
        cfg.b_range = LogRange::new(0.5, 2.0, 2).unwrap();
        let r = run_sweep(&cfg).unwrap();
        let order: Vec<(f64, f64)> = r.points.iter().map(|p| (p.a, p.b)).collect();
        assert_eq!(order, vec![(0.3, 0.5), (0.3, 2.0), (3.0, 0.5), (3.0, 2.0)]);
        for p in &r.points {
            assert_eq!(p.label, r.thresholds.classify(p.a, p.b).unwrap());
            assert_eq!(p.family, DatumFamily::Gaussian);
        }
    }

    #[test]
    fn failed_points_are_recorded_not_fatal() {
        let mut cfg = small(1);
        // a Gaussian cannot fit on a box this small without touching the edge
        cfg.gaussian_half_width = 0.05;
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.points.len(), 2);
        assert!(r.points.iter().all(|p| p.status != RunStatus::GlobalOnWindow));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cols = CSV_HEADER.split(',').count();
        assert!(text.lines().all(|l| l.split(',').count() == cols), "{text}");
    }

    #[test]
    fn reason_is_one_cell() {
        assert_eq!(csv_field("a, b\n\"c\""), "a; b;;c;");
    }
}
