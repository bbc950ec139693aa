use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nls_lab::evolution::{split_step_evolve_with, EvolveOptions};
use nls_lab::functionals::{gn_constant_formula, gn_constant_minimize, GnOptions};
use nls_lab::ground_state::{default_radial_grid, pohozaev_residuals};
use nls_lab::harness::sweep::{build_datum, sweep_context};
use nls_lab::harness::verify::GN_TOL;
use nls_lab::harness::{
    ground_state, load_checkpoint, run_sweep, run_verify, save_checkpoint, threshold_plot_svg, write_profile_csv, write_thresholds_csv,
    ConfigMap, DatumFamily, GroundStateCache, LogRange, SweepConfig, VerifyOptions,
};
use nls_lab::initial_data::{auto_half_width, embed_radial};
use nls_lab::numerics::CartesianGrid;
use nls_lab::{Error, Result};

/// Ground states, sharp constants, thresholds and split-step runs for the
/// focusing nonlinear Schrödinger equation `i u_t + Δu + λ|u|^α u = 0`.
#[derive(Parser, Debug)]
#[command(name = "nlslab", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Space dimension N.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Nonlinearity exponent α.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Coupling λ > 0.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Frequency ω > 0.
    #[arg(long, global = true)]
    omega: Option<f64>,
    /// `key = value` file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use bit-reproducible transforms.
    #[arg(long, global = true)]
    reproducible: bool,
    /// Ground-state cache directory.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the ground state; writes ground_state.csv and ground_state.nlsf.
    GroundState {
        /// Points per axis of the Cartesian checkpoint.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Tabulate γ*, r*, ρ*; writes thresholds.csv and thresholds.svg.
    Thresholds {
        #[arg(long)]
        a_min: Option<f64>,
        #[arg(long)]
        a_max: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Compare the minimized sharp Gagliardo–Nirenberg constant with its closed form.
    GnConstant,
    /// Evolve one datum; writes series.csv and final.nlsf.
    Evolve {
        /// ‖φ‖_{L²}.
        #[arg(long)]
        a: Option<f64>,
        /// ‖∇φ‖_{L²}.
        #[arg(long)]
        b: Option<f64>,
        /// phi_ab or gaussian.
        #[arg(long)]
        family: Option<DatumFamily>,
        /// Length of the run, added to the start time.
        #[arg(long)]
        t_end: Option<f64>,
        /// Initial (and largest) time step.
        #[arg(long)]
        dt: Option<f64>,
        /// Grid points per axis.
        #[arg(long)]
        points: Option<usize>,
        /// Record observables every this many steps.
        #[arg(long)]
        stride: Option<usize>,
        /// Box half-width for Gaussian data.
        #[arg(long)]
        half_width: Option<f64>,
        /// Stop as undecided after this many steps.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Start from a checkpoint instead of building a datum.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Overwrite checkpoint.nlsf every this many records.
        #[arg(long)]
        checkpoint_every: Option<usize>,
    },
    /// Sweep the (a, b) plane; writes sweep.csv and sweep.svg.
    Sweep {
        /// Worker threads; the output does not depend on it.
        #[arg(long)]
        parallelism: Option<usize>,
    },
    /// Run the verification suite; exits 1 on any failed check.
    Verify {
        /// Multiply the ground state by this factor before the Pohozaev check.
        #[arg(long)]
        perturb: Option<f64>,
        /// Length of the bootstrap run in units of 1/ω.
        #[arg(long)]
        bootstrap_t_end: Option<f64>,
    },
}

enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("nlslab: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidInput(_) => 2,
                _ => 1,
            })
        }
    }
}

fn set<T: ToString>(map: &mut ConfigMap, key: &str, v: Option<T>) {
    if let Some(v) = v {
        map.set(key, v);
    }
}

fn out_dir(map: &ConfigMap) -> Result<PathBuf> {
    let dir: PathBuf = map.get_or("out", PathBuf::from("."))?;
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> Result<Outcome> {
    let c = cli.common;
    let mut map = match &c.config {
        Some(p) => ConfigMap::load(p)?,
        None => ConfigMap::default(),
    };
    set(&mut map, "dim", c.dim);
    set(&mut map, "alpha", c.alpha);
    set(&mut map, "lambda", c.lambda);
    set(&mut map, "omega", c.omega);
    set(&mut map, "out", c.out.as_ref().map(|p| p.display()));
    set(&mut map, "cache_dir", c.cache_dir.as_ref().map(|p| p.display()));
    if c.reproducible {
        map.set("reproducible", true);
    }
    let params = map.params()?;
    let cache: Option<GroundStateCache> = map.get::<PathBuf>("cache_dir")?.map(GroundStateCache::new);

    match cli.command {
        Command::GroundState { points } => {
            set(&mut map, "points", points);
            let gs = ground_state(&params, &default_radial_grid(params.omega)?, cache.as_ref())?;
            let dir = out_dir(&map)?;
            write_profile_csv(&gs.profile, create(&dir.join("ground_state.csv"))?)?;
            let n = map.get_or("points", 4096usize)?;
            if params.dim <= 2 {
                let grid = CartesianGrid::new(params.dim, auto_half_width(&gs.profile), n)?;
                save_checkpoint(&embed_radial(&gs.profile, &grid, params)?, &dir.join("ground_state.nlsf"))?;
            }
            let res = pohozaev_residuals(&gs);
            println!("peak Φ(0)        {:.15}", gs.peak());
            println!("‖Φ‖²             {:.15}", gs.norms.mass);
            println!("‖∇Φ‖²            {:.15}", gs.norms.grad_sq);
            println!("Pohozaev (max)   {:.3e}", res.max());
            println!("wrote {}", dir.display());
            Ok(Outcome::Ok)
        }
        Command::Thresholds { a_min, a_max, count } => {
            set(&mut map, "a_min", a_min);
            set(&mut map, "a_max", a_max);
            set(&mut map, "a_count", count);
            let range = LogRange::new(
                map.get_or("a_min", 0.1)?,
                map.get_or("a_max", 10.0)?,
                map.get_or("a_count", 50usize)?,
            )?;
            let (_, ts) = sweep_context(&params, cache.as_ref())?;
            let dir = out_dir(&map)?;
            write_thresholds_csv(&ts, &range, create(&dir.join("thresholds.csv"))?)?;
            fs::write(dir.join("thresholds.svg"), threshold_plot_svg(&ts, &range, &[])?)?;
            println!("‖R‖ = {:.15}, C* = {:.15}", ts.r_l2, ts.c_star);
            println!("wrote {}", dir.display());
            Ok(Outcome::Ok)
        }
        Command::GnConstant => {
            let unit_params = nls_lab::ModelParams::unit(params.dim, params.alpha)?;
            let unit = ground_state(&unit_params, &default_radial_grid(1.0)?, cache.as_ref())?;
            let formula = gn_constant_formula(&params, unit.l2())?;
            println!("closed form  C* = {formula:.12}");
            if params.dim > 2 {
                println!("minimization runs on 1D and 2D grids only");
                return Ok(Outcome::Ok);
            }
            let report = gn_constant_minimize(&params, &GnOptions::default_for(params.dim)?)?;
            let rel = (report.c_star / formula - 1.0).abs();
            println!("minimized    C* = {:.12} ({} iterations)", report.c_star, report.iterations);
            println!("relative difference {rel:.3e}");
            Ok(if rel < GN_TOL { Outcome::Ok } else { Outcome::Failed })
        }
        Command::Evolve { a, b, family, t_end, dt, points, stride, half_width, max_steps, from, checkpoint_every } => {
            set(&mut map, "a_min", a);
            set(&mut map, "b_min", b);
            set(&mut map, "family", family);
            set(&mut map, "t_end", t_end);
            set(&mut map, "dt", dt);
            set(&mut map, "points", points);
            set(&mut map, "stride", stride);
            set(&mut map, "half_width", half_width);
            set(&mut map, "max_steps", max_steps);
            let datum = match from {
                Some(path) => load_checkpoint(&path)?,
                None => {
                    if !map.contains("a_min") || !map.contains("b_min") {
                        return Err(Error::Config("evolve needs --a and --b (or --from)".into()));
                    }
                    let cfg = SweepConfig::from_map(&map)?;
                    let (unit, ts) = sweep_context(&params, cache.as_ref())?;
                    let (fam, datum) = build_datum(cfg.a_range.lo, cfg.b_range.lo, &cfg, &unit, &ts)?;
                    println!("datum {fam} on [-{}, {}]^{} with {} points per axis", datum.grid.half_width(), datum.grid.half_width(), datum.grid.dim(), datum.grid.points_per_axis());
                    datum
                }
            };
            let mut opts = EvolveOptions::new(map.get_or("t_end", 1.0)?, map.get_or("dt", 1e-3)?, map.get_or("stride", 10usize)?);
            opts.fast_transforms = !map.get_or("reproducible", false)?;
            opts.max_steps = map.get("max_steps")?;
            let dir = out_dir(&map)?;
            let every = checkpoint_every.unwrap_or(0);
            let ckpt = dir.join("checkpoint.nlsf");
            let mut seen = 0usize;
            let (out, series) = split_step_evolve_with(&datum, &opts, |u, _| {
                seen += 1;
                if every > 0 && seen % every == 0 {
                    save_checkpoint(u, &ckpt)?;
                }
                Ok(())
            })?;
            series.write_csv(create(&dir.join("series.csv"))?)?;
            save_checkpoint(&out.final_field, &dir.join("final.nlsf"))?;
            println!("status        {}", out.status.as_str());
            if let Some(t) = out.blow_up_time {
                println!("blow-up time  {t:.6}");
            }
            if let Some(r) = &out.reason {
                println!("reason        {r}");
            }
            println!("final time    {} after {} steps", out.final_field.time, out.steps);
            println!("wrote {}", dir.display());
            Ok(Outcome::Ok)
        }
        Command::Sweep { parallelism } => {
            set(&mut map, "parallelism", parallelism);
            let cfg = SweepConfig::from_map(&map)?;
            let result = run_sweep(&cfg)?;
            fs::create_dir_all(&cfg.out_dir)?;
            result.write_csv(create(&cfg.out_dir.join("sweep.csv"))?)?;
            fs::write(cfg.out_dir.join("sweep.svg"), threshold_plot_svg(&result.thresholds, &cfg.b_range, &result.markers())?)?;
            for p in &result.points {
                println!("a = {:<10.4} b = {:<10.4} {:<22} {}", p.a, p.b, p.label.as_str(), p.status.as_str());
            }
            println!("wrote {}", cfg.out_dir.display());
            Ok(Outcome::Ok)
        }
        Command::Verify { perturb, bootstrap_t_end } => {
            let defaults = VerifyOptions::default();
            let opts = VerifyOptions {
                ground_state_scale: perturb.unwrap_or(defaults.ground_state_scale),
                bootstrap_t_end: bootstrap_t_end.unwrap_or(defaults.bootstrap_t_end),
                cache_dir: map.get("cache_dir")?,
            };
            let report = run_verify(&params, &opts);
            println!("{report}");
            Ok(if report.passed() { Outcome::Ok } else { Outcome::Failed })
        }
    }
}
