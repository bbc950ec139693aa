//! Configuration, checkpoints, ground-state caching, output writers, plane
//! sweeps and the verification suite behind the `nlslab` command line.

pub mod cache;
pub mod checkpoint;
pub mod config;
pub mod output;
pub mod sweep;
pub mod verify;

pub use cache::{ground_state, GroundStateCache};
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use config::{ConfigMap, DatumFamily, LogRange, SweepConfig};
pub use output::{threshold_plot_svg, write_profile_csv, write_thresholds_csv, PlotMarker};
pub use sweep::{run_sweep, SweepPoint, SweepResult};
pub use verify::{run_verify, CheckResult, CheckStatus, VerifyOptions, VerifyReport};
