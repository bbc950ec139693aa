//! Numerical laboratory for the focusing supercritical nonlinear Schrödinger
//! equation `i u_t + Δu + λ|u|^α u = 0`: ground states, sharp
//! Gagliardo–Nirenberg constants, explicit global-existence / blow-up
//! thresholds, and split-step verification of the resulting dynamics.

pub mod error;
pub mod evolution;
pub mod functionals;
pub mod ground_state;
pub mod harness;
pub mod initial_data;
pub mod numerics;
pub mod params;

pub use error::{Error, Result};
pub use params::{ModelParams, Regime};
