//! Grids, quadrature, norms and rearrangement shared by every other module.

pub mod field;
pub mod grid;
pub mod norms;
pub mod quadrature;
pub mod rearrange;
pub mod spectral;

pub use field::{RadialProfile, WaveField};
pub use grid::{unit_sphere_area, CartesianGrid, RadialGrid};
pub use norms::{field_norms, radial_norms, NormSet, Normed};
pub use rearrange::schwarz_rearrange;
pub use spectral::Spectral;
