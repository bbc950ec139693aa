use num_complex::Complex64;

use super::grid::{CartesianGrid, RadialGrid};
use super::quadrature::cubic_uniform;
use crate::error::{invalid, Result};
use crate::params::ModelParams;

/// Real radial profile `f(|x|)` sampled on a [`RadialGrid`], living in `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub dim: usize,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>, dim: usize) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "profile has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("profile dimension {dim} not in 1..=3")));
        }
        Ok(RadialProfile { grid, values, dim })
    }

    pub fn from_fn(grid: RadialGrid, dim: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values, dim)
    }

    pub fn zeros(grid: RadialGrid, dim: usize) -> Result<Self> {
        Self::new(grid, vec![0.0; grid.len()], dim)
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if let Some(j) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite profile value at node {j}")));
        }
        Ok(())
    }

    /// Cubic interpolation at radius `r` (even extension through the origin, 0 beyond `r_max`).
    pub fn eval(&self, r: f64) -> f64 {
        cubic_uniform(&self.values, self.grid.dr(), r.abs(), true)
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scale_values(&self, factor: f64) -> Self {
        RadialProfile {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Resample onto another radial grid.
    pub fn resample(&self, grid: RadialGrid) -> Self {
        RadialProfile {
            values: grid.nodes().map(|r| self.eval(r)).collect(),
            grid,
            dim: self.dim,
        }
    }
}

/// Complex field on a periodic Cartesian box, stamped with time and model parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveField {
    pub grid: CartesianGrid,
    pub values: Vec<Complex64>,
    pub time: f64,
    pub params: ModelParams,
}

impl WaveField {
    pub fn new(grid: CartesianGrid, values: Vec<Complex64>, time: f64, params: ModelParams) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} values for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if params.dim != grid.dim() {
            return Err(invalid(format!(
                "params dimension {} does not match grid dimension {}",
                params.dim,
                grid.dim()
            )));
        }
        Ok(WaveField {
            grid,
            values,
            time,
            params,
        })
    }

    pub fn zeros(grid: CartesianGrid, params: ModelParams) -> Result<Self> {
        Self::new(grid, vec![Complex64::new(0.0, 0.0); grid.len()], 0.0, params)
    }

    /// Samples a real function of position (`x` has `dim` entries).
    pub fn from_real_fn(grid: CartesianGrid, params: ModelParams, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, params, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_fn(grid: CartesianGrid, params: ModelParams, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let axis = grid.axis();
        let values = match grid.dim() {
            1 => axis.iter().map(|&x| f(&[x])).collect(),
            _ => {
                let mut v = Vec::with_capacity(grid.len());
                for &x in &axis {
                    for &y in &axis {
                        v.push(f(&[x, y]));
                    }
                }
                v
            }
        };
        Self::new(grid, values, 0.0, params)
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if let Some(j) = self.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid(format!("non-finite field value at index {j}")));
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        WaveField {
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        WaveField {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn with_params(mut self, params: ModelParams) -> Self {
        self.params = params;
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    /// Mass in the outer `fraction` of the box relative to the total mass.
    pub fn boundary_mass_fraction(&self, fraction: f64) -> f64 {
        let mask = self.grid.boundary_mask(fraction);
        let mut edge = 0.0;
        let mut total = 0.0;
        for (v, m) in self.values.iter().zip(&mask) {
            let d = v.norm_sqr();
            total += d;
            if *m {
                edge += d;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            edge / total
        }
    }

    /// Largest pointwise difference.
    pub fn sup_distance(&self, other: &WaveField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()))
    }
}
