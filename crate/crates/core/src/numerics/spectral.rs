use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner, FftPlannerScalar};

use super::grid::CartesianGrid;

/// Forward/inverse FFT on a 1-D or 2-D periodic grid (row-major storage).
#[derive(Clone)]
pub struct Spectral {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    /// Portable scalar transforms: bit-identical across CPUs, and their
    /// roundoff leaves `‖u‖²` far better conserved over many round trips.
    pub fn new(grid: &CartesianGrid) -> Self {
        let mut planner = FftPlannerScalar::new();
        Self::from_plans(grid, planner.plan_fft_forward(grid.points_per_axis()), planner.plan_fft_inverse(grid.points_per_axis()))
    }

    /// SIMD transforms when the CPU supports them, roughly twice as fast on
    /// large grids.
    pub fn fast(grid: &CartesianGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self::from_plans(grid, planner.plan_fft_forward(grid.points_per_axis()), planner.plan_fft_inverse(grid.points_per_axis()))
    }

    fn from_plans(grid: &CartesianGrid, forward: Arc<dyn Fft<f64>>, inverse: Arc<dyn Fft<f64>>) -> Self {
        Spectral {
            n: grid.points_per_axis(),
            dim: grid.dim(),
            forward,
            inverse,
        }
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.apply(&self.forward, buf);
    }

    /// Inverse transform in place, normalized so that `inverse(forward(u)) = u`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.apply(&self.inverse, buf);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    fn apply(&self, plan: &Arc<dyn Fft<f64>>, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n.pow(self.dim as u32));
        plan.process(buf);
        if self.dim == 2 {
            transpose(buf, self.n);
            plan.process(buf);
            transpose(buf, self.n);
        }
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}
