use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Uniform grid `r_j = j·dr` on `[0, r_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    n_points: usize,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(invalid(format!("r_max = {r_max} must be positive")));
        }
        if n_points < Self::MIN_POINTS {
            return Err(invalid(format!(
                "radial grid needs at least {} points, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(RadialGrid { r_max, n_points })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.r_max / (self.n_points - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dr()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let dr = self.dr();
        (0..self.n_points).map(move |j| j as f64 * dr)
    }

    /// Same node count, radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        RadialGrid::new(self.r_max * factor, self.n_points)
    }
}

/// Periodic box `[-L, L)^dim` with `points_per_axis` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartesianGrid {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl CartesianGrid {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(invalid(format!("cartesian grids support dim 1 or 2, got {dim}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid(format!("half width {half_width} must be positive")));
        }
        if !points_per_axis.is_power_of_two() || points_per_axis < 8 {
            return Err(invalid(format!(
                "points per axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        Ok(CartesianGrid {
            dim,
            half_width,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|i| self.coord(i)).collect()
    }

    /// Angular wave numbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points_per_axis;
        let dk = PI / self.half_width;
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as isize } else { j as isize - n as isize };
                m as f64 * dk
            })
            .collect()
    }

    /// `|k|^2` for every flat index, row-major.
    pub fn k_squared(&self) -> Vec<f64> {
        let k = self.wavenumbers();
        match self.dim {
            1 => k.iter().map(|v| v * v).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for kx in &k {
                    for ky in &k {
                        out.push(kx * kx + ky * ky);
                    }
                }
                out
            }
        }
    }

    /// `|x|^2` for every flat index, measured from the box center.
    pub fn r_squared(&self) -> Vec<f64> {
        let x = self.axis();
        match self.dim {
            1 => x.iter().map(|v| v * v).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for a in &x {
                    for b in &x {
                        out.push(a * a + b * b);
                    }
                }
                out
            }
        }
    }

    /// Flags the nodes in the outer `fraction` of the box along any axis.
    pub fn boundary_mask(&self, fraction: f64) -> Vec<bool> {
        let limit = self.half_width * (1.0 - fraction);
        let near: Vec<bool> = self.axis().iter().map(|x| x.abs() >= limit).collect();
        match self.dim {
            1 => near,
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for a in &near {
                    for b in &near {
                        out.push(*a || *b);
                    }
                }
                out
            }
        }
    }

    /// Radius of the ball whose measure equals the box measure.
    pub fn equal_measure_radius(&self) -> f64 {
        radius_of_measure(self.dim, (2.0 * self.half_width).powi(self.dim as i32))
    }
}

/// Surface area of the unit sphere in `R^N` (`2` for `N = 1`, counting both half-lines).
pub fn unit_sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Measure of the ball of radius `r` in `R^N`.
pub fn ball_measure(dim: usize, r: f64) -> f64 {
    unit_sphere_area(dim) * r.powi(dim as i32) / dim as f64
}

pub fn radius_of_measure(dim: usize, measure: f64) -> f64 {
    (measure * dim as f64 / unit_sphere_area(dim)).powf(1.0 / dim as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_spacing() {
        let g = RadialGrid::new(20.0, 4097).unwrap();
        assert_eq!(g.dr(), 20.0 / 4096.0);
        assert_eq!(g.node(4096), 20.0);
        assert!(RadialGrid::new(1.0, 15).is_err());
        assert!(RadialGrid::new(0.0, 100).is_err());
    }

    #[test]
    fn cartesian_axis_is_symmetric() {
        let g = CartesianGrid::new(1, 10.0, 64).unwrap();
        let x = g.axis();
        assert_eq!(x[0], -10.0);
        assert_eq!(x[32], 0.0);
        for i in 1..32 {
            assert!((x[32 + i] + x[32 - i]).abs() < 1e-13);
        }
        assert!(CartesianGrid::new(1, 1.0, 100).is_err());
        assert!(CartesianGrid::new(3, 1.0, 64).is_err());
    }

    #[test]
    fn wavenumbers_fft_order() {
        let g = CartesianGrid::new(1, PI, 8).unwrap();
        assert_eq!(g.wavenumbers(), vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn measure_radius_roundtrip() {
        for dim in 1..=3 {
            let r = 1.7;
            assert!((radius_of_measure(dim, ball_measure(dim, r)) - r).abs() < 1e-14);
        }
    }
}
