use super::field::{RadialProfile, WaveField};
use super::grid::unit_sphere_area;
use super::quadrature::{derivative4, simpson_weights};
use super::spectral::Spectral;
use crate::error::{invalid, Result};

/// Integral norms of a field: `mass = ‖f‖²_{L²}`, `grad_sq = ‖∇f‖²_{L²}`,
/// `‖f‖^p_{L^p}` for each requested `p`, and optionally `‖x f‖²_{L²}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSet {
    pub mass: f64,
    pub grad_sq: f64,
    pub lp: Vec<(f64, f64)>,
    pub variance: Option<f64>,
}

impl NormSet {
    /// `‖f‖^p_{L^p}` if `p` was requested.
    pub fn lp(&self, p: f64) -> Option<f64> {
        self.lp.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }

    pub fn l2(&self) -> f64 {
        self.mass.sqrt()
    }

    pub fn grad_l2(&self) -> f64 {
        self.grad_sq.sqrt()
    }
}

/// Anything whose integral norms can be evaluated.
pub trait Normed {
    fn dim(&self) -> usize;
    fn norm_set(&self, exponents: &[f64]) -> Result<NormSet>;
}

impl Normed for RadialProfile {
    fn dim(&self) -> usize {
        self.dim
    }

    fn norm_set(&self, exponents: &[f64]) -> Result<NormSet> {
        radial_norms(self, exponents)
    }
}

impl Normed for WaveField {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn norm_set(&self, exponents: &[f64]) -> Result<NormSet> {
        field_norms(self, exponents, false)
    }
}

fn check_exponents(exponents: &[f64]) -> Result<()> {
    if let Some(p) = exponents.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(invalid(format!("L^p exponent {p} must be positive")));
    }
    Ok(())
}

/// Norms of a radial profile by Simpson quadrature against `|S^{N-1}| r^{N-1} dr`,
/// with a fourth-order finite-difference derivative.
pub fn radial_norms(profile: &RadialProfile, exponents: &[f64]) -> Result<NormSet> {
    profile.ensure_finite()?;
    check_exponents(exponents)?;
    let dim = profile.dim;
    let h = profile.grid.dr();
    let area = unit_sphere_area(dim);
    let weights: Vec<f64> = simpson_weights(profile.grid.len(), h)
        .into_iter()
        .zip(profile.grid.nodes())
        .map(|(w, r)| area * w * r.powi(dim as i32 - 1))
        .collect();
    let integrate = |g: &dyn Fn(usize) -> f64| -> f64 { weights.iter().enumerate().map(|(j, w)| w * g(j)).sum() };
    let f = &profile.values;
    let df = derivative4(f, h);
    let mass = integrate(&|j| f[j] * f[j]);
    let grad_sq = integrate(&|j| df[j] * df[j]);
    let lp = exponents
        .iter()
        .map(|&p| (p, integrate(&|j| f[j].abs().powf(p))))
        .collect();
    Ok(NormSet {
        mass,
        grad_sq,
        lp,
        variance: None,
    })
}

/// Norms of a Cartesian field: trapezoid sums for mass/L^p/variance and
/// Parseval with `|k|²` for the gradient.
pub fn field_norms(field: &WaveField, exponents: &[f64], with_variance: bool) -> Result<NormSet> {
    field.ensure_finite()?;
    check_exponents(exponents)?;
    let spectral = Spectral::new(&field.grid);
    let mut hat = field.values.clone();
    spectral.forward(&mut hat);
    Ok(field_norms_with_spectrum(field, &hat, exponents, with_variance, &GridTables::new(&field.grid)))
}

/// `|v|^p` from `|v|²`, exact integer powers when `p/2` is an integer.
pub(crate) fn modulus_pow(sq: f64, p: f64) -> f64 {
    let half = p / 2.0;
    if half.fract() == 0.0 && (1.0..=16.0).contains(&half) {
        sq.powi(half as i32)
    } else {
        sq.powf(half)
    }
}

/// `|k|²` and `|x|²` tables of a grid, reused across repeated norm evaluations.
pub(crate) struct GridTables {
    pub k2: Vec<f64>,
    pub r2: Vec<f64>,
}

impl GridTables {
    pub fn new(grid: &crate::numerics::CartesianGrid) -> Self {
        GridTables {
            k2: grid.k_squared(),
            r2: grid.r_squared(),
        }
    }
}

/// Same as [`field_norms`] when the forward transform is already available.
pub(crate) fn field_norms_with_spectrum(
    field: &WaveField,
    hat: &[num_complex::Complex64],
    exponents: &[f64],
    with_variance: bool,
    tables: &GridTables,
) -> NormSet {
    let cell = field.grid.cell_volume();
    let total = field.grid.len() as f64;
    let sq: Vec<f64> = field.values.iter().map(|v| v.norm_sqr()).collect();
    let mass = cell * sq.iter().sum::<f64>();
    let grad_sq = cell / total * tables.k2.iter().zip(hat).map(|(k, v)| k * v.norm_sqr()).sum::<f64>();
    let lp = exponents
        .iter()
        .map(|&p| (p, cell * sq.iter().map(|&s| modulus_pow(s, p)).sum::<f64>()))
        .collect();
    let variance = with_variance.then(|| cell * tables.r2.iter().zip(&sq).map(|(r2, s)| r2 * s).sum::<f64>());
    NormSet {
        mass,
        grad_sq,
        lp,
        variance,
    }
}
