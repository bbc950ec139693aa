//! The sharp Gagliardo–Nirenberg constant: closed form in terms of `‖R‖_{L²}`
//! and an independent numerical minimization of the Weinstein quotient.

use num_complex::Complex64;

use super::dilation::dilate_field;
use super::{functional_norms, weinstein_from_norms};
use crate::error::{invalid, Error, Result};
use crate::initial_data::embed_radial;
use crate::numerics::{schwarz_rearrange, CartesianGrid, NormSet, Spectral, WaveField};
use crate::params::ModelParams;

/// `C* = 2(α+2)/(Nα) · ((4-α(N-2))/(Nα))^{(Nα-4)/4} · ‖R‖^{-α}`.
pub fn gn_constant_formula(params: &ModelParams, r_l2: f64) -> Result<f64> {
    params.validate()?;
    if !(r_l2 > 0.0 && r_l2.is_finite()) {
        return Err(invalid(format!("‖R‖ = {r_l2} must be positive")));
    }
    let (na, d, k) = (params.n_alpha(), params.energy_gap(), params.supercritical_gap());
    let alpha = params.alpha;
    let log_c = (2.0 * (alpha + 2.0) / na).ln() + k / 4.0 * (d / na).ln() - alpha * r_l2.ln();
    Ok(log_c.exp())
}

#[derive(Clone, Debug)]
pub struct GnOptions {
    pub grid: CartesianGrid,
    /// Relaxation of the preconditioned gradient step.
    pub tau: f64,
    /// Stop when the relative change of `J` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting field; a centered Gaussian when absent.
    pub initial: Option<WaveField>,
}

impl GnOptions {
    pub fn new(grid: CartesianGrid) -> Self {
        GnOptions {
            grid,
            tau: 0.5,
            tol: 1e-10,
            max_iter: 100_000,
            initial: None,
        }
    }

    /// Box large enough for the normalized minimizer in one or two dimensions.
    pub fn default_for(dim: usize) -> Result<Self> {
        let grid = match dim {
            1 => CartesianGrid::new(1, 30.0, 1024)?,
            2 => CartesianGrid::new(2, 24.0, 256)?,
            _ => return Err(invalid(format!("minimization runs on 1-D or 2-D boxes, not {dim}-D"))),
        };
        Ok(Self::new(grid))
    }
}

#[derive(Clone, Debug)]
pub struct GnReport {
    /// `1/J` at the final iterate.
    pub c_star: f64,
    pub j: f64,
    pub iterations: usize,
    /// Steps whose symmetrized iterate was kept.
    pub rearrangements_accepted: usize,
    pub field: WaveField,
}

/// Minimizes `J` over real fields normalized to `‖v‖ = ‖∇v‖ = 1`.
///
/// Each iteration takes a Sobolev-preconditioned gradient step on `log J`,
/// replaces the iterate by its Schwarz symmetrization when that does not
/// increase `J`, and restores the normalization by an amplitude change and a
/// dilation. Returns `C* ≈ 1/J`.
pub fn gn_constant_minimize(params: &ModelParams, opts: &GnOptions) -> Result<GnReport> {
    params.validate()?;
    let grid = opts.grid;
    if grid.dim() != params.dim {
        return Err(invalid(format!(
            "grid dimension {} does not match N = {}",
            grid.dim(),
            params.dim
        )));
    }
    if !(opts.tau > 0.0 && opts.tau <= 1.0) {
        return Err(invalid(format!("step relaxation {} must lie in (0, 1]", opts.tau)));
    }
    let alpha = params.alpha;
    let spectral = Spectral::new(&grid);
    let c1 = params.energy_gap() / 2.0;
    let c2 = params.n_alpha() / 2.0;
    let symbol: Vec<f64> = grid.k_squared().iter().map(|k2| c1 + c2 * k2).collect();

    let start = match &opts.initial {
        Some(f) => f.clone().with_params(*params),
        None => WaveField::from_real_fn(grid, *params, |x| {
            (-x.iter().map(|c| c * c).sum::<f64>() / 2.0).exp()
        })?,
    };
    let (mut field, mut norms) = normalize(&start, params)?;
    let mut j = weinstein_from_norms(&norms, params)?;
    let mut accepted = 0;

    for iter in 1..=opts.max_iter {
        let pot = norms.lp(alpha + 2.0).unwrap_or(f64::NAN);
        let mut buf: Vec<Complex64> = field
            .values
            .iter()
            .map(|v| Complex64::new((alpha + 2.0) / pot * v.re.abs().powf(alpha) * v.re, 0.0))
            .collect();
        spectral.forward(&mut buf);
        buf.iter_mut().zip(&symbol).for_each(|(b, m)| *b /= m);
        spectral.inverse(&mut buf);
        let stepped: Vec<Complex64> = field
            .values
            .iter()
            .zip(&buf)
            .map(|(v, w)| Complex64::new((1.0 - opts.tau) * v.re + opts.tau * w.re, 0.0))
            .collect();
        let stepped = WaveField::new(grid, stepped, 0.0, *params)?;
        let mut cand_j = weinstein_from_norms(&functional_norms(&stepped, params)?, params)?;
        let mut candidate = stepped;
        if let Some((sym, sym_j)) = symmetrized(&candidate, params) {
            if sym_j <= cand_j {
                candidate = sym;
                cand_j = sym_j;
                accepted += 1;
            }
        }

        let (next, next_norms) = normalize(&candidate, params)?;
        let next_j = weinstein_from_norms(&next_norms, params)?;
        if !next_j.is_finite() {
            return Err(Error::ConvergenceFailure("Weinstein quotient became non-finite".into()));
        }
        let change = (next_j - j).abs() / j;
        debug_assert!((next_j / cand_j - 1.0).abs() < 1e-6);
        field = next;
        norms = next_norms;
        j = next_j;
        if change < opts.tol {
            return Ok(GnReport {
                c_star: 1.0 / j,
                j,
                iterations: iter,
                rearrangements_accepted: accepted,
                field,
            });
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "Weinstein minimization did not converge in {} iterations",
        opts.max_iter
    )))
}

/// Symmetrized iterate with its `J`, if it fits the box.
fn symmetrized(field: &WaveField, params: &ModelParams) -> Option<(WaveField, f64)> {
    let profile = schwarz_rearrange(field).ok()?;
    let sym = embed_radial(&profile, &field.grid, *params).ok()?;
    let j = weinstein_from_norms(&functional_norms(&sym, params).ok()?, params).ok()?;
    Some((sym, j))
}

/// Rescales to unit mass, then dilates to unit gradient norm.
fn normalize(field: &WaveField, params: &ModelParams) -> Result<(WaveField, NormSet)> {
    let norms = functional_norms(field, params)?;
    if !(norms.mass > 0.0 && norms.grad_sq > 0.0) {
        return Err(invalid("cannot normalize the zero field"));
    }
    let amp = 1.0 / norms.mass.sqrt();
    let beta = (norms.mass / norms.grad_sq).sqrt();
    let scaled = field.scale(amp);
    let out = if (beta - 1.0).abs() < 1e-14 {
        scaled
    } else {
        dilate_field(beta, &scaled)?
    };
    let norms = functional_norms(&out, params)?;
    Ok((out, norms))
}
