use super::ode::integrate;
use super::{is_positive_decreasing, profile_norms, GroundState, Method};
use crate::error::{invalid, Error, Result};
use crate::numerics::quadrature::{derivative4, second_derivative4};
use crate::numerics::{RadialGrid, RadialProfile};
use crate::params::ModelParams;

/// Integration step measured in units of the local oscillation length.
const SUBSTEP: f64 = 0.004;
const BRACKET_REL: f64 = 1e-13;
const AMP_MIN: f64 = 1e-6;
const AMP_MAX: f64 = 1e6;
/// Largest gap between the two bracketing trajectories still trusted as the profile.
const MATCH_TOL: f64 = 1e-10;

/// `r_max = 25/√ω` with 8193 nodes.
pub fn default_radial_grid(omega: f64) -> Result<RadialGrid> {
    RadialGrid::new(25.0 / omega.sqrt(), 8193)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fate {
    /// Crossed zero at this node: amplitude too large.
    Crossed(usize),
    /// Turned upward while positive: amplitude too small.
    TurnedUp(usize),
    /// Reached `r_max` still positive and decreasing.
    Survived,
}

struct Trajectory {
    values: Vec<f64>,
    slopes: Vec<f64>,
    fate: Fate,
}

/// Ground state of `R'' + (N-1)/r R' - ωR + λ|R|^α R = 0`, `R'(0) = 0`, by
/// bisection on `R(0)`.
pub fn solve_shooting(params: &ModelParams, grid: &RadialGrid) -> Result<GroundState> {
    params.validate()?;
    let need = 25.0 / params.omega.sqrt();
    if grid.r_max() < need * (1.0 - 1e-12) {
        return Err(invalid(format!(
            "r_max = {} is below 25/√ω = {need}",
            grid.r_max()
        )));
    }

    let guess = (params.omega * (params.alpha + 2.0) / (2.0 * params.lambda)).powf(1.0 / params.alpha);
    let (mut lo, mut hi, mut lo_traj, mut hi_traj) = bracket(params, grid, guess)?;

    // past the nominal bracket width, keep halving until the midpoint
    // collides with an endpoint; the extra digits push the splice radius out
    let mut refinements = 0;
    loop {
        if hi - lo <= BRACKET_REL * hi {
            refinements += 1;
            if refinements > 16 {
                break;
            }
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let t = shoot(params, grid, mid);
        match t.fate {
            Fate::Crossed(_) => {
                hi = mid;
                hi_traj = t;
            }
            Fate::TurnedUp(_) => {
                lo = mid;
                lo_traj = t;
            }
            Fate::Survived => {
                lo_traj = t;
                hi_traj = shoot(params, grid, mid);
                break;
            }
        }
    }

    let values = splice_tail(params, grid, &lo_traj, &hi_traj)?;
    if !is_positive_decreasing(&values, 0.0) {
        return Err(Error::ConvergenceFailure(
            "shooting profile is not positive and strictly decreasing".into(),
        ));
    }
    let profile = RadialProfile::new(*grid, values, params.dim)?;
    let norms = profile_norms(&profile, params)?;
    let residual_linf = equation_residual(&profile, params);
    Ok(GroundState {
        profile,
        params: *params,
        norms,
        method: Method::Shooting,
        residual_linf,
        field: None,
    })
}

fn bracket(params: &ModelParams, grid: &RadialGrid, guess: f64) -> Result<(f64, f64, Trajectory, Trajectory)> {
    let first = shoot(params, grid, guess);
    let mut amp = guess;
    match first.fate {
        Fate::TurnedUp(_) | Fate::Survived => {
            let mut lo_traj = first;
            loop {
                let lo = amp;
                amp *= 10.0;
                if amp > AMP_MAX {
                    return Err(Error::NoGroundState { lo: AMP_MIN, hi: AMP_MAX });
                }
                let t = shoot(params, grid, amp);
                match t.fate {
                    Fate::Crossed(_) => return Ok((lo, amp, lo_traj, t)),
                    _ => lo_traj = t,
                }
            }
        }
        Fate::Crossed(_) => {
            let mut hi_traj = first;
            loop {
                let hi = amp;
                amp /= 10.0;
                if amp < AMP_MIN {
                    return Err(Error::NoGroundState { lo: AMP_MIN, hi: AMP_MAX });
                }
                let t = shoot(params, grid, amp);
                match t.fate {
                    Fate::Crossed(_) => hi_traj = t,
                    _ => return Ok((amp, hi, t, hi_traj)),
                }
            }
        }
    }
}

fn shoot(params: &ModelParams, grid: &RadialGrid, amp: f64) -> Trajectory {
    let ModelParams { alpha, lambda, omega, .. } = *params;
    let n = params.n();
    let rhs = move |r: f64, y: &[f64; 2]| -> [f64; 2] {
        let force = omega * y[0] - lambda * y[0].abs().powf(alpha) * y[0];
        [y[1], force - (n - 1.0) / r * y[1]]
    };

    let dr = grid.dr();
    let mut values = Vec::with_capacity(grid.len());
    let mut slopes = Vec::with_capacity(grid.len());
    values.push(amp);
    slopes.push(0.0);

    // regular series R = R0 + c2 r² + c4 r⁴ across the first interval
    let f0 = omega * amp - lambda * amp.powf(alpha + 1.0);
    let df0 = omega - lambda * (alpha + 1.0) * amp.powf(alpha);
    let c2 = f0 / (2.0 * n);
    let c4 = df0 * c2 / (4.0 * (n + 2.0));
    let stiffness = (omega + lambda * (alpha + 1.0) * amp.powf(alpha)).sqrt();
    // the neglected r⁶ term is of size (stiffness·r)⁶/720
    let start = dr.min(2e-3 / stiffness);
    let substeps = ((dr * stiffness / SUBSTEP).ceil() as usize).max(1);
    let mut y = [
        amp + c2 * start * start + c4 * start.powi(4),
        2.0 * c2 * start + 4.0 * c4 * start.powi(3),
    ];
    if start < dr {
        y = integrate(&rhs, start, dr, y, 8 * substeps);
    }
    values.push(y[0]);
    slopes.push(y[1]);
    if let Some(fate) = classify(&y, 1) {
        return Trajectory { values, slopes, fate };
    }

    for j in 1..grid.len() - 1 {
        let r0 = grid.node(j);
        y = integrate(&rhs, r0, r0 + dr, y, substeps);
        values.push(y[0]);
        slopes.push(y[1]);
        if let Some(fate) = classify(&y, j + 1) {
            return Trajectory { values, slopes, fate };
        }
    }
    // sitting on (or orbiting near) the constant solution counts as too small
    let fate = if y[0] > 1e-3 * amp {
        Fate::TurnedUp(grid.len() - 1)
    } else {
        Fate::Survived
    };
    Trajectory { values, slopes, fate }
}

fn classify(y: &[f64; 2], j: usize) -> Option<Fate> {
    if !(y[0] > 0.0) {
        Some(Fate::Crossed(j))
    } else if y[1] > 0.0 {
        Some(Fate::TurnedUp(j))
    } else {
        None
    }
}

/// Averages the two bracketing trajectories while they agree, then continues
/// with the decaying solution of the linearized equation. At the splice the
/// averaged state is split into decaying and growing linear modes and only
/// the decaying part is kept.
fn splice_tail(params: &ModelParams, grid: &RadialGrid, lo: &Trajectory, hi: &Trajectory) -> Result<Vec<f64>> {
    let common = lo.values.len().min(hi.values.len());
    let scale = lo.values[0];
    let mut cut = 0;
    for j in 0..common {
        let (a, b) = (lo.values[j], hi.values[j]);
        if (a - b).abs() > MATCH_TOL * scale || a <= 0.0 || b <= 0.0 {
            break;
        }
        cut = j;
    }
    // step back one decay length from where the trajectories peel apart
    let margin = ((1.0 / params.omega.sqrt()) / grid.dr()).ceil() as usize;
    let cut = cut.saturating_sub(margin);
    if cut < 8 {
        return Err(Error::ConvergenceFailure(
            "bracketing trajectories separate immediately".into(),
        ));
    }
    let averaged: Vec<f64> = (0..=cut).map(|j| 0.5 * (lo.values[j] + hi.values[j])).collect();
    let r_cut = grid.node(cut);
    let value = averaged[cut];
    let slope = 0.5 * (lo.slopes[cut] + hi.slopes[cut]);
    let (d, dd) = mode_with_slope(params, r_cut, -1.0);
    let (g, dg) = mode_with_slope(params, r_cut, 1.0);
    // value = A d + B g, slope = A dd + B dg
    let det = d * dg - g * dd;
    let decaying = (value * dg - slope * g) / det;
    // blend smoothly into the tail over one decay length before the cut
    let start = cut - margin.min(cut / 2);
    let mut values = averaged;
    for j in start..=cut {
        let s = (j - start) as f64 / (cut - start) as f64;
        let w = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let tail = decaying * linear_mode(params, grid.node(j), -1.0);
        values[j] = (1.0 - w) * values[j] + w * tail;
    }
    for j in cut + 1..grid.len() {
        values.push(decaying * linear_mode(params, grid.node(j), -1.0));
    }
    Ok(values)
}

/// Decaying (`sign = -1`) or growing (`sign = +1`) radial solution of
/// `w'' + (N-1)/r w' - ωw = 0`, i.e. `r^{-(N-2)/2}` times `K_ν` or `I_ν` of
/// `√ω r` with `ν = (N-2)/2`, via the large-argument series (unnormalized).
fn linear_mode(params: &ModelParams, r: f64, sign: f64) -> f64 {
    let nu = (params.n() - 2.0) / 2.0;
    let z = params.omega.sqrt() * r;
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=8 {
        let odd = (2 * k - 1) as f64;
        let next = -sign * term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
    }
    r.powf(-(params.n() - 1.0) / 2.0) * (sign * z).exp() * sum
}

fn mode_with_slope(params: &ModelParams, r: f64, sign: f64) -> (f64, f64) {
    let h = 1e-5 * r;
    let slope = (linear_mode(params, r + h, sign) - linear_mode(params, r - h, sign)) / (2.0 * h);
    (linear_mode(params, r, sign), slope)
}

/// Sup-norm of `-R'' - (N-1)/r R' + ωR - λ|R|^α R`.
///
/// Eighth-order central differences with the even extension through `r = 0`;
/// the last four nodes fall back to fourth-order one-sided closures.
pub(crate) fn equation_residual(profile: &RadialProfile, params: &ModelParams) -> f64 {
    pointwise_residual(profile, params).into_iter().fold(0.0, f64::max)
}

fn pointwise_residual(profile: &RadialProfile, params: &ModelParams) -> Vec<f64> {
    const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let h = profile.grid.dr();
    let f = &profile.values;
    let len = f.len();
    let at = |j: isize| f[j.unsigned_abs()];
    let fallback1 = derivative4(f, h);
    let fallback2 = second_derivative4(f, h);
    let n = params.n();
    (0..len)
        .map(|j| {
            let (d1, d2) = if j + 4 < len {
                let jj = j as isize;
                let mut d1 = 0.0;
                let mut d2 = D2[0] * f[j];
                for k in 1..=4 {
                    let ki = k as isize;
                    d1 += D1[k - 1] * (at(jj + ki) - at(jj - ki));
                    d2 += D2[k] * (at(jj + ki) + at(jj - ki));
                }
                (d1 / h, d2 / (h * h))
            } else {
                (fallback1[j], fallback2[j])
            };
            let r = profile.grid.node(j);
            let lap = if j == 0 { n * d2 } else { d2 + (n - 1.0) / r * d1 };
            let v = f[j];
            (-lap + params.omega * v - params.lambda * v.abs().powf(params.alpha) * v).abs()
        })
        .collect()
}
