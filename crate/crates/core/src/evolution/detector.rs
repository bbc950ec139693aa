//! Three-criterion numerical surrogate for finite-time blow-up.

use super::series::ObservableSeries;
use crate::numerics::{Spectral, WaveField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorOptions {
    /// Required growth `‖∇u(t)‖² / ‖∇u(0)‖²`.
    pub growth: f64,
    /// Number of records sampled from the observation window.
    pub window: usize,
    /// The observation window is this trailing fraction of the elapsed time.
    pub window_fraction: f64,
    /// Required fraction of `|û|²` in the top third of wavenumbers.
    pub tail_fraction: f64,
}

impl Default for DetectorOptions {
    fn default() -> Self {
        DetectorOptions {
            growth: 1e6,
            window: 8,
            window_fraction: 0.2,
            tail_fraction: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorVerdict {
    pub fired: bool,
    pub growth_ok: bool,
    pub concave_decreasing: bool,
    pub tail_ok: bool,
    pub tail_fraction: f64,
    /// Fitted `T` in `‖∇u‖² ∝ (T - t)^{-q}`, when the run fired.
    pub blow_up_time: Option<f64>,
    pub blow_up_exponent: Option<f64>,
}

pub fn blow_up_detector(state: &WaveField, series: &ObservableSeries, opts: &DetectorOptions) -> DetectorVerdict {
    let recs = &series.records;
    let growth_ok = match (recs.first(), recs.last()) {
        (Some(a), Some(b)) => b.grad_sq > opts.growth * a.grad_sq,
        _ => false,
    };
    let concave_decreasing = growth_ok && concave_and_decreasing(series, opts.window, opts.window_fraction);
    // the transform is only worth computing once the cheaper criteria hold
    let tail_fraction = if concave_decreasing { spectral_tail_fraction(state) } else { f64::NAN };
    let tail_ok = tail_fraction > opts.tail_fraction;
    let fired = growth_ok && concave_decreasing && tail_ok;
    let fit = if fired { fit_blow_up_time(series) } else { None };
    DetectorVerdict {
        fired,
        growth_ok,
        concave_decreasing,
        tail_ok,
        tail_fraction,
        blow_up_time: fit.map(|f| f.0),
        blow_up_exponent: fit.map(|f| f.1),
    }
}

/// Discrete `h'' < 0` and `h' < 0` on up to `window` records spread evenly in time
/// over the trailing `fraction` of the run. Near a collapse the records crowd
/// together and consecutive second differences of `h` drop below roundoff,
/// hence the spread.
fn concave_and_decreasing(series: &ObservableSeries, window: usize, fraction: f64) -> bool {
    let recs = &series.records;
    let (Some(first), Some(last)) = (recs.first(), recs.last()) else {
        return false;
    };
    let window = window.max(3);
    let span = fraction * (last.t - first.t);
    let mut picked: Vec<usize> = Vec::with_capacity(window);
    for k in 0..window {
        let target = last.t - span * (1.0 - k as f64 / (window - 1) as f64);
        let idx = recs.partition_point(|r| r.t <= target).saturating_sub(1);
        if picked.last() != Some(&idx) {
            picked.push(idx);
        }
    }
    // sparse early records can map several targets to one record
    if picked.len() < 3 {
        return false;
    }
    let decreasing = picked.windows(2).all(|w| recs[w[1]].variance < recs[w[0]].variance);
    let slope = |i: usize, j: usize| (recs[j].variance - recs[i].variance) / (recs[j].t - recs[i].t);
    let concave = picked.windows(3).all(|w| slope(w[1], w[2]) < slope(w[0], w[1]));
    decreasing && concave
}

/// Fraction of `|û|²` at wavenumbers beyond two thirds of the Nyquist
/// wavenumber along some axis.
pub fn spectral_tail_fraction(field: &WaveField) -> f64 {
    let grid = field.grid;
    let n = grid.points_per_axis();
    let mut hat = field.values.clone();
    Spectral::new(&grid).forward(&mut hat);
    let cutoff = n / 3;
    // index → |mode number| in FFT order
    let mode = |i: usize| if i <= n / 2 { i } else { n - i };
    let mut total = 0.0;
    let mut tail = 0.0;
    for (idx, v) in hat.iter().enumerate() {
        let m = match grid.dim() {
            1 => mode(idx),
            _ => mode(idx / n).max(mode(idx % n)),
        };
        let e = v.norm_sqr();
        total += e;
        if m > cutoff {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

/// Least-squares fit of `ln ‖∇u‖² = c - q ln(T - t)` over the last decade of
/// growth; returns `(T, q)`.
pub fn fit_blow_up_time(series: &ObservableSeries) -> Option<(f64, f64)> {
    let recs = &series.records;
    let last = recs.last()?;
    let floor = last.grad_sq / 10.0;
    let start = recs.iter().rposition(|r| r.grad_sq < floor).map_or(0, |i| i + 1);
    let pts: Vec<(f64, f64)> = recs[start..].iter().map(|r| (r.t, r.grad_sq.ln())).collect();
    if pts.len() < 4 {
        return None;
    }
    let t_last = last.t;
    let span = (t_last - pts[0].0).max(f64::MIN_POSITIVE);

    let fit = |gap: f64| -> (f64, f64) {
        let tb = t_last + gap;
        let xs: Vec<f64> = pts.iter().map(|(t, _)| (tb - t).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&pts).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let sse: f64 = xs
            .iter()
            .zip(&pts)
            .map(|(x, p)| {
                let e = p.1 - (my + slope * (x - mx));
                e * e
            })
            .sum();
        (sse, -slope)
    };

    // golden section on log(T - t_last) over [1e-6, 10]·span
    let (mut lo, mut hi) = ((1e-6 * span).ln(), (10.0 * span).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = fit(x1.exp()).0;
    let mut f2 = fit(x2.exp()).0;
    for _ in 0..100 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = fit(x1.exp()).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = fit(x2.exp()).0;
        }
    }
    let gap = (0.5 * (lo + hi)).exp();
    let q = fit(gap).1;
    (q.is_finite() && q > 0.0).then_some((t_last + gap, q))
}
