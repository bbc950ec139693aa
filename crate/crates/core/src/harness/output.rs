//! CSV writers and the static SVG threshold plot.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::evolution::RunStatus;
use crate::functionals::ThresholdSet;
use crate::numerics::RadialProfile;

use super::config::LogRange;

/// `r,value` rows of a radial profile.
pub fn write_profile_csv(profile: &RadialProfile, mut out: impl Write) -> Result<()> {
    writeln!(out, "r,value")?;
    for (r, v) in profile.grid.nodes().zip(&profile.values) {
        writeln!(out, "{r},{v}")?;
    }
    out.flush()?;
    Ok(())
}

/// `a,gamma_star,r_star,rho_star` over the log-spaced arguments.
pub fn write_thresholds_csv(ts: &ThresholdSet, range: &LogRange, mut out: impl Write) -> Result<()> {
    writeln!(out, "a,gamma_star,r_star,rho_star")?;
    for a in range.values() {
        let t = ts.evaluate(a)?;
        writeln!(out, "{a},{},{},{}", t.gamma, t.r, t.rho)?;
    }
    out.flush()?;
    Ok(())
}

/// One sweep outcome placed at `(b, a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotMarker {
    pub a: f64,
    pub b: f64,
    pub status: RunStatus,
}

fn status_color(s: RunStatus) -> &'static str {
    match s {
        RunStatus::GlobalOnWindow => "#2a9d4b",
        RunStatus::BlowUpDetected => "#d62728",
        RunStatus::Undecided => "#7f7f7f",
        RunStatus::DiagnosticsViolated => "#ff7f0e",
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 60.0;

/// `γ*`, `r*`, `ρ*` as curves `a = ·(b)` on log axes over `b_range`, with
/// markers colored by outcome. Axis limits cover curves and markers.
pub fn threshold_plot_svg(ts: &ThresholdSet, b_range: &LogRange, markers: &[PlotMarker]) -> Result<String> {
    const SAMPLES: usize = 96;
    let (b_lo, b_hi) = if b_range.hi > b_range.lo {
        (b_range.lo, b_range.hi)
    } else {
        (b_range.lo / 2.0, b_range.lo * 2.0)
    };
    let bs = LogRange::new(b_lo, b_hi, SAMPLES)?.values();
    let mut curves = [Vec::new(), Vec::new(), Vec::new()];
    for &b in &bs {
        let t = ts.evaluate(b)?;
        curves[0].push((b, t.gamma));
        curves[1].push((b, t.r));
        curves[2].push((b, t.rho));
    }
    let ys = curves.iter().flatten().map(|p| p.1).chain(markers.iter().map(|m| m.a));
    let (mut a_lo, mut a_hi) = ys.fold((f64::INFINITY, 0.0f64), |(lo, hi), y| (lo.min(y), hi.max(y)));
    let xs = markers.iter().map(|m| m.b);
    let (x_lo, x_hi) = xs.fold((b_lo, b_hi), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if a_hi <= a_lo {
        a_lo /= 2.0;
        a_hi *= 2.0;
    }
    let (lx0, lx1, ly0, ly1) = (x_lo.ln(), x_hi.ln(), a_lo.ln(), a_hi.ln());
    let px = |b: f64| PAD + (b.ln() - lx0) / (lx1 - lx0) * (WIDTH - 2.0 * PAD);
    let py = |a: f64| HEIGHT - PAD - (a.ln() - ly0) / (ly1 - ly0) * (HEIGHT - 2.0 * PAD);

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * PAD,
        HEIGHT - 2.0 * PAD
    )
    .unwrap();
    for (v, anchor) in [(x_lo, "start"), (x_hi, "end")] {
        writeln!(w, r#"<text x="{:.1}" y="{}" text-anchor="{anchor}">{v:.3e}</text>"#, px(v), HEIGHT - PAD + 16.0).unwrap();
    }
    for v in [a_lo, a_hi] {
        writeln!(w, r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.3e}</text>"#, PAD - 4.0, py(v) + 4.0).unwrap();
    }
    writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle">b = ‖∇φ‖ (log)</text>"#, WIDTH / 2.0, HEIGHT - 16.0).unwrap();
    writeln!(w, r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">a = ‖φ‖ (log)</text>"#, HEIGHT / 2.0, HEIGHT / 2.0).unwrap();

    let styles = [("γ*", "#1f77b4", ""), ("r*", "#9467bd", r#" stroke-dasharray="6 3""#), ("ρ*", "#8c564b", r#" stroke-dasharray="2 3""#)];
    for (k, (curve, (name, color, dash))) in curves.iter().zip(styles).enumerate() {
        let pts: Vec<String> = curve.iter().map(|&(b, a)| format!("{:.2},{:.2}", px(b), py(a))).collect();
        writeln!(w, r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#, pts.join(" ")).unwrap();
        let y = PAD + 16.0 + 16.0 * k as f64;
        writeln!(w, r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>"#, WIDTH - PAD - 70.0, WIDTH - PAD - 45.0).unwrap();
        writeln!(w, r#"<text x="{}" y="{}">{name}</text>"#, WIDTH - PAD - 40.0, y + 4.0).unwrap();
    }
    for m in markers {
        writeln!(
            w,
            r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="{}" stroke="black"><title>{} (a={}, b={})</title></circle>"#,
            px(m.b),
            py(m.a),
            status_color(m.status),
            m.status.as_str(),
            m.a,
            m.b
        )
        .unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RadialGrid;
    use crate::params::ModelParams;

    fn ts() -> ThresholdSet {
        ThresholdSet::new(ModelParams::unit(1, 8.0).unwrap(), 1.5).unwrap()
    }

    #[test]
    fn threshold_csv_rows() {
        let mut buf = Vec::new();
        write_thresholds_csv(&ts(), &LogRange::new(0.5, 2.0, 3).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "a,gamma_star,r_star,rho_star");
        assert_eq!(lines.len(), 4);
        let row: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
        let t = ts().evaluate(row[0]).unwrap();
        assert_eq!((row[1], row[2], row[3]), (t.gamma, t.r, t.rho));
    }

    #[test]
    fn profile_csv_round_trips_values() {
        let p = RadialProfile::from_fn(RadialGrid::new(2.0, 16).unwrap(), 1, |r| (-r).exp()).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let vals: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert_eq!(vals, p.values);
    }

    #[test]
    fn svg_is_self_contained() {
        let markers = [
            PlotMarker { a: 0.5, b: 1.0, status: RunStatus::GlobalOnWindow },
            PlotMarker { a: 3.0, b: 1.0, status: RunStatus::BlowUpDetected },
        ];
        let svg = threshold_plot_svg(&ts(), &LogRange::new(0.5, 2.0, 3).unwrap(), &markers).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
        assert!(!svg.contains("href"));
    }
}
