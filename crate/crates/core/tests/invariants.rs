use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use nls_lab::evolution::{split_step_evolve, EvolveOptions, RunStatus};
use nls_lab::functionals::{
    action_from_norms, constraint_from_norms, dilate_profile, energy_from_norms, functional_norms, EnergySign, RegionLabel,
    ThresholdSet,
};
use nls_lab::ground_state::{default_radial_grid, solve_shooting, GroundState};
use nls_lab::harness::{read_checkpoint, write_checkpoint, ConfigMap, LogRange};
use nls_lab::initial_data::{gaussian_with_norms, make_phi_ab, BoxChoice};
use nls_lab::numerics::{radial_norms, CartesianGrid, WaveField};
use nls_lab::ModelParams;

fn unit_1d() -> &'static GroundState {
    static GS: OnceLock<GroundState> = OnceLock::new();
    GS.get_or_init(|| solve_shooting(&ModelParams::unit(1, 8.0).unwrap(), &default_radial_grid(1.0).unwrap()).unwrap())
}

fn rel(x: f64, y: f64) -> f64 {
    (x / y - 1.0).abs()
}

/// Supercritical, energy-subcritical `(N, α)` pairs.
fn supercritical() -> impl Strategy<Value = (usize, f64)> {
    prop_oneof![
        (4.05f64..12.0).prop_map(|a| (1usize, a)),
        (2.05f64..8.0).prop_map(|a| (2usize, a)),
        (1.4f64..3.9).prop_map(|a| (3usize, a)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn thresholds_invert_order_and_scale(
        (dim, alpha) in supercritical(),
        lambda in 0.1f64..10.0,
        r_l2 in 0.5f64..5.0,
        a in 1e-2f64..1e2,
    ) {
        let p = ModelParams::new(dim, alpha, lambda, 1.0).unwrap();
        let ts = ThresholdSet::new(p, r_l2).unwrap();
        let t = ts.evaluate(a).unwrap();
        let inv = ts.invert(a).unwrap();
        prop_assert!(t.gamma < t.r && t.r < t.rho);
        prop_assert!(inv.gamma < inv.r && inv.r < inv.rho);
        prop_assert!(rel(ts.evaluate(inv.r).unwrap().r, a) < 1e-12);
        prop_assert!(rel(ts.invert(t.gamma).unwrap().gamma, a) < 1e-12);
        prop_assert!(rel(ts.invert(t.rho).unwrap().rho, a) < 1e-12);
        // r*(a) ∝ a^{-(Nα-4)/(4-α(N-2))}
        let k_over_d = p.supercritical_gap() / p.energy_gap();
        prop_assert!(rel(ts.evaluate(2.0 * a).unwrap().r / t.r, 2f64.powf(-k_over_d)) < 1e-12);
    }

    #[test]
    fn labels_follow_from_a_b_alone(
        (dim, alpha) in supercritical(),
        a in 1e-2f64..1e2,
        b in 1e-2f64..1e2,
    ) {
        let ts = ThresholdSet::new(ModelParams::unit(dim, alpha).unwrap(), 1.7).unwrap();
        let t = ts.evaluate(b).unwrap();
        let label = ts.classify(a, b).unwrap();
        match label {
            RegionLabel::GuaranteedGlobal => prop_assert!(a <= t.gamma),
            RegionLabel::Gap => prop_assert!(t.gamma < a && a <= t.r),
            RegionLabel::BlowUpConstructible(s) => {
                prop_assert!(a > t.r);
                prop_assert_eq!(s == EnergySign::Negative, a > t.rho && rel(a, t.rho) > 1e-12);
            }
        }
        prop_assert_eq!(label, ts.classify(a, b).unwrap());
    }

    #[test]
    fn dilation_keeps_mass_and_scales_gradient(beta in 0.3f64..3.0) {
        let gs = unit_1d();
        let p = gs.params;
        let d = radial_norms(&dilate_profile(beta, &gs.profile).unwrap(), &[p.alpha + 2.0]).unwrap();
        prop_assert!(rel(d.mass, gs.norms.mass) < 1e-12);
        prop_assert!(rel(d.grad_sq, beta * beta * gs.norms.grad_sq) < 1e-12);
        prop_assert!(rel(d.lp(p.alpha + 2.0).unwrap(), beta.powf(p.n_alpha() / 2.0) * gs.potential_norm()) < 1e-12);
        // S(𝒫(β,Φ)) ≤ S(Φ) with equality only at β = 1
        let m = action_from_norms(&gs.norms, &p).unwrap();
        prop_assert!(action_from_norms(&d, &p).unwrap() <= m + 1e-12);
    }

    #[test]
    fn gaussian_data_carry_prescribed_norms(a in 0.2f64..3.0, b in 0.2f64..3.0) {
        let p = ModelParams::unit(1, 8.0).unwrap();
        let g = CartesianGrid::new(1, 60.0, 4096).unwrap();
        let phi = gaussian_with_norms(a, b, &g, p).unwrap();
        let n = functional_norms(&phi, &p).unwrap();
        prop_assert!(rel(n.mass.sqrt(), a) < 1e-6);
        prop_assert!(rel(n.grad_sq.sqrt(), b) < 1e-6);
    }

    #[test]
    fn checkpoints_round_trip_bitwise(
        dim in 1usize..=2,
        log_n in 3u32..6,
        half in 0.5f64..100.0,
        time in -1e3f64..1e3,
        alpha in 0.5f64..8.0,
        lambda in 0.0f64..5.0,
        seed in any::<u64>(),
    ) {
        let n = 1usize << log_n;
        let p = ModelParams { dim, alpha, lambda, omega: 1.0 };
        let g = CartesianGrid::new(dim, half, n).unwrap();
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            f64::from_bits((state >> 12) | 0x3ff0_0000_0000_0000) - 1.5
        };
        let values: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(next(), next())).collect();
        let f = WaveField::new(g, values, time, p).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&f, &mut buf).unwrap();
        let back = read_checkpoint(buf.as_slice()).unwrap();
        prop_assert_eq!(back.grid, f.grid);
        prop_assert_eq!(back.params, f.params);
        prop_assert_eq!(back.time.to_bits(), f.time.to_bits());
        prop_assert_eq!(back.values, f.values);
        // any strict prefix is a format error, never a panic
        let cut = (seed as usize) % buf.len();
        prop_assert!(read_checkpoint(&buf[..cut]).is_err());
    }

    #[test]
    fn log_ranges_are_monotone_with_exact_ends(lo in 1e-3f64..1e3, span in 1.0f64..1e3, count in 2usize..40) {
        let r = LogRange::new(lo, lo * span, count).unwrap();
        let v = r.values();
        prop_assert_eq!(v.len(), count);
        prop_assert_eq!(v[0], lo);
        prop_assert_eq!(v[count - 1], lo * span);
        prop_assert!(v.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn cli_values_override_config(file_alpha in 4.5f64..9.0, cli_alpha in 4.5f64..9.0) {
        let mut m = ConfigMap::parse(&format!("alpha = {file_alpha}\n")).unwrap();
        prop_assert_eq!(m.params().unwrap().alpha, file_alpha);
        m.set("alpha", cli_alpha);
        prop_assert_eq!(m.params().unwrap().alpha, cli_alpha);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// `φ_{a,b}` has the prescribed norms, `Q < 0`, `S < m`, and the energy
    /// sign of its `ρ*` label.
    #[test]
    fn blow_up_data_match_their_certificate(b in 0.3f64..3.0, beta in 1.05f64..3.0) {
        let gs = unit_1d();
        let ts = ThresholdSet::from_ground_state(gs, gs.params).unwrap();
        let a = ts.evaluate(b / beta).unwrap().r;
        let c = make_phi_ab(a, b, &ts, gs, BoxChoice::Auto { points_per_axis: 2048 }).unwrap();
        let p = c.field.params;
        prop_assert!(rel(c.beta, beta) < 1e-9);
        prop_assert!(rel(c.norms.mass.sqrt(), a) < 1e-6 && rel(c.norms.grad_sq.sqrt(), b) < 1e-6);
        prop_assert!(constraint_from_norms(&c.norms, &p).unwrap() < 0.0);
        prop_assert!(c.action < c.m);
        let e = energy_from_norms(&c.norms, &p).unwrap();
        match ts.classify(a, b).unwrap() {
            RegionLabel::BlowUpConstructible(EnergySign::Negative) => prop_assert!(e < 1e-8),
            RegionLabel::BlowUpConstructible(EnergySign::Positive) => prop_assert!(e > -1e-8),
            RegionLabel::BlowUpConstructible(EnergySign::Zero) => prop_assert!(e.abs() < 1e-8),
            other => prop_assert!(false, "label {:?}", other),
        }
    }

    #[test]
    fn mass_is_conserved_for_any_small_gaussian(amp in 0.1f64..0.9, kick in -1.0f64..1.0) {
        let p = ModelParams::unit(1, 8.0).unwrap();
        let g = CartesianGrid::new(1, 30.0, 512).unwrap();
        let phi = WaveField::from_fn(g, p, |x| Complex64::from_polar(amp * (-x[0] * x[0] / 2.0).exp(), kick * x[0])).unwrap();
        let (out, series) = split_step_evolve(&phi, &EvolveOptions::new(0.2, 1e-3, 20)).unwrap();
        prop_assert_eq!(out.status, RunStatus::GlobalOnWindow);
        prop_assert!(series.mass_drift() < 1e-12);
    }
}
