//! Randomized invariants across the detection, link and allocation layers.

use covrelay::allocation::{sca_optimize, ScaConfig};
use covrelay::channel::{inner, norm_sqr};
use covrelay::detection::{
    certificate, covert_box_bounds, fa_md, min_error_sum, optimal_threshold, phase_scales,
};
use covrelay::direct::null_space_basis;
use covrelay::link::{secrecy_rate, sinr_destination, sinr_relay};
use covrelay::{LinkGains, Phase, PhaseScales, PowerSplit, SinrMode, SystemParams, WillieLinks};
use num_complex::Complex64;
use proptest::prelude::*;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn links() -> impl Strategy<Value = WillieLinks> {
    (log_uniform(1e-5, 1e-2), log_uniform(1e-5, 1e-2), log_uniform(1e-5, 1e-2))
        .prop_map(|(sw, dw, rw)| WillieLinks { sw, dw, rw })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn error_sum_is_a_probability_and_threshold_is_optimal(
        lj in log_uniform(1e-6, 1e2),
        ls in log_uniform(1e-6, 1e2),
        s2 in log_uniform(1e-7, 1e-3),
        step in 0.5f64..2.0,
    ) {
        let s = PhaseScales::new(lj, ls, s2, Phase::One).unwrap();
        let e = min_error_sum(&s);
        prop_assert!((0.0..=1.0).contains(&e));
        prop_assert!((e - certificate(&s)).abs() < 1e-9);
        let t = optimal_threshold(&s);
        let other = s2 + (t - s2) * step;
        prop_assert!(fa_md(&s, other).error_sum() >= e - 1e-12);
    }

    #[test]
    fn covert_box_edges_are_tight(
        l in links(),
        eps in 0.01f64..0.5,
    ) {
        let p = SystemParams::default();
        let Ok(b) = covert_box_bounds(&p, &l, eps) else { return Ok(()) };
        let at = |rho, xi, phase| min_error_sum(&phase_scales(PowerSplit { rho, xi }, &p, &l, phase).unwrap());
        prop_assert!(at(b.rho_ub, 0.5, Phase::One) >= 1.0 - eps);
        prop_assert!(at(b.xi_lb, b.xi_lb, Phase::Two) >= 1.0 - eps);
        if b.rho_ub < 1.0 - 1e-6 {
            prop_assert!(at((b.rho_ub + 1e-6).min(1.0), 0.5, Phase::One) < 1.0 - eps);
        }
        if b.xi_lb > 1e-6 {
            prop_assert!(at(0.5, b.xi_lb - 1e-6, Phase::Two) < 1.0 - eps);
        }
    }

    #[test]
    fn sca_output_is_covert_and_monotone(
        l in links(),
        gsr in log_uniform(1e1, 1e5),
        grd in log_uniform(1e1, 1e5),
        eps in 0.01f64..0.5,
    ) {
        let p = SystemParams { epsilon: eps, ..SystemParams::default() };
        let g = LinkGains::new(gsr, grd).unwrap();
        let r = sca_optimize(&p, &[l], &g, &ScaConfig::default()).unwrap();
        prop_assert!(r.rate >= 0.0);
        if r.feasible {
            let PowerSplit { rho, xi } = r.split;
            let e1 = min_error_sum(&phase_scales(r.split, &p, &l, Phase::One).unwrap());
            let e2 = min_error_sum(&phase_scales(r.split, &p, &l, Phase::Two).unwrap());
            prop_assert!(e1 >= 1.0 - eps && e2 >= 1.0 - eps, "rho {rho} xi {xi}: {e1} {e2}");
            for w in r.trajectory.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0));
            }
        }
    }

    #[test]
    fn rates_and_sinrs_are_consistent(
        rho in 0.001f64..0.999,
        xi in 0.001f64..0.999,
        gsr in log_uniform(1e-1, 1e6),
        grd in log_uniform(1e-1, 1e6),
    ) {
        let s = PowerSplit::new(rho, xi).unwrap();
        let g = LinkGains::new(gsr, grd).unwrap();
        let gd = sinr_destination(s, &g, SinrMode::Exact).unwrap();
        let gr = sinr_relay(s, &g, SinrMode::Exact).unwrap();
        prop_assert!(gd >= 0.0 && gr >= 0.0);
        prop_assert!(gr <= sinr_relay(s, &g, SinrMode::HighSnr).unwrap() * (1.0 + 1e-12));
        let clamped = secrecy_rate(s, &g, 0.5, SinrMode::Exact, true).unwrap();
        let raw = secrecy_rate(s, &g, 0.5, SinrMode::Exact, false).unwrap();
        prop_assert!(clamped >= 0.0);
        prop_assert!(clamped == raw.max(0.0));
    }

    #[test]
    fn null_space_basis_is_orthonormal(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..12),
    ) {
        let h: Vec<Complex64> = parts.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        prop_assume!(norm_sqr(&h) > 1e-6);
        let basis = null_space_basis(&h).unwrap();
        prop_assert_eq!(basis.len(), h.len() - 1);
        let scale = norm_sqr(&h).sqrt();
        for (i, a) in basis.iter().enumerate() {
            prop_assert!(inner(a, &h).norm() <= 1e-12 * scale.max(1.0));
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((inner(a, b) - want).norm() < 1e-12);
            }
        }
    }
}
