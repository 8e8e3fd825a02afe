use proptest::prelude::*;

use lchi::charsum::{smoothed_pv_bound, window_bound};
use lchi::consts::INV_SQRT_E;
use lchi::engine::{assemble_params, certified_coefficient, phi, solve_theta, theta_inequality_lhs, ThetaBranch, THETA_TOL};
use lchi::rounding::{round_down, round_up};
use lchi::{fundamental_discriminants, Modulus, Parity, QuadChar, SmoothingContext};

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Even), Just(Parity::Odd)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inverse_sqrt_sum(x in 1u64..100_000) {
        let s: f64 = (1..=x).map(|n| 1.0 / (n as f64).sqrt()).sum();
        prop_assert!(s <= 2.0 * (x as f64).sqrt());
    }

    #[test]
    fn harmonic_window(y in 1u64..100_000, len in 0u64..100_000) {
        let x = y + len;
        let s: f64 = (y..=x).map(|n| 1.0 / n as f64).sum();
        prop_assert!(s <= 1.0 + (x as f64 / y as f64).ln());
    }

    #[test]
    fn character_sums_vanish_over_a_period(i in 0usize..300, a in 0u64..1_000_000) {
        let ds = fundamental_discriminants(500);
        let chi = QuadChar::new(ds[i % ds.len()]).unwrap();
        let s: i64 = (a..a + chi.modulus()).map(|n| chi.eval(n) as i64).sum();
        prop_assert_eq!(s, 0);
    }

    #[test]
    fn theta_star_stays_in_range(a in -1.0f64..0.0, e1 in -0.2f64..0.2, e2 in 0.0f64..0.2) {
        let (t, branch, trace) = solve_theta(a, e1, e2);
        prop_assert!((0.5..=INV_SQRT_E).contains(&t));
        let g = |t| theta_inequality_lhs(t, a, e1, e2);
        match branch {
            ThetaBranch::LowerEndpoint => prop_assert!(g(0.5) >= 0.0),
            ThetaBranch::UpperEndpoint => prop_assert_eq!(t, INV_SQRT_E),
            ThetaBranch::Root => {
                prop_assert_eq!(g(t), trace.g_at_star);
                prop_assert!(g(t - 2.0 * THETA_TOL) < 0.0);
            }
        }
    }

    #[test]
    fn theta_star_nonincreasing_in_eps(a in -0.1f64..0.0, e1 in -0.05f64..0.05, e2 in 0.0f64..0.02, step in 0.0f64..0.02) {
        let (t0, _, _) = solve_theta(a, e1, e2);
        let (t1, _, _) = solve_theta(a, e1 + step, e2);
        let (t2, _, _) = solve_theta(a, e1, e2 + step);
        prop_assert!(t1 <= t0);
        prop_assert!(t2 <= t0);
    }

    #[test]
    fn g_depends_on_eps_sum_only(t in 0.5f64..0.6065, a in -0.1f64..0.0, e1 in -0.05f64..0.05, e2 in 0.0f64..0.05) {
        let lhs = theta_inequality_lhs(t, a, e1, e2);
        let rhs = theta_inequality_lhs(t, a, e1 + e2, 0.0);
        prop_assert!((lhs - rhs).abs() <= 1e-15);
    }

    #[test]
    fn phi_increasing(y in 0.001f64..0.999, dy in 1e-6f64..1e-3, theta in 0.5f64..0.61) {
        let y2 = (y + dy).min(1.0);
        prop_assert!(phi(y2, theta) > phi(y, theta));
    }

    #[test]
    fn coefficient_nonincreasing_in_q0(b in 40.0f64..200.0, p in parity(), lq in 25.0f64..280.0, dq in 0.0f64..10.0) {
        let lo = assemble_params(Modulus::from_log10(lq), b, p);
        let hi = assemble_params(Modulus::from_log10(lq + dq), b, p);
        prop_assume!(lo.is_ok() && hi.is_ok());
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        let c_lo = certified_coefficient(solve_theta(lo.a, lo.eps1, lo.eps2).0, &lo);
        let c_hi = certified_coefficient(solve_theta(hi.a, hi.eps1, hi.eps2).0, &hi);
        prop_assert!(c_hi <= c_lo + 1e-12);
    }

    #[test]
    fn smoothed_mean_is_bounded(i in 0usize..1000, lh in 1.0f64..4.0, x in 0.0f64..1.0) {
        let ds = fundamental_discriminants(2000);
        let chi = QuadChar::new(ds[i % ds.len()]).unwrap();
        let ctx = SmoothingContext::new(chi, 10f64.powf(lh)).unwrap();
        prop_assert!(ctx.f(x).unwrap().abs() <= 1.0);
        prop_assert!(ctx.big_f(x).unwrap().abs() <= 1.0);
    }

    #[test]
    fn charsum_bounds_monotone_in_n(q in 10.0f64..1e6, u in 0.0f64..0.9, v in 0.01f64..1.0, p in parity()) {
        let n = (u * q).max(1.0);
        let dn = v * (q - n);
        prop_assert!(smoothed_pv_bound(q, n + dn).unwrap() < smoothed_pv_bound(q, n).unwrap());
        prop_assert!(window_bound(q, n + dn, p).unwrap() > window_bound(q, n, p).unwrap());
    }

    #[test]
    fn scientific_modulus(m in 1.0f64..10.0, e in 0i32..300) {
        let text = format!("{m}e{e}");
        let q: Modulus = text.parse().unwrap();
        let expected = m.ln() + e as f64 * std::f64::consts::LN_10;
        prop_assert!((q.ln() - expected).abs() <= 1e-14 * expected.max(1.0));
    }

    #[test]
    fn rounding_directions(x in -1e300f64..1e300) {
        prop_assert!(round_up(x) >= x);
        prop_assert!(round_down(x) <= x);
    }
}
