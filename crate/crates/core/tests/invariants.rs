//! Property tests for the invariants of the closed form, the extension
//! coefficients and the number-theory helpers.

use hchain::extremal::sup_inf_extension;
use hchain::number_theory::{compensated_residual, euler_totient};
use hchain::spectral::{
    b_coefficient, exact_displacement, extension_deviation, extension_deviation_from_displacements,
    gamma_identity_residual, mode_count, ExtensionCoefficients,
};
use hchain::{AnalysisWindow, ChainParams, Convention};
use proptest::prelude::*;

/// `(N, k, l)` with `k + l ≤ min(⌊0.9 N⌋, N − 1)`.
fn window() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..80).prop_flat_map(|n| {
        let right = AnalysisWindow::max_right(n, 0.1);
        (Just(n), 1..=right).prop_flat_map(move |(n, l)| (Just(n), 0..=right - l, Just(l)))
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn extension_two_paths_agree((n, k, l) in window(), t in 0.0f64..500.0, sigma in 0.1f64..3.0) {
        let params = ChainParams::with_sigma(n, 1.0, sigma, 1.0).unwrap();
        let w = AnalysisWindow::new(n, k, l, 0.1).unwrap();
        let direct = extension_deviation(&params, &w, t, Convention::Corrected).unwrap();
        let via = extension_deviation_from_displacements(&params, &w, t, Convention::Corrected).unwrap();
        prop_assert!((direct - via).abs() <= 1e-9 * (1.0 + l as f64), "{direct} vs {via}");
    }

    #[test]
    fn extension_within_triangle_bound((n, k, l) in window(), t in 0.0f64..1e4) {
        let params = ChainParams::with_sigma(n, 1.0, 1.0, 1.0).unwrap();
        let w = AnalysisWindow::new(n, k, l, 0.1).unwrap();
        let i = extension_deviation(&params, &w, t, Convention::Corrected).unwrap();
        let bound = ExtensionCoefficients::new(n, &w, Convention::Corrected).unwrap().triangle_bound();
        prop_assert!(i.abs() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn even_modes_vanish_and_b_is_bounded((n, k, l) in window()) {
        let w = AnalysisWindow::new(n, k, l, 0.1).unwrap();
        for conv in [Convention::Corrected, Convention::PaperLiteral] {
            let c = ExtensionCoefficients::new(n, &w, conv).unwrap();
            for m in (2..=mode_count(n)).step_by(2) {
                prop_assert_eq!(c.a(m), 0.0);
            }
        }
        for m in 1..=mode_count(n) {
            prop_assert!(b_coefficient(n, k, l, m).abs() <= 1.0);
        }
    }

    #[test]
    fn displacement_starts_at_rest_and_is_pinned(n in 2usize..100, site in 0usize..100, t in 0.0f64..100.0) {
        let params = ChainParams::with_sigma(n, 1.0, 1.0, 1.0).unwrap();
        let site = site % n;
        let x0 = exact_displacement(&params, site, 0.0, Convention::Corrected).unwrap();
        prop_assert!(x0.abs() <= 1e-9 * (1.0 + site as f64));
        prop_assert_eq!(exact_displacement(&params, 0, t, Convention::Corrected).unwrap(), 0.0);
    }

    #[test]
    fn gamma_identity_holds(n in 2usize..400, site in 0usize..400) {
        let site = site % n;
        let r = gamma_identity_residual(n, site, Convention::Corrected).unwrap();
        prop_assert!(r <= 1e-9 * site.max(1) as f64);
    }

    #[test]
    fn totient_is_multiplicative(a in 1u64..5000, b in 1u64..5000) {
        prop_assume!(gcd(a, b) == 1);
        prop_assert_eq!(euler_totient(a * b).unwrap(), euler_totient(a).unwrap() * euler_totient(b).unwrap());
    }

    #[test]
    fn compensated_residual_is_exact_on_dyadics(p in -1_000_000i64..1_000_000, c in -50i64..50, a0 in -5000i64..5000) {
        // v = p/1024 makes c·v − a₀ exactly representable
        let v = p as f64 / 1024.0;
        let exact = (c * p - a0 * 1024).abs() as f64 / 1024.0;
        prop_assert_eq!(compensated_residual(&[v], &[a0, c]), exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampled_extremes_lie_inside_the_sandwich((n, k, l) in window(), hp in 1u32..6) {
        let params = ChainParams::with_sigma(n, 1.0, 1.0, 1.0).unwrap();
        let w = AnalysisWindow::new(n, k, l, 0.1).unwrap();
        let r = sup_inf_extension(&params, &w, hp, Convention::Corrected).unwrap();
        prop_assert!(r.inf_lower <= r.inf_upper);
        prop_assert!(r.inf_upper <= r.sup_lower);
        prop_assert!(r.sup_lower <= r.sup_upper * (1.0 + 1e-12));
        prop_assert!(r.inf_upper <= -(l as f64) + 1e-9);
    }
}
