use proptest::prelude::*;

use discrete_canonical::lattice_ops::{a_p_element, a_q_element};
use discrete_canonical::numerics::unit_phase;
use discrete_canonical::phase_field::{phi, theta_product, theta_sum};
use discrete_canonical::template_state::{psi, template_overlap_q};

/// Points of the open square at least `gap` from the corner vortex.
fn square(gap: f64) -> impl Strategy<Value = (f64, f64)> {
    (-0.4999f64..0.4999, -0.4999f64..0.4999)
        .prop_filter("near the vortex", move |&(a, b)| (0.5 - a.abs()).hypot(0.5 - b.abs()) > gap)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn phi_sum_rule((eta, xi) in square(1e-3)) {
        let s = phi(eta, xi).unwrap() + phi(xi, eta).unwrap();
        prop_assert!((s - xi * eta).abs() < 1e-10);
    }

    #[test]
    fn phi_quasi_periods((eta, xi) in square(1e-3), shift in -3i64..=3) {
        let base = phi(eta, xi).unwrap();
        let moved = phi(eta, xi + shift as f64).unwrap();
        prop_assert!((moved - base - shift as f64 * eta).abs() < 1e-10);
        prop_assert!((phi(eta + shift as f64, xi).unwrap() - base).abs() < 1e-10);
    }

    #[test]
    fn phi_is_odd_in_each_argument((eta, xi) in square(1e-3)) {
        let base = phi(eta, xi).unwrap();
        prop_assert!((phi(eta, -xi).unwrap() + base).abs() < 1e-12);
        prop_assert!((phi(-eta, xi).unwrap() + base).abs() < 1e-12);
    }

    #[test]
    fn theta_forms_agree((eta, xi) in square(0.05), cell in -1i64..=1) {
        let x = xi + cell as f64;
        let s = theta_sum(eta, x, 12).unwrap();
        let p = theta_product(eta, x, 8);
        prop_assert!((s - p).norm() < 1e-12 * s.norm());
    }

    #[test]
    fn closed_form_elements_are_hermitian(q1 in -30i64..30, p1 in -30i64..30, q2 in -30i64..30, p2 in -30i64..30) {
        prop_assert!((a_q_element(q1, p1, q2, p2) - a_q_element(q2, p2, q1, p1).conj()).norm() < 1e-15);
        prop_assert!((a_p_element(q1, p1, q2, p2) - a_p_element(q2, p2, q1, p1).conj()).norm() < 1e-15);
    }

    #[test]
    fn closed_form_elements_are_translation_invariant(
        q1 in -20i64..20, p1 in -20i64..20, q2 in -20i64..20, p2 in -20i64..20, sq in -9i64..9, sp in -9i64..9,
    ) {
        prop_assert_eq!(a_q_element(q1, p1, q2, p2), a_q_element(q1 + sq, p1 + sp, q2 + sq, p2 + sp));
        prop_assert_eq!(a_p_element(q1, p1, q2, p2), a_p_element(q1 + sq, p1 + sp, q2 + sq, p2 + sp));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn psi_is_even(x in 0.0f64..6.0) {
        prop_assert!((psi(x).unwrap() - psi(-x).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn lattice_states_are_translated_and_modulated_templates(q in -4.0f64..4.0, big_q in -3i64..=3, big_p in -3i64..=3) {
        let z = template_overlap_q(big_q, big_p, q).unwrap();
        let expected = psi(q - big_q as f64).unwrap() * unit_phase(-(big_p as f64) * q);
        prop_assert!((z - expected).norm() < 1e-12);
    }
}
