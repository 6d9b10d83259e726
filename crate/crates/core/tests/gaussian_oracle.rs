mod common;

use common::{dense_conditional_eigenvalue, dense_symplectic_eigenvalues, g, random_physical};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zpcqkd_core::gaussian::{holevo_bound, mutual_information, symplectic_eigenvalues, symplectic_spectrum, von_neumann_g};
use zpcqkd_core::{secret_key_rate, ProtocolParams, TwoModeCovariance};

#[test]
fn closed_form_spectrum_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let cm = random_physical(&mut rng);
        let (l1, l2) = symplectic_eigenvalues(&cm).unwrap();
        let (o1, o2) = dense_symplectic_eigenvalues(&cm);
        assert!(((l1 - o1) / o1).abs() < 1e-10, "{cm:?}: {l1} vs {o1}");
        assert!(((l2 - o2) / o2).abs() < 1e-10, "{cm:?}: {l2} vs {o2}");
        assert!(l1 >= l2 && l2 >= 1.0 - 1e-9);
    }
}

#[test]
fn partially_correlated_symmetric_state() {
    let v: f64 = 5.0;
    let cm = TwoModeCovariance::new(v, v, (0.8 * (v * v - 1.0)).sqrt()).unwrap();
    let (l1, l2) = symplectic_eigenvalues(&cm).unwrap();
    let (o1, o2) = dense_symplectic_eigenvalues(&cm);
    assert!((l1 - o1).abs() < 1e-12 && (l2 - o2).abs() < 1e-12);
    // symmetric state: degenerate spectrum √(V² − Z²) = √5.8
    assert!((l1 - 5.8f64.sqrt()).abs() < 1e-12);
}

#[test]
fn conditional_eigenvalue_matches_general_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let cm = random_physical(&mut rng);
        let s = symplectic_spectrum(&cm).unwrap();
        let oracle = dense_conditional_eigenvalue(&cm);
        assert!((s.lambda3 - oracle).abs() < 1e-9 * oracle, "{cm:?}");
    }
}

#[test]
fn paper_parameter_holevo_matches_dense_pipeline() {
    let p = ProtocolParams::default().with_t(0.7).with_l_ab(20.0).unwrap();
    let r = secret_key_rate(&p).unwrap();
    let (o1, o2) = dense_symplectic_eigenvalues(&r.cm_out);
    let o3 = dense_conditional_eigenvalue(&r.cm_out);
    let oracle = g((o1 - 1.0) / 2.0) + g((o2 - 1.0) / 2.0) - g((o3.max(1.0) - 1.0) / 2.0);
    let chi = holevo_bound(&r.cm_out).unwrap();
    assert!((chi - oracle).abs() < 1e-9, "{chi} vs {oracle}");
    assert!(r.chi_be > 0.0);
    assert_eq!(chi, r.chi_be);
}

#[test]
fn holevo_is_non_negative_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let cm = random_physical(&mut rng);
        assert!(holevo_bound(&cm).unwrap() >= -1e-12);
    }
}

proptest! {
    #[test]
    fn mutual_information_even_in_z(x in 1.0f64..100.0, y in 1.0f64..100.0, frac in 0.0f64..1.0) {
        let z = frac * (x * y).sqrt();
        let a = TwoModeCovariance::new(x, y, z).unwrap();
        let b = TwoModeCovariance::new(x, y, -z).unwrap();
        prop_assert_eq!(mutual_information(&a).unwrap(), mutual_information(&b).unwrap());
        prop_assert!(mutual_information(&a).unwrap() >= 0.0);
    }

    #[test]
    fn g_strictly_increasing(a in 0.0f64..1e3, b in 0.0f64..1e3) {
        prop_assume!((a - b).abs() > 1e-9 * a.max(b).max(1.0));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(von_neumann_g(lo).unwrap() < von_neumann_g(hi).unwrap());
    }

    #[test]
    fn epr_states_are_pure(v in 1.0f64..500.0) {
        let cm = TwoModeCovariance::epr(v).unwrap();
        let (l1, l2) = symplectic_eigenvalues(&cm).unwrap();
        prop_assert!((l1 - 1.0).abs() < 1e-9 && (l2 - 1.0).abs() < 1e-9);
        prop_assert!(holevo_bound(&cm).unwrap().abs() < 1e-9);
    }
}
