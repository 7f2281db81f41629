//! Polynomial forms: calculus identities on random inputs and the classical
//! examples.

use folcheck::linalg::q;
use folcheck::pforms::{self, PolyForm};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn form(seed: u64, n: usize, p: usize, d: usize) -> PolyForm {
    pforms::random_form(&mut ChaCha8Rng::seed_from_u64(seed), n, p, d, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn d_squared_vanishes(seed: u64, n in 1usize..4, p in 0usize..3, d in 0usize..4) {
        prop_assume!(p <= n + 1);
        prop_assert!(form(seed, n, p, d).exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn radial_squared_vanishes(seed: u64, n in 1usize..4, p in 2usize..4, d in 0usize..3) {
        prop_assume!(p <= n + 1);
        prop_assert!(form(seed, n, p, d).contract_radial().unwrap().contract_radial().unwrap().is_zero());
    }

    #[test]
    fn leibniz(a: u64, b: u64, p in 0usize..3, q2 in 0usize..2, d1 in 1usize..3, d2 in 1usize..3) {
        let n = 3;
        let w = form(a, n, p, d1);
        let eta = form(b, n, q2, d2);
        let lhs = w.wedge(&eta).unwrap().exterior_derivative();
        let sign = if p % 2 == 0 { q(1) } else { q(-1) };
        let rhs = w.exterior_derivative().wedge(&eta).unwrap()
            .add(&w.wedge(&eta.exterior_derivative()).unwrap().scale(&sign)).unwrap();
        prop_assert!(lhs == rhs || (lhs.is_zero() && rhs.is_zero()));
    }

    #[test]
    fn euler_identity_on_contractions(seed: u64, p in 2usize..4, d in 0usize..3) {
        let section = form(seed, 3, p, d).contract_radial().unwrap();
        prop_assert!(section.euler_identity_check().unwrap());
    }

    #[test]
    fn pencil_forms_are_integrable(a: u64, b: u64, d in 1usize..3) {
        let f = form(a, 3, 0, d);
        let g = form(b, 3, 0, d);
        let omega = f.wedge(&g.exterior_derivative()).unwrap().sub(&g.wedge(&f.exterior_derivative()).unwrap()).unwrap();
        prop_assert!(omega.is_radially_closed().unwrap());
        prop_assert!(omega.is_integrable().unwrap());
    }

    #[test]
    fn psi_is_quadratic(a: u64, c in -4i64..5) {
        let omega = form(a, 3, 2, 0).contract_radial().unwrap();
        let scaled = omega.scale(&q(c)).psi_wedge_d().unwrap();
        prop_assert_eq!(scaled, omega.psi_wedge_d().unwrap().scale(&q(c * c)));
        prop_assert_eq!(omega.psi_bilinear(&omega).unwrap(), omega.psi_wedge_d().unwrap());
    }

    #[test]
    fn json_round_trip(seed: u64, p in 0usize..3, d in 0usize..3) {
        let w = form(seed, 3, p, d);
        prop_assume!(!w.is_zero());
        prop_assert_eq!(PolyForm::from_json(&w.to_json()).unwrap(), w);
    }
}

#[test]
fn plucker_correspondence() {
    let e01 = pforms::form_from_multivector(&pforms::constant_form(3, &[0, 1]).unwrap()).unwrap();
    let x0 = PolyForm::variable(3, 0).unwrap();
    let x1 = PolyForm::variable(3, 1).unwrap();
    let expect = x0.wedge(&x1.exterior_derivative()).unwrap().sub(&x1.wedge(&x0.exterior_derivative()).unwrap()).unwrap();
    assert_eq!(e01, expect);
    assert!(e01.is_integrable().unwrap());
    assert!(e01.euler_identity_check().unwrap());
}

#[test]
fn contact_form_is_not_integrable() {
    for l in 2..=4 {
        let omega = pforms::contact_form(3, l).unwrap();
        assert!(omega.is_radially_closed().unwrap());
        assert!(!omega.is_integrable().unwrap());
        let display = pforms::contact_psi_display(3, l).unwrap();
        assert_eq!(omega.psi_wedge_d().unwrap().ratio_to(&display), Some(q(2)));
    }
}

#[test]
fn kernel_dimensions() {
    for n in 1..=6 {
        assert_eq!(pforms::radial_kernel_dim(n, 1, 1).unwrap(), (n + 1) * n / 2);
    }
}
