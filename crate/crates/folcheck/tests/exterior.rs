//! Exterior algebra over three-forms: multiply-back, equivariance and the
//! rank of bivectors.

use folcheck::extalg::{self, HwTag, MultiVector};
use folcheck::linalg::q;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random(seed: u64, n: usize, k: usize, terms: usize) -> MultiVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    extalg::random_multivector(&mut rng, n, 3, k, terms).unwrap()
}

fn operator(n: usize) -> impl Strategy<Value = (usize, usize)> {
    (1..=n, 1..=n).prop_filter("distinct indices", |(r, s)| r != s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn multiply_back_is_three(seed: u64, terms in 1usize..5) {
        let x = random(seed, 6, 4, terms);
        prop_assert_eq!(extalg::psi_dual(&x).unwrap().multiply_back(), x.scale(&q(3)));
    }

    #[test]
    fn psi_and_xi_are_equivariant(seed: u64, (r, s) in operator(6)) {
        let x = random(seed, 6, 4, 3);
        let sx = extalg::psi_dual(&x).unwrap();
        prop_assert_eq!(extalg::psi_dual(&x.sl_action(r, s).unwrap()).unwrap(), sx.sl_action(r, s).unwrap());
        prop_assert_eq!(extalg::xi(&sx.sl_action(r, s).unwrap()), extalg::xi(&sx).sl_action(r, s).unwrap());
    }

    #[test]
    fn m_is_equivariant(seed: u64, (r, s) in operator(7)) {
        let y = random(seed, 7, 2, 4);
        prop_assert_eq!(
            extalg::multiply_m(&y.sl_action(r, s).unwrap()).unwrap(),
            extalg::multiply_m(&y).unwrap().sl_action(r, s).unwrap()
        );
    }

    #[test]
    fn wedge_is_graded_commutative(a: u64, b: u64) {
        let x = random(a, 6, 1, 3);
        let y = random(b, 6, 1, 3);
        // Elements of W have odd inner degree but sit in outer degree one,
        // where the outer algebra is plainly alternating.
        prop_assert_eq!(x.wedge(&y).unwrap(), y.wedge(&x).unwrap().scale(&q(-1)));
    }

    #[test]
    fn json_round_trip(seed: u64) {
        let x = random(seed, 6, 2, 4);
        prop_assert_eq!(MultiVector::from_json(6, 3, &x.to_json()).unwrap(), x);
    }
}

#[test]
fn named_vectors_are_highest_weight() {
    for tag in HwTag::ALL {
        let n = tag.min_n();
        let v = extalg::build_hw_vector(tag, n).unwrap();
        assert!(extalg::is_highest_weight(&v, &tag.gl_weight(n)).unwrap(), "{tag}");
    }
}

#[test]
fn w6_rank_and_powers() {
    let w6 = extalg::build_hw_vector(HwTag::W6, 6).unwrap();
    assert_eq!(w6.skew_rank().unwrap(), 20);
    assert!(!w6.power(10).unwrap().is_zero());
    assert!(w6.power(11).unwrap().is_zero());
}

#[test]
fn w6_square_ratio() {
    let t = extalg::build_hw_tensor(HwTag::W6, 6).unwrap();
    let sq = t.tensor(&t).unwrap();
    let total = extalg::xi_psi(&sq.alternate()).unwrap();
    let goal = extalg::MixedTensor::from_product(&[1, 2, 3, 4, 5, 6], &extalg::build_hw_vector(HwTag::W6, 6).unwrap()).unwrap();
    assert_eq!(total.ratio_to(&goal), Some(q(1296)));
}
