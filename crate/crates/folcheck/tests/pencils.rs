//! Skew pencils: agreement of the two divisibility tests and congruence
//! invariance.

use folcheck::linalg::{q, Q};
use folcheck::pencil::{self, SkewPencil};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shape() -> impl Strategy<Value = (Vec<usize>, Vec<Q>)> {
    (1usize..=5).prop_flat_map(|n| {
        let parts = pencil::partitions(n);
        prop::sample::select(parts).prop_flat_map(|p| {
            let r = p.len();
            (Just(p), prop::collection::vec((-2i64..=2).prop_map(q), r))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn tests_agree_and_survive_congruence((p, vals) in shape(), seed: u64) {
        let base = SkewPencil::canonical(&p, &vals).unwrap();
        prop_assert!(base.is_skew());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let moved = base.congruent(&pencil::random_invertible(&mut rng, 2 * base.n())).unwrap();
        let a = pencil::divides_wedge_square(&base.w(), &base.v()).unwrap().0;
        let b = pencil::divides_wedge_square(&moved.w(), &moved.v()).unwrap().0;
        let solved = pencil::solve_wedge_square(&moved.w(), &moved.v()).unwrap().is_some();
        prop_assert_eq!(a, b);
        prop_assert_eq!(b, solved);
    }
}

#[test]
fn diagonal_pencil_decomposes() {
    let r = pencil::verify_pencil(&[1, 1, 1, 1], &[q(5), q(3), q(3), q(3)]).unwrap();
    assert!(r.divisible && r.verdict_matches);
    assert_eq!(r.decomposition.unwrap().a, "3");
}

#[test]
fn two_two_is_obstructed() {
    let r = pencil::verify_pencil(&[2, 2], &[q(1), q(1)]).unwrap();
    assert!(!r.divisible);
    assert!(r.witness.is_some());
    assert!(r.proof_witness.unwrap().in_kernel);
}

#[test]
fn trichotomy_from_four_on() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 4..=5 {
        for p in pencil::partitions(n) {
            for vals in pencil::value_patterns(&mut rng, p.len()) {
                let r = pencil::verify_pencil(&p, &vals).unwrap();
                assert!(r.verdict_matches && r.tests_agree, "{p:?} {:?}", r.values);
            }
        }
    }
}

#[test]
fn every_pencil_of_size_six_is_divisible() {
    // With 2n = 6, wedging with a nondegenerate w maps 2-vectors onto
    // 4-vectors, so w divides every v ^ v.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in pencil::partitions(3) {
        for vals in pencil::value_patterns(&mut rng, p.len()) {
            let r = pencil::verify_pencil(&p, &vals).unwrap();
            assert!(r.divisible && r.divisible_by_solving, "{p:?}");
        }
    }
}
