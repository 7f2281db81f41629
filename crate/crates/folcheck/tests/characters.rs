//! Character-level oracles: Weyl dimension, reflection and Racah–Speiser
//! decompositions against iterated subtraction.

use std::sync::Arc;

use folcheck::charring::{self, FormalCharacter};
use folcheck::decomp::{self, IrrDecomposition};
use folcheck::{RootSystem, Weight};
use proptest::prelude::*;

fn system() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["A1", "A2", "A3", "B2", "C3", "G2", "A1xA2", "D4", "B3"])
}

fn weight(rank: usize, max: i32) -> impl Strategy<Value = Weight> {
    prop::collection::vec(0..=max, rank).prop_map(|v| Weight::from_slice(&v).unwrap())
}

fn system_and_weights() -> impl Strategy<Value = (Arc<RootSystem>, Weight, Weight)> {
    system().prop_flat_map(|s| {
        let rs = Arc::new(RootSystem::parse(s).unwrap());
        let r = rs.rank();
        (Just(rs), weight(r, 2), weight(r, 1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_is_weyl_dimension((rs, lambda, _) in system_and_weights()) {
        let ch = FormalCharacter::irreducible(rs.clone(), &lambda).unwrap();
        prop_assert_eq!(ch.dim().unwrap() as u128, rs.weyl_dim(&lambda).unwrap());
    }

    #[test]
    fn irreducible_decomposes_to_itself((rs, lambda, _) in system_and_weights()) {
        let ch = FormalCharacter::irreducible(rs.clone(), &lambda).unwrap();
        let dec = decomp::decompose_character(&ch).unwrap();
        prop_assert_eq!(dec, IrrDecomposition::new(rs, [(lambda, 1)]).unwrap());
    }

    #[test]
    fn tensor_products_agree((rs, lambda, mu) in system_and_weights()) {
        let a = FormalCharacter::irreducible(rs.clone(), &lambda).unwrap();
        let b = FormalCharacter::irreducible(rs.clone(), &mu).unwrap();
        let prod = a.product(&b).unwrap();
        let by_subtraction = decomp::decompose_character(&prod).unwrap();
        let by_reflection = decomp::decompose_by_reflection(&prod).unwrap();
        let by_racah = decomp::tensor_product_racah(rs.clone(), &lambda, &mu).unwrap();
        prop_assert_eq!(&by_subtraction, &by_reflection);
        prop_assert_eq!(&by_subtraction, &by_racah);
        let slice = charring::tensor_irreducibles(rs, &lambda, &mu).unwrap();
        prop_assert_eq!(&decomp::decompose(&slice).unwrap(), &by_subtraction);
    }

    #[test]
    fn recombination_round_trip((rs, lambda, mu) in system_and_weights()) {
        let ch = FormalCharacter::irreducible(rs.clone(), &lambda).unwrap()
            .add(&FormalCharacter::irreducible(rs, &mu).unwrap()).unwrap();
        let slice = ch.exterior_power_dominant(2).unwrap();
        let dec = decomp::decompose(&slice).unwrap();
        let back = dec.recombine().unwrap();
        prop_assert_eq!(&back.entries, &slice.entries);
        prop_assert_eq!(dec.dim().unwrap(), num_bigint::BigInt::from(slice.dim));
    }

    #[test]
    fn dominant_powers_match_full_powers((rs, lambda, _) in system_and_weights(), k in 2usize..=3) {
        let ch = FormalCharacter::irreducible(rs, &lambda).unwrap();
        let full = ch.exterior_power(k).unwrap().dominant_slice().unwrap();
        prop_assert_eq!(&ch.exterior_power_dominant(k).unwrap().entries, &full.entries);
        let full = ch.symmetric_power(k).unwrap().dominant_slice().unwrap();
        prop_assert_eq!(&ch.symmetric_power_dominant(k).unwrap().entries, &full.entries);
    }

    #[test]
    fn character_json_round_trip((rs, lambda, _) in system_and_weights()) {
        let ch = FormalCharacter::irreducible(rs, &lambda).unwrap();
        prop_assert_eq!(FormalCharacter::from_json(&ch.to_json()).unwrap(), ch);
    }
}

#[test]
fn exterior_square_of_vector_modules() {
    let rs = Arc::new(RootSystem::parse("A4").unwrap());
    let ch = FormalCharacter::irreducible(rs.clone(), &Weight::fundamental(4, 0)).unwrap();
    let dec = decomp::decompose(&ch.exterior_power_dominant(2).unwrap()).unwrap();
    assert_eq!(dec, IrrDecomposition::new(rs, [(Weight::fundamental(4, 1), 1)]).unwrap());
}

#[test]
fn virtual_character_is_rejected() {
    let rs = Arc::new(RootSystem::parse("A2").unwrap());
    let ch = FormalCharacter::irreducible(rs, &Weight::fundamental(2, 0)).unwrap().scale(-1).unwrap();
    assert!(decomp::decompose_character(&ch).is_err());
}
