//! Decomposition of characters into irreducibles.
//!
//! The primary route peels off highest weights from the dominant slice. The
//! reflection route (Brauer–Klimyk) works on the full character and shares no
//! code with the first beyond the Weyl group action, so the two serve as
//! oracles for each other.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rustc_hash::FxHashMap;

use crate::charring::{
    add_mult, dominant_multiplicities, mul_mult, DominantSlice, FormalCharacter, Mult, Term, TermList,
};
use crate::error::{Error, Result};
use crate::rootdata::RootSystem;
use crate::weight::{fundamental_notation, Weight};

/// A non-negative combination of irreducible modules.
#[derive(Clone, Debug)]
pub struct IrrDecomposition {
    rs: Arc<RootSystem>,
    terms: BTreeMap<Weight, Mult>,
}

impl PartialEq for IrrDecomposition {
    fn eq(&self, other: &Self) -> bool {
        *self.rs == *other.rs && self.terms == other.terms
    }
}

impl IrrDecomposition {
    pub fn new(rs: Arc<RootSystem>, terms: impl IntoIterator<Item = (Weight, Mult)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (w, m) in terms {
            rs.check_weight(&w)?;
            if !rs.is_dominant(&w) {
                return Err(Error::NotDominant(w.to_string()));
            }
            if m < 0 {
                return Err(Error::NegativeMultiplicity(w.to_string()));
            }
            let e = map.entry(w).or_insert(0);
            *e = add_mult(*e, m)?;
        }
        map.retain(|_, m| *m != 0);
        Ok(IrrDecomposition { rs, terms: map })
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    pub fn terms(&self) -> &BTreeMap<Weight, Mult> {
        &self.terms
    }

    pub fn mult(&self, w: &Weight) -> Mult {
        self.terms.get(w).copied().unwrap_or(0)
    }

    /// Number of distinct highest weights.
    pub fn distinct(&self) -> usize {
        self.terms.len()
    }

    /// Number of summands counted with multiplicity.
    pub fn count(&self) -> Mult {
        self.terms.values().sum()
    }

    pub fn is_irreducible(&self) -> bool {
        self.count() == 1
    }

    pub fn dim(&self) -> Result<BigInt> {
        crate::charring::total_dimension(&self.rs, &self.terms)
    }

    /// Every summand of `other` occurs here with at least its multiplicity.
    pub fn contains(&self, other: &IrrDecomposition) -> bool {
        other.terms.iter().all(|(w, &m)| self.mult(w) >= m)
    }

    pub fn strictly_contains(&self, other: &IrrDecomposition) -> bool {
        self.contains(other) && self.terms != other.terms
    }

    /// Summands here that are not accounted for by `other`.
    pub fn difference(&self, other: &IrrDecomposition) -> Vec<(Weight, Mult)> {
        self.terms
            .iter()
            .filter_map(|(w, &m)| {
                let r = m - other.mult(w);
                (r > 0).then(|| (w.clone(), r))
            })
            .collect()
    }

    /// Dominant slice of the recombined character.
    pub fn recombine(&self) -> Result<DominantSlice> {
        let mut entries: BTreeMap<Weight, Mult> = BTreeMap::new();
        let mut dim: Mult = 0;
        for (lambda, &c) in &self.terms {
            for (mu, m) in dominant_multiplicities(&self.rs, lambda)? {
                let e = entries.entry(mu).or_insert(0);
                *e = add_mult(*e, mul_mult(c, m)?)?;
            }
            dim = add_mult(dim, mul_mult(c, self.rs.weyl_dim(lambda)? as Mult)?)?;
        }
        Ok(DominantSlice::from_parts(self.rs.clone(), entries, dim))
    }

    pub fn to_term_list(&self) -> TermList {
        TermList {
            rs: self.rs.name().to_string(),
            terms: self.terms.iter().map(|(w, &m)| Term { weight: w.clone(), mult: m }).collect(),
        }
    }

    pub fn from_term_list(list: &TermList) -> Result<Self> {
        let rs = Arc::new(RootSystem::parse(&list.rs)?);
        Self::new(rs, list.terms.iter().map(|t| (t.weight.clone(), t.mult)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_term_list()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let list: TermList = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_term_list(&list)
    }

    /// Human-readable sum such as `V(L1+L3) + 2 V(L2)`.
    pub fn pretty(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .rev()
            .map(|(w, &m)| {
                if m == 1 {
                    format!("V({})", fundamental_notation(w))
                } else {
                    format!("{m} V({})", fundamental_notation(w))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Iterated subtraction on the dominant slice. Fails with
/// [`Error::NegativeMultiplicity`] if the input is not a genuine character.
pub fn decompose(slice: &DominantSlice) -> Result<IrrDecomposition> {
    let rs = &slice.rs;
    let mut remaining: FxHashMap<Weight, Mult> =
        slice.entries.iter().filter(|(_, &m)| m != 0).map(|(w, &m)| (w.clone(), m)).collect();
    for w in remaining.keys() {
        if !rs.is_dominant(w) {
            return Err(Error::NotDominant(w.to_string()));
        }
    }
    let mut out = BTreeMap::new();
    while !remaining.is_empty() {
        let top = remaining
            .keys()
            .max_by(|a, b| rs.height_scaled(a).cmp(&rs.height_scaled(b)).then_with(|| a.cmp(b)))
            .cloned()
            .expect("non-empty");
        let c = remaining[&top];
        if c < 0 {
            return Err(Error::NegativeMultiplicity(top.to_string()));
        }
        for (mu, m) in dominant_multiplicities(rs, &top)? {
            let e = remaining.entry(mu.clone()).or_insert(0);
            *e -= mul_mult(c, m)?;
            if *e == 0 {
                remaining.remove(&mu);
            }
        }
        out.insert(top, c);
    }
    Ok(IrrDecomposition { rs: rs.clone(), terms: out })
}

pub fn decompose_character(ch: &FormalCharacter) -> Result<IrrDecomposition> {
    decompose(&ch.dominant_slice()?)
}

/// Brauer–Klimyk: move every `mu + rho` into the dominant chamber and keep
/// the regular ones with the sign of the reflection.
pub fn decompose_by_reflection(ch: &FormalCharacter) -> Result<IrrDecomposition> {
    let rs = ch.root_system().clone();
    let rho = rs.rho();
    let mut acc: BTreeMap<Weight, Mult> = BTreeMap::new();
    for (mu, &m) in ch.terms() {
        let (dom, odd) = rs.dominant_conjugate(&(mu + &rho));
        if rs.active_nodes().iter().any(|&i| dom[i] == 0) {
            continue;
        }
        let nu = &dom - &rho;
        let e = acc.entry(nu).or_insert(0);
        *e = add_mult(*e, if odd { -m } else { m })?;
    }
    acc.retain(|_, m| *m != 0);
    if let Some((w, _)) = acc.iter().find(|(_, &m)| m < 0) {
        return Err(Error::NegativeMultiplicity(w.to_string()));
    }
    Ok(IrrDecomposition { rs, terms: acc })
}

/// Racah–Speiser decomposition of `V_lambda (x) V_mu`.
pub fn tensor_product_racah(rs: Arc<RootSystem>, lambda: &Weight, mu: &Weight) -> Result<IrrDecomposition> {
    let small = FormalCharacter::irreducible(rs.clone(), lambda)?;
    if !rs.is_dominant(mu) {
        return Err(Error::NotDominant(mu.to_string()));
    }
    let rho = rs.rho();
    let shift = mu + &rho;
    let mut acc: BTreeMap<Weight, Mult> = BTreeMap::new();
    for (nu, &m) in small.terms() {
        let (dom, odd) = rs.dominant_conjugate(&(nu + &shift));
        if rs.active_nodes().iter().any(|&i| dom[i] == 0) {
            continue;
        }
        let e = acc.entry(&dom - &rho).or_insert(0);
        *e = add_mult(*e, if odd { -m } else { m })?;
    }
    acc.retain(|_, m| *m != 0);
    IrrDecomposition::new(rs, acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> Weight {
        Weight::from_slice(v).unwrap()
    }

    #[test]
    fn clebsch_gordan() {
        let rs = Arc::new(RootSystem::parse("A1").unwrap());
        let d = tensor_product_racah(rs.clone(), &w(&[2]), &w(&[3])).unwrap();
        let expect = IrrDecomposition::new(rs, [(w(&[5]), 1), (w(&[3]), 1), (w(&[1]), 1)]).unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn routes_agree_on_g2_square() {
        let rs = Arc::new(RootSystem::parse("G2").unwrap());
        let v = FormalCharacter::irreducible(rs.clone(), &w(&[1, 0])).unwrap();
        let sq = v.product(&v).unwrap();
        let a = decompose_character(&sq).unwrap();
        let b = decompose_by_reflection(&sq).unwrap();
        assert_eq!(a, b);
        // 7 x 7 = 1 + 7 + 14 + 27
        assert_eq!(a.count(), 4);
        assert_eq!(a.dim().unwrap(), BigInt::from(49));
    }

    #[test]
    fn negative_multiplicity_detected() {
        let rs = Arc::new(RootSystem::parse("A1").unwrap());
        let ch = FormalCharacter::from_terms(rs, [(w(&[0]), -1)]).unwrap();
        assert!(matches!(decompose_character(&ch), Err(Error::NegativeMultiplicity(_))));
    }

    #[test]
    fn recombine_round_trip() {
        let rs = Arc::new(RootSystem::parse("B3").unwrap());
        let v = FormalCharacter::irreducible(rs, &w(&[0, 0, 1])).unwrap();
        let s = v.exterior_power(3).unwrap().dominant_slice().unwrap();
        let d = decompose(&s).unwrap();
        let back = d.recombine().unwrap();
        assert_eq!(back.entries, s.entries);
        assert_eq!(back.dim, s.dim);
    }
}
