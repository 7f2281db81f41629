//! Nested exterior algebra over `W = ⋀^m ℂⁿ`.
//!
//! Vectors `e_I` of `W` are indexed by `m`-subsets `I ⊆ {1..n}`, ranked
//! lexicographically by a shared [`InnerBasis`]. A [`MultiVector`] is an
//! element of `⋀^k W` keyed by strictly increasing tuples of inner ranks. A
//! [`TensorRep`] keeps an element of `W^{⊗k}` before alternation, which is
//! needed to evaluate the three pair-product parts of `Ψ∨` separately.
//! [`SymSquare`] lives in `S²⋀²W` and [`MixedTensor`] in `⋀^{2m}ℂⁿ ⊗ ⋀²W`.
//!
//! Public index lists are 1-based, matching `e_{1,2,3}` notation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use rand::Rng;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::linalg;

pub type Q = BigRational;
pub type Outer = SmallVec<[u32; 4]>;
/// A basis vector of `⋀²W`: two inner ranks with `first < second`.
pub type Pair = (u32, u32);

/// Lexicographically ranked `m`-subsets of `{0..n-1}`, stored as bitmasks.
#[derive(Debug)]
pub struct InnerBasis {
    n: usize,
    m: usize,
    subsets: Vec<u64>,
    index: FxHashMap<u64, u32>,
}

impl InnerBasis {
    /// The cached basis for `(n, m)`.
    pub fn shared(n: usize, m: usize) -> Result<Arc<Self>> {
        if n == 0 || n > 63 || m == 0 || m > n {
            return Err(Error::Precondition(format!("inner basis needs 1 <= m <= n <= 63, got n={n}, m={m}")));
        }
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<InnerBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        Ok(guard
            .entry((n, m))
            .or_insert_with(|| {
                let subsets: Vec<u64> =
                    (0..n).combinations(m).map(|c| c.iter().fold(0u64, |acc, &i| acc | 1 << i)).collect();
                let index = subsets.iter().enumerate().map(|(r, &s)| (s, r as u32)).collect();
                Arc::new(InnerBasis { n, m, subsets, index })
            })
            .clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    pub fn mask(&self, rank: u32) -> u64 {
        self.subsets[rank as usize]
    }

    pub fn rank_of(&self, mask: u64) -> Option<u32> {
        self.index.get(&mask).copied()
    }

    /// 1-based sorted indices of the subset with the given rank.
    pub fn indices(&self, rank: u32) -> Vec<usize> {
        mask_indices(self.mask(rank))
    }

    /// Normalizes a 1-based index list to `(rank, sign)`; repeated indices
    /// give `Ok(None)`.
    pub fn normalize(&self, idx: &[usize]) -> Result<Option<(u32, i64)>> {
        if idx.len() != self.m {
            return Err(Error::Precondition(format!("expected {} indices, got {}", self.m, idx.len())));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i == 0 || i > self.n) {
            return Err(Error::Precondition(format!("index {bad} outside 1..={}", self.n)));
        }
        Ok(normalize_list(idx).map(|(mask, s)| (self.index[&mask], s)))
    }
}

fn mask_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Sorts a 1-based index list into a bitmask, returning the permutation sign,
/// or `None` on a repeated index.
fn normalize_list(idx: &[usize]) -> Option<(u64, i64)> {
    let mut mask = 0u64;
    let mut inversions = 0usize;
    for (a, &i) in idx.iter().enumerate() {
        let bit = 1u64 << (i - 1);
        if mask & bit != 0 {
            return None;
        }
        mask |= bit;
        inversions += idx[..a].iter().filter(|&&j| j > i).count();
    }
    Some((mask, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// Sorts an outer tuple in place and returns the sign, or `None` if two
/// entries coincide.
fn sort_outer(key: &mut [u32]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..key.len() {
        let mut j = i;
        while j > 0 && key[j - 1] > key[j] {
            key.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if key.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// `e_A ∧ e_B` for disjoint masks, as `(A ∪ B, sign)`.
fn concat_masks(a: u64, b: u64) -> Option<(u64, i64)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = a;
    while rest != 0 {
        let i = rest.trailing_zeros();
        swaps += (b & ((1u64 << i) - 1)).count_ones();
        rest &= rest - 1;
    }
    Some((a | b, if swaps % 2 == 0 { 1 } else { -1 }))
}

/// `X_{r,s}` on a single subset (0-based bit positions).
fn raise_mask(mask: u64, r: usize, s: usize) -> Option<(u64, i64)> {
    if mask >> s & 1 == 0 || mask >> r & 1 == 1 {
        return None;
    }
    let (lo, hi) = if r < s { (r, s) } else { (s, r) };
    let between = mask & ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    let sign = if between.count_ones() % 2 == 0 { 1 } else { -1 };
    Some((mask & !(1 << s) | 1 << r, sign))
}

fn pair_key(a: u32, b: u32) -> Option<(Pair, i64)> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some(((a, b), 1)),
        std::cmp::Ordering::Greater => Some(((b, a), -1)),
        std::cmp::Ordering::Equal => None,
    }
}

fn signed(c: &Q, s: i64) -> Q {
    if s < 0 {
        -c.clone()
    } else {
        c.clone()
    }
}

fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn add_to<K: std::hash::Hash + Eq>(map: &mut FxHashMap<K, Q>, k: K, c: Q) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

fn check_sl_indices(n: usize, r: usize, s: usize) -> Result<(usize, usize)> {
    if r == s || r == 0 || s == 0 || r > n || s > n {
        return Err(Error::Precondition(format!("X_({r},{s}) needs distinct indices in 1..={n}")));
    }
    Ok((r - 1, s - 1))
}

/// All permutations of `0..k` with their signs, in lexicographic order.
pub fn signed_permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    (0..k)
        .permutations(k)
        .map(|p| {
            let inv = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (p, if inv % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

/// An element of `⋀^k W`.
#[derive(Clone)]
pub struct MultiVector {
    basis: Arc<InnerBasis>,
    degree: usize,
    terms: FxHashMap<Outer, Q>,
}

impl PartialEq for MultiVector {
    fn eq(&self, other: &Self) -> bool {
        self.basis.n == other.basis.n && self.basis.m == other.basis.m && self.degree == other.degree && self.terms == other.terms
    }
}

impl fmt::Debug for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiVector(n={}, m={}, k={}, {})", self.basis.n, self.basis.m, self.degree, self)
    }
}

impl fmt::Display for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (key, c)) in self.sorted_terms().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let slots: Vec<String> =
                key.iter().map(|&r| format!("e{}", self.basis.indices(r).iter().join(","))).collect();
            write!(f, "({c}) {}", slots.join("^"))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct MultiTerm {
    outer: Vec<Vec<usize>>,
    coeff: CoeffRepr,
}

pub(crate) fn parse_coeff(s: &str) -> Result<Q> {
    Q::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad rational coefficient {s:?}")))
}

impl MultiVector {
    pub fn zero(basis: Arc<InnerBasis>, degree: usize) -> Self {
        MultiVector { basis, degree, terms: FxHashMap::default() }
    }

    /// `e_{I_1} ∧ … ∧ e_{I_k}` from 1-based index lists, normalized with sign.
    pub fn monomial(n: usize, m: usize, slots: &[&[usize]]) -> Result<Self> {
        let basis = InnerBasis::shared(n, m)?;
        let mut out = MultiVector::zero(basis.clone(), slots.len());
        let mut key = Outer::new();
        let mut sign = 1;
        for s in slots {
            match basis.normalize(s)? {
                Some((r, sg)) => {
                    key.push(r);
                    sign *= sg;
                }
                None => return Ok(out),
            }
        }
        if let Some(sg) = sort_outer(&mut key) {
            out.terms.insert(key, q_int(sign * sg));
        }
        Ok(out)
    }

    /// Builds an element from `(outer key, coefficient)` pairs; keys may be
    /// unsorted and are normalized with sign.
    pub fn from_terms(basis: Arc<InnerBasis>, degree: usize, terms: impl IntoIterator<Item = (Outer, Q)>) -> Result<Self> {
        let mut out = MultiVector::zero(basis, degree);
        for (mut k, c) in terms {
            if k.len() != degree || k.iter().any(|&r| r as usize >= out.basis.dim()) {
                return Err(Error::Precondition(format!("malformed key {k:?}")));
            }
            if let Some(sg) = sort_outer(&mut k) {
                add_to(&mut out.terms, k, signed(&c, sg));
            }
        }
        Ok(out)
    }

    pub fn basis(&self) -> &Arc<InnerBasis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.n
    }

    pub fn inner_degree(&self) -> usize {
        self.basis.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &FxHashMap<Outer, Q> {
        &self.terms
    }

    pub fn coeff(&self, key: &[u32]) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of an arbitrary (possibly unsorted) 1-based basis key, with
    /// the normalization sign applied.
    pub fn coefficient_of(&self, slots: &[&[usize]]) -> Result<Q> {
        if slots.len() != self.degree {
            return Err(Error::DegreeMismatch(format!("key has {} slots, element has degree {}", slots.len(), self.degree)));
        }
        let unit = MultiVector::monomial(self.n(), self.inner_degree(), slots)?;
        let Some((key, sign)) = unit.terms.iter().next() else {
            return Err(Error::Precondition("degenerate basis key".into()));
        };
        Ok(self.coeff(key) * sign)
    }

    pub fn sorted_terms(&self) -> Vec<(&Outer, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis.n != other.basis.n || self.basis.m != other.basis.m {
            return Err(Error::DegreeMismatch("multivectors over different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeMismatch(format!("cannot add degrees {} and {}", self.degree, other.degree)));
        }
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        let src = if self.is_zero() { &self.terms } else { &other.terms };
        for (k, c) in src {
            add_to(&mut out.terms, k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = MultiVector::zero(self.basis.clone(), self.degree);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        if degree > self.basis.dim() {
            return Err(Error::DegreeOverflow(format!("degree {degree} exceeds dim W = {}", self.basis.dim())));
        }
        let parts: Vec<FxHashMap<Outer, Q>> = self
            .terms
            .par_iter()
            .fold(FxHashMap::default, |mut acc, (ka, ca)| {
                for (kb, cb) in &other.terms {
                    let mut key: Outer = ka.iter().chain(kb.iter()).copied().collect();
                    if let Some(sg) = sort_outer(&mut key) {
                        let c = ca * cb;
                        add_to(&mut acc, key, if sg < 0 { -c } else { c });
                    }
                }
                acc
            })
            .collect();
        let mut out = MultiVector::zero(self.basis.clone(), degree);
        for p in parts {
            for (k, c) in p {
                add_to(&mut out.terms, k, c);
            }
        }
        Ok(out)
    }

    /// `x^k = x ∧ … ∧ x`; zero once the degree passes `dim W`.
    pub fn power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            let mut one = MultiVector::zero(self.basis.clone(), 0);
            one.terms.insert(Outer::new(), Q::one());
            return Ok(one);
        }
        if k * self.degree > self.basis.dim() {
            return Ok(MultiVector::zero(self.basis.clone(), k * self.degree));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// The `𝔰𝔩ₙ` operator `X_{r,s}` acting as a derivation on every slot.
    pub fn sl_action(&self, r: usize, s: usize) -> Result<Self> {
        let (r, s) = check_sl_indices(self.n(), r, s)?;
        let mut out = MultiVector::zero(self.basis.clone(), self.degree);
        for (key, c) in &self.terms {
            for slot in 0..key.len() {
                let Some((mask, sg)) = raise_mask(self.basis.mask(key[slot]), r, s) else { continue };
                let mut k2 = key.clone();
                k2[slot] = self.basis.index[&mask];
                if let Some(sg2) = sort_outer(&mut k2) {
                    add_to(&mut out.terms, k2, if sg * sg2 < 0 { -c.clone() } else { c.clone() });
                }
            }
        }
        Ok(out)
    }

    /// The `𝔤𝔩ₙ` weight (occurrence count of each index) if all terms share it.
    pub fn gl_weight(&self) -> Option<Vec<i32>> {
        let mut weight: Option<Vec<i32>> = None;
        for key in self.terms.keys() {
            let mut w = vec![0; self.n()];
            for &r in key {
                for i in self.basis.indices(r) {
                    w[i - 1] += 1;
                }
            }
            match &weight {
                None => weight = Some(w),
                Some(prev) if *prev != w => return None,
                _ => {}
            }
        }
        weight
    }

    /// Rank of the skew matrix of a degree-2 element.
    pub fn skew_rank(&self) -> Result<usize> {
        if self.degree != 2 {
            return Err(Error::DegreeMismatch(format!("skew rank needs degree 2, got {}", self.degree)));
        }
        let d = self.basis.dim();
        let mut rows = vec![vec![Q::zero(); d]; d];
        for (key, c) in &self.terms {
            let (i, j) = (key[0] as usize, key[1] as usize);
            rows[i][j] = c.clone();
            rows[j][i] = -c.clone();
        }
        Ok(linalg::rank(&rows, d))
    }

    pub fn to_json(&self) -> String {
        let terms: Vec<MultiTerm> = self
            .sorted_terms()
            .into_iter()
            .map(|(k, c)| MultiTerm {
                outer: k.iter().map(|&r| self.basis.indices(r)).collect(),
                coeff: CoeffRepr::Text(c.to_string()),
            })
            .collect();
        serde_json::to_string(&terms).expect("term list serializes")
    }

    /// Parses a JSON term list over `⋀^m ℂⁿ`. Unsorted inner or outer keys
    /// are normalized with sign; repeated keys accumulate.
    pub fn from_json(n: usize, m: usize, s: &str) -> Result<Self> {
        let terms: Vec<MultiTerm> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let basis = InnerBasis::shared(n, m)?;
        let degree = terms.first().map_or(0, |t| t.outer.len());
        if degree > basis.dim() {
            return Err(Error::DegreeOverflow(format!("degree {degree} exceeds dim W = {}", basis.dim())));
        }
        let mut out = MultiVector::zero(basis, degree);
        for t in &terms {
            if t.outer.len() != degree {
                return Err(Error::DegreeMismatch("terms of different outer degree".into()));
            }
            let c = match &t.coeff {
                CoeffRepr::Int(v) => q_int(*v),
                CoeffRepr::Text(s) => parse_coeff(s)?,
            };
            let slots: Vec<&[usize]> = t.outer.iter().map(|v| v.as_slice()).collect();
            let unit = MultiVector::monomial(n, m, &slots)?;
            for (k, sg) in unit.terms {
                add_to(&mut out.terms, k, sg * &c);
            }
        }
        Ok(out)
    }
}

/// An element of `W^{⊗k}`, kept before alternation. Coefficients are exact
/// integers accumulated from signed permutation sums.
#[derive(Clone, Debug)]
pub struct TensorRep {
    basis: Arc<InnerBasis>,
    k: usize,
    terms: FxHashMap<Outer, i128>,
}

impl TensorRep {
    pub fn zero(basis: Arc<InnerBasis>, k: usize) -> Self {
        TensorRep { basis, k, terms: FxHashMap::default() }
    }

    /// Adds `coeff · e_{I_1} ⊗ … ⊗ e_{I_k}` for 1-based index lists.
    pub fn push(&mut self, slots: &[&[usize]], coeff: i64) -> Result<()> {
        if slots.len() != self.k {
            return Err(Error::DegreeMismatch(format!("expected {} slots", self.k)));
        }
        let mut key = Outer::new();
        let mut sign = coeff as i128;
        for s in slots {
            match self.basis.normalize(s)? {
                Some((r, sg)) => {
                    key.push(r);
                    sign *= sg as i128;
                }
                None => return Ok(()),
            }
        }
        let e = self.terms.entry(key).or_insert(0);
        *e = e.checked_add(sign).ok_or(Error::Overflow("tensor coefficient"))?;
        Ok(())
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != 0);
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `t ⊗ u`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.basis.n != other.basis.n || self.basis.m != other.basis.m {
            return Err(Error::DegreeMismatch("tensors over different spaces".into()));
        }
        let mut out = TensorRep::zero(self.basis.clone(), self.k + other.k);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key: Outer = ka.iter().chain(kb.iter()).copied().collect();
                let c = ca.checked_mul(*cb).ok_or(Error::Overflow("tensor coefficient"))?;
                let e = out.terms.entry(key).or_insert(0);
                *e = e.checked_add(c).ok_or(Error::Overflow("tensor coefficient"))?;
            }
        }
        out.prune();
        Ok(out)
    }

    /// The wedge product of the slots: `a ⊗ b ⊗ … ↦ a ∧ b ∧ …`.
    pub fn alternate(&self) -> MultiVector {
        let mut out = MultiVector::zero(self.basis.clone(), self.k);
        for (key, &c) in &self.terms {
            let mut k2 = key.clone();
            if let Some(sg) = sort_outer(&mut k2) {
                add_to(&mut out.terms, k2, Q::from_integer(BigInt::from(c * sg as i128)));
            }
        }
        out
    }

    /// The three pair products `(ab)(cd)`, `(ac)(bd)`, `(ad)(bc)` of a
    /// degree-four representative, so that `Ψ∨ = P₁ − P₂ + P₃`.
    pub fn psi_parts(&self) -> Result<[SymSquare; 3]> {
        if self.k != 4 {
            return Err(Error::DegreeMismatch(format!("pair products need four slots, got {}", self.k)));
        }
        let mut parts = [SymSquare::zero(self.basis.clone()), SymSquare::zero(self.basis.clone()), SymSquare::zero(self.basis.clone())];
        const SPLITS: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];
        for (key, &c) in &self.terms {
            let c = Q::from_integer(BigInt::from(c));
            for (part, s) in parts.iter_mut().zip(SPLITS) {
                part.add_product(key[s[0]], key[s[1]], key[s[2]], key[s[3]], &c);
            }
        }
        Ok(parts)
    }
}

/// An element of `S²(⋀²W)`.
#[derive(Clone, Debug)]
pub struct SymSquare {
    basis: Arc<InnerBasis>,
    terms: FxHashMap<(Pair, Pair), Q>,
}

impl PartialEq for SymSquare {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl SymSquare {
    pub fn zero(basis: Arc<InnerBasis>) -> Self {
        SymSquare { basis, terms: FxHashMap::default() }
    }

    /// Adds `c · (a∧b)·(d∧e)` for inner ranks in any order.
    fn add_product(&mut self, a: u32, b: u32, d: u32, e: u32, c: &Q) {
        let (Some((p, s1)), Some((q, s2))) = (pair_key(a, b), pair_key(d, e)) else { return };
        let key = if p <= q { (p, q) } else { (q, p) };
        add_to(&mut self.terms, key, if s1 * s2 < 0 { -c.clone() } else { c.clone() });
    }

    pub fn terms(&self) -> &FxHashMap<(Pair, Pair), Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            add_to(&mut out.terms, *k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = SymSquare::zero(self.basis.clone());
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(k, v)| (*k, v * c)).collect();
        }
        out
    }

    /// Wedges each pair product back into `⋀⁴W`.
    pub fn multiply_back(&self) -> MultiVector {
        let mut out = MultiVector::zero(self.basis.clone(), 4);
        for (((a, b), (d, e)), c) in &self.terms {
            let mut key: Outer = [*a, *b, *d, *e].into_iter().collect();
            if let Some(sg) = sort_outer(&mut key) {
                add_to(&mut out.terms, key, if sg < 0 { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    pub fn sl_action(&self, r: usize, s: usize) -> Result<Self> {
        let (r, s) = check_sl_indices(self.basis.n, r, s)?;
        let mut out = SymSquare::zero(self.basis.clone());
        for (&((a, b), (d, e)), c) in &self.terms {
            let slots = [a, b, d, e];
            for i in 0..4 {
                let Some((mask, sg)) = raise_mask(self.basis.mask(slots[i]), r, s) else { continue };
                let mut t = slots;
                t[i] = self.basis.index[&mask];
                let c = if sg < 0 { -c.clone() } else { c.clone() };
                out.add_product(t[0], t[1], t[2], t[3], &c);
            }
        }
        Ok(out)
    }
}

/// An element of `⋀^{2m}ℂⁿ ⊗ ⋀²W`, keyed by (subset mask, pair).
#[derive(Clone, Debug)]
pub struct MixedTensor {
    basis: Arc<InnerBasis>,
    terms: FxHashMap<(u64, Pair), Q>,
}

impl PartialEq for MixedTensor {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl MixedTensor {
    pub fn zero(basis: Arc<InnerBasis>) -> Self {
        MixedTensor { basis, terms: FxHashMap::default() }
    }

    /// `e_S ⊗ x` for a 1-based index list `S` and a degree-2 element `x`.
    pub fn from_product(six: &[usize], x: &MultiVector) -> Result<Self> {
        if x.degree != 2 {
            return Err(Error::DegreeMismatch("second factor must lie in ⋀²W".into()));
        }
        let mut out = MixedTensor::zero(x.basis.clone());
        if six.iter().any(|&i| i == 0 || i > x.n()) {
            return Err(Error::Precondition("index out of range".into()));
        }
        let Some((mask, sg)) = normalize_list(six) else { return Ok(out) };
        for (k, c) in &x.terms {
            add_to(&mut out.terms, (mask, (k[0], k[1])), signed(c, sg));
        }
        Ok(out)
    }

    pub fn terms(&self) -> &FxHashMap<(u64, Pair), Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            add_to(&mut out.terms, *k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = MixedTensor::zero(self.basis.clone());
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(k, v)| (*k, v * c)).collect();
        }
        out
    }

    /// The scalar `c` with `self = c · other`, if one exists.
    pub fn ratio_to(&self, other: &Self) -> Option<Q> {
        if other.terms.is_empty() {
            return self.terms.is_empty().then(Q::zero);
        }
        let (k, v) = other.terms.iter().next()?;
        let c = self.terms.get(k).cloned().unwrap_or_else(Q::zero) / v;
        (other.scale(&c) == *self).then_some(c)
    }

    /// Coefficient of `e_S ⊗ (e_A ∧ e_B)` for arbitrary 1-based index lists,
    /// with normalization signs applied.
    pub fn extract_coefficient(&self, six: &[usize], a: &[usize], b: &[usize]) -> Result<Q> {
        let n = self.basis.n;
        if six.len() != 2 * self.basis.m || six.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::Precondition(format!("malformed subset key {six:?}")));
        }
        let (mask, s0) = normalize_list(six).ok_or_else(|| Error::Precondition(format!("repeated index in {six:?}")))?;
        let (ra, s1) = self.basis.normalize(a)?.ok_or_else(|| Error::Precondition(format!("repeated index in {a:?}")))?;
        let (rb, s2) = self.basis.normalize(b)?.ok_or_else(|| Error::Precondition(format!("repeated index in {b:?}")))?;
        let (pair, s3) = pair_key(ra, rb).ok_or_else(|| Error::Precondition("a ∧ a is zero".into()))?;
        let c = self.terms.get(&(mask, pair)).cloned().unwrap_or_else(Q::zero);
        Ok(signed(&c, s0 * s1 * s2 * s3))
    }

    pub fn sl_action(&self, r: usize, s: usize) -> Result<Self> {
        let (r, s) = check_sl_indices(self.basis.n, r, s)?;
        let mut out = MixedTensor::zero(self.basis.clone());
        for (&(mask, (a, b)), c) in &self.terms {
            if let Some((m2, sg)) = raise_mask(mask, r, s) {
                add_to(&mut out.terms, (m2, (a, b)), if sg < 0 { -c.clone() } else { c.clone() });
            }
            for (slot, other, first) in [(a, b, true), (b, a, false)] {
                let Some((m2, sg)) = raise_mask(self.basis.mask(slot), r, s) else { continue };
                let new = self.basis.index[&m2];
                let (x, y) = if first { (new, other) } else { (other, new) };
                if let Some((p, sp)) = pair_key(x, y) {
                    add_to(&mut out.terms, (mask, p), if sg * sp < 0 { -c.clone() } else { c.clone() });
                }
            }
        }
        Ok(out)
    }

    /// Terms as `(subset, first, second, coefficient)` with 1-based indices,
    /// sorted.
    pub fn sorted_terms(&self) -> Vec<(Vec<usize>, Vec<usize>, Vec<usize>, Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|x, y| x.0.cmp(y.0));
        v.into_iter()
            .map(|(&(mask, (a, b)), c)| (mask_indices(mask), self.basis.indices(a), self.basis.indices(b), c.clone()))
            .collect()
    }
}

/// `m(e_A ∧ e_B) = e_{A ∪ B}` extended linearly, landing in `⋀^{2m}ℂⁿ`
/// (returned with inner degree 1).
pub fn multiply_m(x: &MultiVector) -> Result<MultiVector> {
    if x.degree != 2 {
        return Err(Error::DegreeMismatch(format!("m needs degree 2, got {}", x.degree)));
    }
    let target = InnerBasis::shared(x.n(), 1)?;
    let mut out = MultiVector::zero(target, 2 * x.inner_degree());
    for (k, c) in &x.terms {
        if let Some((mask, sg)) = concat_masks(x.basis.mask(k[0]), x.basis.mask(k[1])) {
            let key: Outer = mask_indices(mask).into_iter().map(|i| (i - 1) as u32).collect();
            add_to(&mut out.terms, key, signed(c, sg));
        }
    }
    Ok(out)
}

/// `Ψ∨(a∧b∧c∧d) = (ab)(cd) − (ac)(bd) + (ad)(bc)`.
pub fn psi_dual(x: &MultiVector) -> Result<SymSquare> {
    if x.degree != 4 {
        return Err(Error::DegreeMismatch(format!("Ψ∨ needs degree 4, got {}", x.degree)));
    }
    let mut out = SymSquare::zero(x.basis.clone());
    for (k, c) in &x.terms {
        out.add_product(k[0], k[1], k[2], k[3], c);
        out.add_product(k[0], k[2], k[1], k[3], &-c.clone());
        out.add_product(k[0], k[3], k[1], k[2], c);
    }
    Ok(out)
}

/// `ξ((ab)·(cd)) = m(ab) ⊗ cd + m(cd) ⊗ ab`.
pub fn xi(s: &SymSquare) -> MixedTensor {
    let basis = &s.basis;
    let mut out = MixedTensor::zero(basis.clone());
    for (&(p, q), c) in &s.terms {
        for (src, dst) in [(p, q), (q, p)] {
            if let Some((mask, sg)) = concat_masks(basis.mask(src.0), basis.mask(src.1)) {
                add_to(&mut out.terms, (mask, dst), signed(c, sg));
            }
        }
    }
    out
}

/// The composite `ξ ∘ Ψ∨`.
pub fn xi_psi(x: &MultiVector) -> Result<MixedTensor> {
    Ok(xi(&psi_dual(x)?))
}

/// Named highest-weight vectors of the nested exterior algebra over `⋀³ℂⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HwTag {
    W6,
    W24,
    W48,
    W228,
    W237,
    W147,
}

impl HwTag {
    pub const ALL: [HwTag; 6] = [HwTag::W6, HwTag::W24, HwTag::W48, HwTag::W228, HwTag::W237, HwTag::W147];

    pub fn name(self) -> &'static str {
        match self {
            HwTag::W6 => "w6",
            HwTag::W24 => "w24",
            HwTag::W48 => "w48",
            HwTag::W228 => "w228",
            HwTag::W237 => "w237",
            HwTag::W147 => "w147",
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            HwTag::W6 | HwTag::W24 => 6,
            HwTag::W48 | HwTag::W228 => 8,
            HwTag::W237 | HwTag::W147 => 7,
        }
    }

    /// Outer degree in `⋀^k W`.
    pub fn degree(self) -> usize {
        match self {
            HwTag::W6 | HwTag::W24 => 2,
            _ => 4,
        }
    }

    /// Partition-style highest weight: nodes of the fundamental weights summed.
    pub fn fundamental_nodes(self) -> &'static [usize] {
        match self {
            HwTag::W6 => &[6],
            HwTag::W24 => &[2, 4],
            HwTag::W48 => &[4, 8],
            HwTag::W228 => &[2, 2, 8],
            HwTag::W237 => &[2, 3, 7],
            HwTag::W147 => &[1, 4, 7],
        }
    }

    /// The advertised `𝔤𝔩ₙ` weight: `λ_k` contributes one to each of the first
    /// `k` coordinates.
    pub fn gl_weight(self, n: usize) -> Vec<i32> {
        let mut w = vec![0; n];
        for &k in self.fundamental_nodes() {
            for x in w.iter_mut().take(k) {
                *x += 1;
            }
        }
        w
    }
}

impl FromStr for HwTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        HwTag::ALL
            .into_iter()
            .find(|t| t.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown vector tag {s:?}")))
    }
}

impl fmt::Display for HwTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn shifted(p: &[usize], from: usize, len: usize) -> Vec<usize> {
    p[from..from + len].iter().map(|&i| i + 1).collect()
}

/// The symmetrized sum defining a highest-weight vector, as an unalternated
/// tensor.
pub fn build_hw_tensor(tag: HwTag, n: usize) -> Result<TensorRep> {
    if n < tag.min_n() {
        return Err(Error::Precondition(format!("{tag} needs n >= {}, got {n}", tag.min_n())));
    }
    let basis = InnerBasis::shared(n, 3)?;
    let mut t = TensorRep::zero(basis.clone(), tag.degree());
    match tag {
        HwTag::W6 => {
            for (p, s) in signed_permutations(6) {
                t.push(&[&shifted(&p, 0, 3), &shifted(&p, 3, 3)], s)?;
            }
        }
        HwTag::W24 => t.push(&[&[1, 2, 3], &[1, 2, 4]], 1)?,
        HwTag::W48 => {
            let taus = signed_permutations(8);
            let sigmas = signed_permutations(4);
            let parts: Vec<TensorRep> = sigmas
                .par_iter()
                .map(|(sg, ss)| {
                    let mut local = TensorRep::zero(basis.clone(), 4);
                    for (tau, ts) in &taus {
                        let slot = |j: usize| [sg[j] + 1, tau[2 * j] + 1, tau[2 * j + 1] + 1];
                        local.push(&[&slot(0), &slot(1), &slot(2), &slot(3)], ss * ts)?;
                    }
                    Ok(local)
                })
                .collect::<Result<_>>()?;
            for p in parts {
                for (k, c) in p.terms {
                    let e = t.terms.entry(k).or_insert(0);
                    *e = e.checked_add(c).ok_or(Error::Overflow("tensor coefficient"))?;
                }
            }
        }
        HwTag::W228 => {
            for (p, s) in signed_permutations(8) {
                t.push(&[&[1, 2, p[0] + 1], &[1, 2, p[1] + 1], &shifted(&p, 2, 3), &shifted(&p, 5, 3)], s)?;
            }
        }
        HwTag::W237 => {
            for (p, s) in signed_permutations(7) {
                t.push(&[&[1, 2, 3], &[1, 2, p[0] + 1], &shifted(&p, 1, 3), &shifted(&p, 4, 3)], s)?;
            }
        }
        HwTag::W147 => {
            let taus = signed_permutations(7);
            for (sg, ss) in signed_permutations(4) {
                for (tau, ts) in &taus {
                    t.push(
                        &[&[1, sg[0] + 1, tau[0] + 1], &shifted(&sg, 1, 3), &shifted(tau, 1, 3), &shifted(tau, 4, 3)],
                        ss * ts,
                    )?;
                }
            }
        }
    }
    t.prune();
    Ok(t)
}

/// The highest-weight vector for `tag` in `⋀^k(⋀³ℂⁿ)`.
pub fn build_hw_vector(tag: HwTag, n: usize) -> Result<MultiVector> {
    Ok(build_hw_tensor(tag, n)?.alternate())
}

/// Checks that `x` is killed by every simple raising operator `X_{i,i+1}`
/// and carries the advertised weight.
pub fn is_highest_weight(x: &MultiVector, weight: &[i32]) -> Result<bool> {
    if x.is_zero() || x.gl_weight().as_deref() != Some(weight) {
        return Ok(false);
    }
    for i in 1..x.n() {
        if !x.sl_action(i, i + 1)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A random element of `⋀^k(⋀^m ℂⁿ)` with up to `terms` monomials and small
/// nonzero integer coefficients.
pub fn random_multivector<R: Rng>(rng: &mut R, n: usize, m: usize, k: usize, terms: usize) -> Result<MultiVector> {
    let basis = InnerBasis::shared(n, m)?;
    let mut acc = MultiVector::zero(basis.clone(), k);
    for _ in 0..terms {
        let outer: Vec<Vec<usize>> = (0..k)
            .map(|_| rand::seq::index::sample(rng, n, m).into_iter().map(|i| i + 1).collect())
            .collect();
        let slots: Vec<&[usize]> = outer.iter().map(|v| v.as_slice()).collect();
        let c = loop {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                break c;
            }
        };
        acc = acc.add(&MultiVector::monomial(n, m, &slots)?.scale(&q_int(c)))?;
    }
    Ok(acc)
}
