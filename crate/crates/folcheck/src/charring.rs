//! Formal characters: Freudenthal multiplicities, products, Adams operations,
//! plethysm and sections of parabolic bundles.
//!
//! A [`FormalCharacter`] stores every weight. A [`DominantSlice`] stores only
//! the dominant weights of a Weyl-invariant character together with its total
//! dimension, which is all the decomposition needs and is far cheaper for
//! large products.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootdata::RootSystem;
use crate::weight::Weight;

pub type Mult = i128;

pub(crate) fn add_mult(a: Mult, b: Mult) -> Result<Mult> {
    a.checked_add(b).ok_or(Error::Overflow("multiplicity"))
}

pub(crate) fn mul_mult(a: Mult, b: Mult) -> Result<Mult> {
    a.checked_mul(b).ok_or(Error::Overflow("multiplicity"))
}

fn accumulate(map: &mut FxHashMap<Weight, Mult>, w: Weight, m: Mult) -> Result<()> {
    let e = map.entry(w).or_insert(0);
    *e = add_mult(*e, m)?;
    Ok(())
}

/// Freudenthal's formula on the dominant chamber. Returns the dominant
/// weights of the irreducible module with highest weight `lambda` and their
/// multiplicities, ordered from the top down.
pub fn dominant_multiplicities(rs: &RootSystem, lambda: &Weight) -> Result<Vec<(Weight, Mult)>> {
    rs.check_weight(lambda)?;
    if !rs.is_dominant(lambda) {
        return Err(Error::NotDominant(lambda.to_string()));
    }
    let n = rs.rank();
    let roots = rs.positive_roots();
    // Dominant weights below lambda, with root coordinates of lambda - mu.
    let mut depth: FxHashMap<Weight, Vec<i32>> = FxHashMap::default();
    depth.insert(lambda.clone(), vec![0; n]);
    let mut frontier = vec![lambda.clone()];
    while let Some(mu) = frontier.pop() {
        let c = depth[&mu].clone();
        for root in roots {
            let nu = &mu - &root.weight;
            if rs.is_dominant(&nu) && !depth.contains_key(&nu) {
                let cc: Vec<i32> = c.iter().zip(&root.coords).map(|(a, b)| a + b).collect();
                depth.insert(nu.clone(), cc);
                frontier.push(nu);
            }
        }
    }
    let mut order: Vec<(i32, Weight)> = depth.iter().map(|(w, c)| (c.iter().sum(), w.clone())).collect();
    order.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));

    let d = rs.root_half_norms();
    let mut mults: FxHashMap<Weight, Mult> = FxHashMap::default();
    mults.insert(lambda.clone(), 1);
    let mut out = vec![(lambda.clone(), 1)];
    for (_, mu) in order.into_iter().skip(1) {
        let c = &depth[&mu];
        // (lambda + rho)^2 - (mu + rho)^2 = 2 (lambda + rho, beta) - (beta, beta).
        let mut lr_beta: i64 = 0;
        let mut beta_beta: i64 = 0;
        for j in 0..n {
            if c[j] != 0 {
                lr_beta += c[j] as i64 * d[j] * (lambda[j] as i64 + 1);
                beta_beta += c[j] as i64 * d[j] * (lambda[j] - mu[j]) as i64;
            }
        }
        let denom = (2 * lr_beta - beta_beta) as i128;
        let mut numer: i128 = 0;
        for root in roots {
            let base: i64 = root.dvec.iter().zip(mu.iter()).map(|(a, &b)| a * b as i64).sum();
            let mut k = 1;
            let mut probe = mu.clone();
            loop {
                probe.add_scaled(&root.weight, 1);
                let (dom, _) = rs.dominant_conjugate(&probe);
                match mults.get(&dom) {
                    Some(&m) => {
                        let ip = (base + k * root.norm) as i128;
                        numer = add_mult(numer, mul_mult(2 * ip, m)?)?;
                    }
                    None => break,
                }
                k += 1;
            }
        }
        if denom <= 0 || numer % denom != 0 {
            return Err(Error::NonIntegral(format!("Freudenthal step at {mu}")));
        }
        let m = numer / denom;
        if m != 0 {
            mults.insert(mu.clone(), m);
            out.push((mu, m));
        }
    }
    Ok(out)
}

/// A character given by all its weights.
#[derive(Clone, Debug)]
pub struct FormalCharacter {
    rs: Arc<RootSystem>,
    terms: FxHashMap<Weight, Mult>,
}

impl PartialEq for FormalCharacter {
    fn eq(&self, other: &Self) -> bool {
        *self.rs == *other.rs && self.terms == other.terms
    }
}

/// Serialized form shared by characters and decompositions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermList {
    pub rs: String,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub weight: Weight,
    pub mult: Mult,
}

impl FormalCharacter {
    pub fn zero(rs: Arc<RootSystem>) -> Self {
        FormalCharacter { rs, terms: FxHashMap::default() }
    }

    pub fn from_terms(rs: Arc<RootSystem>, terms: impl IntoIterator<Item = (Weight, Mult)>) -> Result<Self> {
        let mut map = FxHashMap::default();
        for (w, m) in terms {
            rs.check_weight(&w)?;
            accumulate(&mut map, w, m)?;
        }
        map.retain(|_, m| *m != 0);
        Ok(FormalCharacter { rs, terms: map })
    }

    /// Character of the irreducible module with highest weight `lambda`.
    pub fn irreducible(rs: Arc<RootSystem>, lambda: &Weight) -> Result<Self> {
        let dom = dominant_multiplicities(&rs, lambda)?;
        Self::from_dominant(rs, dom)
    }

    /// Expands multiplicities on dominant weights over Weyl orbits.
    pub fn from_dominant(rs: Arc<RootSystem>, dom: impl IntoIterator<Item = (Weight, Mult)>) -> Result<Self> {
        let mut terms = FxHashMap::default();
        for (mu, m) in dom {
            if !rs.is_dominant(&mu) {
                return Err(Error::NotDominant(mu.to_string()));
            }
            for w in rs.orbit(&mu) {
                accumulate(&mut terms, w, m)?;
            }
        }
        terms.retain(|_, m| *m != 0);
        Ok(FormalCharacter { rs, terms })
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    pub fn terms(&self) -> &FxHashMap<Weight, Mult> {
        &self.terms
    }

    pub fn mult(&self, w: &Weight) -> Mult {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when some multiplicity is negative.
    pub fn is_virtual(&self) -> bool {
        self.terms.values().any(|&m| m < 0)
    }

    pub fn dim(&self) -> Result<Mult> {
        self.terms.values().try_fold(0, |a, &m| add_mult(a, m))
    }

    pub fn sorted_terms(&self) -> Vec<(Weight, Mult)> {
        let mut v: Vec<_> = self.terms.iter().map(|(w, &m)| (w.clone(), m)).collect();
        v.sort();
        v
    }

    fn same_system(&self, other: &Self) -> Result<()> {
        if *self.rs != *other.rs {
            return Err(Error::Precondition(format!(
                "characters live on {} and {}",
                self.rs.name(),
                other.rs.name()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_system(other)?;
        let mut terms = self.terms.clone();
        for (w, &m) in &other.terms {
            accumulate(&mut terms, w.clone(), m)?;
        }
        terms.retain(|_, m| *m != 0);
        Ok(FormalCharacter { rs: self.rs.clone(), terms })
    }

    pub fn scale(&self, k: Mult) -> Result<Self> {
        let mut terms = FxHashMap::default();
        for (w, &m) in &self.terms {
            if k != 0 {
                terms.insert(w.clone(), mul_mult(m, k)?);
            }
        }
        Ok(FormalCharacter { rs: self.rs.clone(), terms })
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.same_system(other)?;
        let (small, large) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        let mut terms: FxHashMap<Weight, Mult> =
            FxHashMap::with_capacity_and_hasher(large.terms.len() * 2, Default::default());
        for (a, &ma) in &small.terms {
            for (b, &mb) in &large.terms {
                accumulate(&mut terms, a + b, mul_mult(ma, mb)?)?;
            }
        }
        terms.retain(|_, m| *m != 0);
        Ok(FormalCharacter { rs: self.rs.clone(), terms })
    }

    /// Adams operation `psi^k`, scaling every weight by `k`.
    pub fn adams(&self, k: i32) -> Result<Self> {
        let mut terms = FxHashMap::default();
        for (w, &m) in &self.terms {
            accumulate(&mut terms, w.scaled(k), m)?;
        }
        Ok(FormalCharacter { rs: self.rs.clone(), terms })
    }

    /// Restriction of the multiplicities to the dominant chamber.
    pub fn dominant_slice(&self) -> Result<DominantSlice> {
        let entries: BTreeMap<Weight, Mult> = self
            .terms
            .iter()
            .filter(|(w, _)| self.rs.is_dominant(w))
            .map(|(w, &m)| (w.clone(), m))
            .collect();
        Ok(DominantSlice { rs: self.rs.clone(), entries, dim: self.dim()? })
    }

    pub fn to_term_list(&self) -> TermList {
        TermList {
            rs: self.rs.name().to_string(),
            terms: self.sorted_terms().into_iter().map(|(weight, mult)| Term { weight, mult }).collect(),
        }
    }

    pub fn from_term_list(list: &TermList) -> Result<Self> {
        let rs = Arc::new(RootSystem::parse(&list.rs)?);
        Self::from_terms(rs, list.terms.iter().map(|t| (t.weight.clone(), t.mult)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_term_list()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let list: TermList = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_term_list(&list)
    }

    /// `k`-th exterior power by dynamic programming over distinct weights.
    pub fn exterior_power(&self, k: usize) -> Result<Self> {
        let layers = self.power_layers(k, false)?;
        Ok(FormalCharacter { rs: self.rs.clone(), terms: layers.into_iter().nth(k).unwrap() })
    }

    /// `k`-th symmetric power by dynamic programming over distinct weights.
    pub fn symmetric_power(&self, k: usize) -> Result<Self> {
        let layers = self.power_layers(k, true)?;
        Ok(FormalCharacter { rs: self.rs.clone(), terms: layers.into_iter().nth(k).unwrap() })
    }

    /// Degrees `0..=k` of the exterior (or symmetric) algebra.
    fn power_layers(&self, k: usize, symmetric: bool) -> Result<Vec<FxHashMap<Weight, Mult>>> {
        if self.is_virtual() {
            return Err(Error::Precondition("power of a virtual character".into()));
        }
        let zero = Weight::zero(self.rs.rank());
        let mut layers: Vec<FxHashMap<Weight, Mult>> = vec![FxHashMap::default(); k + 1];
        layers[0].insert(zero, 1);
        for (w, m) in self.sorted_terms() {
            // Number of ways to pick i copies of a weight of multiplicity m.
            let choose: Vec<Mult> = (0..=k)
                .map(|i| {
                    if symmetric {
                        binomial(m + i as Mult - 1, i as Mult)
                    } else {
                        binomial(m, i as Mult)
                    }
                })
                .collect();
            for deg in (1..=k).rev() {
                let mut add: Vec<(Weight, Mult)> = Vec::new();
                for i in 1..=deg {
                    if choose[i] == 0 {
                        continue;
                    }
                    let shift = w.scaled(i as i32);
                    for (v, &mv) in &layers[deg - i] {
                        add.push((v + &shift, mul_mult(mv, choose[i])?));
                    }
                }
                for (v, mv) in add {
                    accumulate(&mut layers[deg], v, mv)?;
                }
            }
        }
        for l in layers.iter_mut() {
            l.retain(|_, m| *m != 0);
        }
        Ok(layers)
    }

    /// Schur functor `Gamma^mu` applied to this character through power
    /// sums and the character table of the symmetric group, for `|mu| <= 4`.
    pub fn schur_plethysm(&self, mu: &[usize]) -> Result<Self> {
        let classes = plethysm_classes(mu)?;
        let n = mu.iter().sum::<usize>() as Mult;
        let mut acc = FormalCharacter::zero(self.rs.clone());
        let mut cache: FxHashMap<usize, FormalCharacter> = FxHashMap::default();
        for (cycle, weight) in classes {
            if weight == 0 {
                continue;
            }
            let mut term: Option<FormalCharacter> = None;
            for &c in &cycle {
                if !cache.contains_key(&c) {
                    cache.insert(c, self.adams(c as i32)?);
                }
                let f = &cache[&c];
                term = Some(match term {
                    None => f.clone(),
                    Some(t) => t.product(f)?,
                });
            }
            acc = acc.add(&term.unwrap().scale(weight)?)?;
        }
        let fact = factorial(n);
        let mut terms = FxHashMap::default();
        for (w, m) in acc.terms {
            if m % fact != 0 {
                return Err(Error::NonIntegral(format!("plethysm coefficient at {w}")));
            }
            if m != 0 {
                terms.insert(w, m / fact);
            }
        }
        Ok(FormalCharacter { rs: self.rs.clone(), terms })
    }

    /// Dominant slice of `Gamma^mu` of this character without expanding the
    /// last factor of each power-sum product.
    pub fn schur_plethysm_dominant(&self, mu: &[usize]) -> Result<DominantSlice> {
        let classes = plethysm_classes(mu)?;
        let n = mu.iter().sum::<usize>() as Mult;
        let d = self.dim()?;
        let mut acc: BTreeMap<Weight, Mult> = BTreeMap::new();
        let mut mass: Mult = 0;
        let mut cache: FxHashMap<usize, FormalCharacter> = FxHashMap::default();
        for (cycle, weight) in classes {
            if weight == 0 {
                continue;
            }
            for &c in &cycle {
                if !cache.contains_key(&c) {
                    cache.insert(c, self.adams(c as i32)?);
                }
            }
            // Slice against the biggest factor, expand the rest.
            let mut factors: Vec<usize> = cycle.clone();
            factors.sort_by_key(|c| std::cmp::Reverse(cache[c].support_len()));
            let sliced = &cache[&factors[0]];
            let mut rest = FormalCharacter::from_terms(self.rs.clone(), [(Weight::zero(self.rs.rank()), 1)])?;
            for c in &factors[1..] {
                rest = rest.product(&cache[c])?;
            }
            for (w, m) in slice_product(&rest, sliced)? {
                let e = acc.entry(w).or_insert(0);
                *e = add_mult(*e, mul_mult(m, weight)?)?;
            }
            mass = add_mult(mass, mul_mult(weight, pow_mult(d, cycle.len())?)?)?;
        }
        let fact = factorial(n);
        let mut entries = BTreeMap::new();
        for (w, m) in acc {
            if m % fact != 0 {
                return Err(Error::NonIntegral(format!("plethysm coefficient at {w}")));
            }
            if m != 0 {
                entries.insert(w, m / fact);
            }
        }
        if mass % fact != 0 {
            return Err(Error::NonIntegral("plethysm dimension".into()));
        }
        Ok(DominantSlice { rs: self.rs.clone(), entries, dim: mass / fact })
    }

    /// Dominant slice of the `k`-th exterior power: lower degrees by the
    /// binomial recursion, the top degree by Newton's identity on the slice.
    pub fn exterior_power_dominant(&self, k: usize) -> Result<DominantSlice> {
        self.power_dominant(k, false)
    }

    pub fn symmetric_power_dominant(&self, k: usize) -> Result<DominantSlice> {
        self.power_dominant(k, true)
    }

    fn power_dominant(&self, k: usize, symmetric: bool) -> Result<DominantSlice> {
        if k == 0 {
            let one = FormalCharacter::from_terms(self.rs.clone(), [(Weight::zero(self.rs.rank()), 1)])?;
            return one.dominant_slice();
        }
        let layers = self.power_layers(k - 1, symmetric)?;
        let d = self.dim()?;
        // k e_k = sum_i (-1)^(i-1) p_i e_{k-i};  k h_k = sum_i p_i h_{k-i}.
        let mut acc: BTreeMap<Weight, Mult> = BTreeMap::new();
        for i in 1..=k {
            let sign: Mult = if symmetric || i % 2 == 1 { 1 } else { -1 };
            let lower = FormalCharacter { rs: self.rs.clone(), terms: layers[k - i].clone() };
            let p = self.adams(i as i32)?;
            for (w, m) in slice_product(&lower, &p)? {
                let e = acc.entry(w).or_insert(0);
                *e = add_mult(*e, sign * m)?;
            }
        }
        let mut entries = BTreeMap::new();
        for (w, m) in acc {
            if m % k as Mult != 0 {
                return Err(Error::NonIntegral(format!("power coefficient at {w}")));
            }
            if m != 0 {
                entries.insert(w, m / k as Mult);
            }
        }
        let dim = if symmetric { binomial(d + k as Mult - 1, k as Mult) } else { binomial(d, k as Mult) };
        Ok(DominantSlice { rs: self.rs.clone(), entries, dim })
    }
}

/// Cycle types of `S_n` weighted by class size times the irreducible
/// character `chi^mu`, for `n <= 4`.
pub fn plethysm_classes(mu: &[usize]) -> Result<Vec<(Vec<usize>, Mult)>> {
    let mut mu: Vec<usize> = mu.iter().copied().filter(|&x| x > 0).collect();
    mu.sort_by(|a, b| b.cmp(a));
    let n: usize = mu.iter().sum();
    let bad = || Error::UnsupportedPartition(format!("{mu:?}"));
    let (classes, sizes, row): (Vec<Vec<usize>>, Vec<Mult>, Vec<Mult>) = match n {
        1 => (vec![vec![1]], vec![1], vec![1]),
        2 => {
            let row = match mu.as_slice() {
                [2] => vec![1, 1],
                [1, 1] => vec![1, -1],
                _ => return Err(bad()),
            };
            (vec![vec![1, 1], vec![2]], vec![1, 1], row)
        }
        3 => {
            let row = match mu.as_slice() {
                [3] => vec![1, 1, 1],
                [2, 1] => vec![2, 0, -1],
                [1, 1, 1] => vec![1, -1, 1],
                _ => return Err(bad()),
            };
            (vec![vec![1, 1, 1], vec![2, 1], vec![3]], vec![1, 3, 2], row)
        }
        4 => {
            let row = match mu.as_slice() {
                [4] => vec![1, 1, 1, 1, 1],
                [3, 1] => vec![3, 1, -1, 0, -1],
                [2, 2] => vec![2, 0, 2, -1, 0],
                [2, 1, 1] => vec![3, -1, -1, 0, 1],
                [1, 1, 1, 1] => vec![1, -1, 1, 1, -1],
                _ => return Err(bad()),
            };
            (
                vec![vec![1, 1, 1, 1], vec![2, 1, 1], vec![2, 2], vec![3, 1], vec![4]],
                vec![1, 6, 3, 8, 6],
                row,
            )
        }
        _ => return Err(bad()),
    };
    Ok(classes.into_iter().zip(sizes.iter().zip(row.iter())).map(|(c, (s, r))| (c, s * r)).collect())
}

pub fn binomial(n: Mult, k: Mult) -> Mult {
    if k < 0 || n < k || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: Mult = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

fn factorial(n: Mult) -> Mult {
    (1..=n).product()
}

fn pow_mult(b: Mult, e: usize) -> Result<Mult> {
    (0..e).try_fold(1, |a, _| mul_mult(a, b))
}

/// Dominant weights that can occur in `a * b`, found by walking down from
/// sums of dominant weights through dominant weights.
fn dominant_candidates(rs: &RootSystem, a: &FormalCharacter, b: &FormalCharacter) -> Vec<Weight> {
    let da: Vec<&Weight> = a.terms.keys().filter(|w| rs.is_dominant(w)).collect();
    let db: Vec<&Weight> = b.terms.keys().filter(|w| rs.is_dominant(w)).collect();
    let mut seen: FxHashSet<Weight> = FxHashSet::default();
    let mut stack = Vec::new();
    for x in &da {
        for y in &db {
            let top = *x + *y;
            if seen.insert(top.clone()) {
                stack.push(top);
            }
        }
    }
    while let Some(mu) = stack.pop() {
        for root in rs.positive_roots() {
            let nu = &mu - &root.weight;
            if rs.is_dominant(&nu) && !seen.contains(&nu) {
                seen.insert(nu.clone());
                stack.push(nu);
            }
        }
    }
    let mut v: Vec<Weight> = seen.into_iter().collect();
    v.sort();
    v
}

/// Dominant coefficients of `a * b` computed as
/// `sum_beta b(beta) a(nu - beta)` for each dominant `nu`.
pub fn slice_product(a: &FormalCharacter, b: &FormalCharacter) -> Result<Vec<(Weight, Mult)>> {
    let rs = a.rs.clone();
    let cands = dominant_candidates(&rs, a, b);
    let bterms: Vec<(&Weight, Mult)> = b.terms.iter().map(|(w, &m)| (w, m)).collect();
    let results: Vec<Result<(Weight, Mult)>> = {
        use rayon::prelude::*;
        cands
            .par_iter()
            .map(|nu| {
                let mut s: Mult = 0;
                for (beta, mb) in &bterms {
                    if let Some(&ma) = a.terms.get(&(nu - beta)) {
                        s = add_mult(s, mul_mult(ma, *mb)?)?;
                    }
                }
                Ok((nu.clone(), s))
            })
            .collect()
    };
    let mut out = Vec::new();
    for r in results {
        let (w, m) = r?;
        if m != 0 {
            out.push((w, m));
        }
    }
    Ok(out)
}

/// Dominant part of a Weyl-invariant character and its total dimension.
#[derive(Clone, Debug)]
pub struct DominantSlice {
    pub rs: Arc<RootSystem>,
    pub entries: BTreeMap<Weight, Mult>,
    /// Total dimension of the full character.
    pub dim: Mult,
}

impl DominantSlice {
    pub fn from_parts(rs: Arc<RootSystem>, entries: BTreeMap<Weight, Mult>, dim: Mult) -> Self {
        DominantSlice { rs, entries, dim }
    }

    /// Sum of two slices on the same system.
    pub fn add(&self, other: &DominantSlice) -> Result<DominantSlice> {
        if *self.rs != *other.rs {
            return Err(Error::Precondition("slices on different systems".into()));
        }
        let mut entries = self.entries.clone();
        for (w, &m) in &other.entries {
            let e = entries.entry(w.clone()).or_insert(0);
            *e = add_mult(*e, m)?;
        }
        entries.retain(|_, m| *m != 0);
        Ok(DominantSlice { rs: self.rs.clone(), entries, dim: add_mult(self.dim, other.dim)? })
    }
}

/// Tensor product of two irreducibles, returned as a dominant slice.
pub fn tensor_irreducibles(rs: Arc<RootSystem>, lambda: &Weight, mu: &Weight) -> Result<DominantSlice> {
    let a = FormalCharacter::irreducible(rs.clone(), lambda)?;
    let b = FormalCharacter::irreducible(rs.clone(), mu)?;
    let entries = slice_product(&a, &b)?.into_iter().collect();
    let dim = mul_mult(a.dim()?, b.dim()?)?;
    Ok(DominantSlice { rs, entries, dim })
}

/// Total dimension of `sum m_i V_{lambda_i}` via the Weyl product.
pub fn total_dimension(rs: &RootSystem, terms: &BTreeMap<Weight, Mult>) -> Result<BigInt> {
    let mut acc = BigInt::from(0);
    for (w, &m) in terms {
        acc += BigInt::from(rs.weyl_dim(w)?) * BigInt::from(m);
    }
    Ok(acc)
}

/// Sections of `wedge^m` of a direct sum of irreducible bundles on the
/// partial flag variety `G/P`, where `P` is the parabolic of `nodes`.
///
/// `summands` are highest weights of the irreducible bundles (dominant for
/// the Levi), `twist[i]` is added to the coefficient of `nodes[i]` after the
/// exterior power is decomposed over the Levi.
pub fn parabolic_bundle_sections(
    rs: &RootSystem,
    nodes: &[usize],
    summands: &[Weight],
    m: usize,
    twist: &[i32],
) -> Result<BundleSections> {
    if twist.len() != nodes.len() {
        return Err(Error::Precondition("one twist per removed node".into()));
    }
    let levi = Arc::new(rs.levi(nodes)?);
    let mut ch = FormalCharacter::zero(levi.clone());
    for s in summands {
        if !levi.is_dominant(s) {
            return Err(Error::NotParabolicDominant(s.to_string()));
        }
        ch = ch.add(&FormalCharacter::irreducible(levi.clone(), s)?)?;
    }
    let wedge = ch.exterior_power(m)?;
    let levi_dec = crate::decomp::decompose_character(&wedge)?;
    let full = Arc::new(rs.ambient()?);
    let mut sections = BTreeMap::new();
    for (nu, &c) in levi_dec.terms() {
        let mut t = nu.clone();
        for (&k, &a) in nodes.iter().zip(twist) {
            t.as_mut_slice()[k] += a;
        }
        for (lam, mult) in full.bbw_h0_parabolic(nodes, &t)? {
            let e = sections.entry(lam).or_insert(0);
            *e = add_mult(*e, mul_mult(mult, c)?)?;
        }
    }
    Ok(BundleSections { levi: levi_dec, sections: crate::decomp::IrrDecomposition::new(full, sections)? })
}

/// Levi decomposition of the bundle and its global sections.
#[derive(Clone, Debug)]
pub struct BundleSections {
    pub levi: crate::decomp::IrrDecomposition,
    pub sections: crate::decomp::IrrDecomposition,
}

/// `H^0(G/P_k, wedge^m E_mu (twist))` for a cominuscule pair `(G, k)`.
pub fn levi_bundle_sections(
    rs: &RootSystem,
    k: usize,
    mu: &Weight,
    m: usize,
    twist: i32,
) -> Result<crate::decomp::IrrDecomposition> {
    if k >= rs.rank() {
        return Err(Error::NodeOutOfRange { node: k + 1, rank: rs.rank() });
    }
    if !rs.is_cominuscule(k) {
        return Err(Error::NotCominuscule(format!("({}, {})", rs.name(), k + 1)));
    }
    Ok(parabolic_bundle_sections(rs, &[k], std::slice::from_ref(mu), m, &[twist])?.sections)
}

/// `H^0(Omega^m (twist))` on a cominuscule `G/P_k`.
pub fn twisted_form_sections(rs: &RootSystem, k: usize, m: usize, twist: i32) -> Result<crate::decomp::IrrDecomposition> {
    let omega = rs.cotangent_weight(k)?;
    levi_bundle_sections(rs, k, &omega, m, twist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> Weight {
        Weight::from_slice(v).unwrap()
    }

    fn rs(s: &str) -> Arc<RootSystem> {
        Arc::new(RootSystem::parse(s).unwrap())
    }

    #[test]
    fn adjoint_zero_weight() {
        // The zero weight of the adjoint module has multiplicity equal to the rank.
        for (s, hr) in [("A3", vec![1, 0, 1]), ("G2", vec![0, 1]), ("B3", vec![0, 1, 0]), ("E6", vec![0, 1, 0, 0, 0, 0])] {
            let r = rs(s);
            let ch = FormalCharacter::irreducible(r.clone(), &w(&hr)).unwrap();
            assert_eq!(ch.mult(&Weight::zero(r.rank())), r.rank() as Mult, "{s}");
            assert_eq!(ch.dim().unwrap() as u128, r.weyl_dim(&w(&hr)).unwrap());
        }
    }

    #[test]
    fn exterior_square_of_standard() {
        let r = rs("A3");
        let v = FormalCharacter::irreducible(r.clone(), &w(&[1, 0, 0])).unwrap();
        let e2 = v.exterior_power(2).unwrap();
        assert_eq!(e2, FormalCharacter::irreducible(r.clone(), &w(&[0, 1, 0])).unwrap());
        let p = v.schur_plethysm(&[1, 1]).unwrap();
        assert_eq!(p, e2);
        let s2 = v.symmetric_power(2).unwrap();
        assert_eq!(s2, v.schur_plethysm(&[2]).unwrap());
    }

    #[test]
    fn sliced_powers_match_full() {
        let r = rs("B3");
        let v = FormalCharacter::irreducible(r.clone(), &w(&[0, 0, 1])).unwrap();
        for k in 1..=4 {
            let full = v.exterior_power(k).unwrap().dominant_slice().unwrap();
            let sl = v.exterior_power_dominant(k).unwrap();
            assert_eq!(full.entries, sl.entries, "wedge {k}");
            assert_eq!(full.dim, sl.dim);
            let full = v.symmetric_power(k).unwrap().dominant_slice().unwrap();
            let sl = v.symmetric_power_dominant(k).unwrap();
            assert_eq!(full.entries, sl.entries, "sym {k}");
            assert_eq!(full.dim, sl.dim);
        }
        for mu in [vec![2, 1], vec![3, 1], vec![2, 2], vec![2, 1, 1]] {
            let full = v.schur_plethysm(&mu).unwrap().dominant_slice().unwrap();
            let sl = v.schur_plethysm_dominant(&mu).unwrap();
            assert_eq!(full.entries, sl.entries, "{mu:?}");
            assert_eq!(full.dim, sl.dim);
        }
    }

    #[test]
    fn unsupported_partition() {
        let r = rs("A1");
        let v = FormalCharacter::irreducible(r, &w(&[1])).unwrap();
        assert!(matches!(v.schur_plethysm(&[5]), Err(Error::UnsupportedPartition(_))));
    }

    #[test]
    fn levi_character_keeps_central_coordinate() {
        let r = rs("A7/P3");
        let mu = w(&[0, 1, -2, 1, 0, 0, 0]);
        let ch = FormalCharacter::irreducible(r.clone(), &mu).unwrap();
        assert_eq!(ch.dim().unwrap(), 15);
        assert!(ch.terms().keys().all(|v| r.pairing(v, &Weight::fundamental(7, 2)) == r.pairing(&mu, &Weight::fundamental(7, 2))));
    }

    #[test]
    fn grassmannian_one_forms() {
        // H^0(Omega^1(2)) on G(3,8) is V(L2+L4).
        let a7 = RootSystem::parse("A7").unwrap();
        let d = twisted_form_sections(&a7, 2, 1, 2).unwrap();
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.mult(&w(&[0, 1, 0, 1, 0, 0, 0])), 1);
        // No sections without enough twist.
        assert!(twisted_form_sections(&a7, 2, 1, 1).unwrap().terms().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let r = rs("A2xA1");
        let ch = FormalCharacter::irreducible(r, &w(&[1, 0, 1])).unwrap();
        let back = FormalCharacter::from_json(&ch.to_json()).unwrap();
        assert_eq!(ch, back);
    }
}
