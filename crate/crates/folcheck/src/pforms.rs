//! Polynomial differential forms on `ℙⁿ` in the homogeneous coordinates
//! `x₀, …, xₙ`: radial contraction, exterior derivative, wedge products and
//! the integrability tests for twisted forms.
//!
//! A term is a monomial `x^a` (exponent vector of length `n+1`) times
//! `dx_I` for a strictly increasing index set `I`, stored as a bitmask.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extalg::parse_coeff;
use crate::linalg::{self, Q};

pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    p: usize,
    d: usize,
    terms: BTreeMap<(Monomial, u64), Q>,
}

#[derive(Serialize, Deserialize)]
struct FormTerm {
    mono: Vec<u32>,
    dx: Vec<usize>,
    coeff: String,
}

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn dx_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Sign of `dx_A ∧ dx_B` relative to `dx_{A∪B}`, or `None` if they overlap.
fn wedge_sign(a: u64, b: u64) -> Option<i64> {
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
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

/// Sign of moving `dx_k` from the front of `dx_I` to its sorted position.
fn position_sign(mask: u64, k: usize) -> i64 {
    if (mask & ((1u64 << k) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyForm(n={}, p={}, d={}, {})", self.n, self.p, self.d, self)
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((mono, dx), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (v, &e) in mono.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, " x{v}")?,
                    _ => write!(f, " x{v}^{e}")?,
                }
            }
            if *dx != 0 {
                write!(f, " {}", dx_indices(*dx).iter().map(|i| format!("dx{i}")).join("^"))?;
            }
        }
        Ok(())
    }
}

impl PolyForm {
    pub fn zero(n: usize, p: usize, d: usize) -> Self {
        PolyForm { n, p, d, terms: BTreeMap::new() }
    }

    /// A single term `c · x^mono dx_{i_1} ∧ … ∧ dx_{i_p}`; the dx indices may
    /// be unsorted and are normalized with sign.
    pub fn term(n: usize, mono: &[u32], dx: &[usize], c: Q) -> Result<Self> {
        if n + 1 > 63 {
            return Err(Error::Precondition(format!("n = {n} too large")));
        }
        if mono.len() != n + 1 {
            return Err(Error::Precondition(format!("monomial needs {} exponents, got {}", n + 1, mono.len())));
        }
        if let Some(&bad) = dx.iter().find(|&&i| i > n) {
            return Err(Error::Precondition(format!("dx{bad} out of range for n = {n}")));
        }
        let d = mono.iter().map(|&e| e as usize).sum();
        let mut out = PolyForm::zero(n, dx.len(), d);
        let mut mask = 0u64;
        let mut inversions = 0;
        for (a, &i) in dx.iter().enumerate() {
            if mask >> i & 1 == 1 {
                return Ok(out);
            }
            mask |= 1 << i;
            inversions += dx[..a].iter().filter(|&&j| j > i).count();
        }
        let c = if inversions % 2 == 1 { -c } else { c };
        out.insert(mono.to_vec(), mask, c);
        Ok(out)
    }

    /// `x_i` as a 0-form.
    pub fn variable(n: usize, i: usize) -> Result<Self> {
        let mut mono = vec![0; n + 1];
        if i > n {
            return Err(Error::Precondition(format!("x{i} out of range")));
        }
        mono[i] = 1;
        PolyForm::term(n, &mono, &[], Q::one())
    }

    fn insert(&mut self, mono: Monomial, dx: u64, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((mono, dx)) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn poly_degree(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Vec<usize>, &Q)> {
        self.terms.iter().map(|((m, dx), c)| (m.as_slice(), dx_indices(*dx), c))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch(format!("forms on P^{} and P^{}", self.n, other.n)));
        }
        let both_nonzero = !self.is_zero() && !other.is_zero();
        if self.p != other.p || (both_nonzero && self.d != other.d) {
            return Err(Error::DegreeMismatch(format!(
                "cannot add a ({}, {}) form to a ({}, {}) form",
                self.p, self.d, other.p, other.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        let src = if self.is_zero() { &self.terms } else { &other.terms };
        for ((m, dx), c) in src {
            out.insert(m.clone(), *dx, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = PolyForm::zero(self.n, self.p, self.d);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        }
        out
    }

    /// The scalar `c` with `self = c · other`, if one exists and `other ≠ 0`.
    pub fn ratio_to(&self, other: &Self) -> Option<Q> {
        let (k, v) = other.terms.iter().next()?;
        let c = self.terms.get(k).cloned().unwrap_or_else(Q::zero) / v;
        (other.scale(&c) == *self).then_some(c)
    }

    /// `ι_R` with `R = Σ xᵢ ∂/∂xᵢ`.
    pub fn contract_radial(&self) -> Result<Self> {
        if self.p == 0 {
            return Err(Error::Precondition("radial contraction of a 0-form".into()));
        }
        let mut out = PolyForm::zero(self.n, self.p - 1, self.d + 1);
        for ((mono, dx), c) in &self.terms {
            for (j, i) in dx_indices(*dx).into_iter().enumerate() {
                let mut m = mono.clone();
                m[i] += 1;
                let c = if j % 2 == 0 { c.clone() } else { -c.clone() };
                out.insert(m, dx & !(1 << i), c);
            }
        }
        Ok(out)
    }

    /// Interior product with the coordinate field `∂/∂x_k`.
    pub fn contract_coordinate(&self, k: usize) -> Result<Self> {
        if self.p == 0 || k > self.n {
            return Err(Error::Precondition("contraction needs p >= 1 and k <= n".into()));
        }
        let mut out = PolyForm::zero(self.n, self.p - 1, self.d);
        for ((mono, dx), c) in &self.terms {
            if dx >> k & 1 == 1 {
                let c = if position_sign(*dx, k) < 0 { -c.clone() } else { c.clone() };
                out.insert(mono.clone(), dx & !(1 << k), c);
            }
        }
        Ok(out)
    }

    pub fn exterior_derivative(&self) -> Self {
        let mut out = PolyForm::zero(self.n, self.p + 1, self.d.saturating_sub(1));
        for ((mono, dx), c) in &self.terms {
            for k in 0..=self.n {
                if mono[k] == 0 || dx >> k & 1 == 1 {
                    continue;
                }
                let mut m = mono.clone();
                m[k] -= 1;
                let c = c * q(mono[k] as i64 * position_sign(*dx, k));
                out.insert(m, dx | 1 << k, c);
            }
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch("forms on different spaces".into()));
        }
        let mut out = PolyForm::zero(self.n, self.p + other.p, self.d + other.d);
        for ((ma, da), ca) in &self.terms {
            for ((mb, db), cb) in &other.terms {
                let Some(sg) = wedge_sign(*da, *db) else { continue };
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                out.insert(m, da | db, if sg < 0 { -c } else { c });
            }
        }
        Ok(out)
    }

    pub fn is_radially_closed(&self) -> Result<bool> {
        Ok(self.p == 0 || self.contract_radial()?.is_zero())
    }

    fn require_section(&self) -> Result<()> {
        if !self.is_radially_closed()? {
            return Err(Error::Precondition("form is not annihilated by radial contraction".into()));
        }
        Ok(())
    }

    /// `ψ(ω) = ω ∧ dω` for a twisted 1-form.
    pub fn psi_wedge_d(&self) -> Result<Self> {
        if self.p != 1 {
            return Err(Error::Precondition(format!("ψ is defined on 1-forms, got p = {}", self.p)));
        }
        self.require_section()?;
        self.wedge(&self.exterior_derivative())
    }

    /// The polarization `Ψ(ω, η) = ½(ω ∧ dη + η ∧ dω)`.
    pub fn psi_bilinear(&self, other: &Self) -> Result<Self> {
        let a = self.wedge(&other.exterior_derivative())?;
        let b = other.wedge(&self.exterior_derivative())?;
        Ok(a.add(&b)?.scale(&Q::new(1.into(), 2.into())))
    }

    /// The contractions `ι_u ω` over the coordinate basis `u` of
    /// `⋀^{p−1}`.
    fn partial_contractions(&self) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for u in (0..=self.n).combinations(self.p - 1) {
            let mut f = self.clone();
            for &k in u.iter().rev() {
                f = f.contract_coordinate(k)?;
            }
            out.push(f);
        }
        Ok(out)
    }

    /// `(ι_u ω) ∧ ω = 0` for every `u`.
    pub fn is_lds(&self) -> Result<bool> {
        if self.p == 0 {
            return Err(Error::Precondition("LDS test needs p >= 1".into()));
        }
        self.require_section()?;
        for f in self.partial_contractions()? {
            if !f.wedge(self)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// LDS and `(ι_u ω) ∧ dω = 0` for every `u`.
    pub fn is_integrable(&self) -> Result<bool> {
        if !self.is_lds()? {
            return Ok(false);
        }
        let dw = self.exterior_derivative();
        for f in self.partial_contractions()? {
            if !f.wedge(&dw)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(deg + p) · ω = ι_R dω` for a form killed by `ι_R`.
    pub fn euler_identity_check(&self) -> Result<bool> {
        self.require_section()?;
        let lhs = self.scale(&q((self.d + self.p) as i64));
        let rhs = self.exterior_derivative().contract_radial()?;
        Ok(lhs == rhs || (lhs.is_zero() && rhs.is_zero()))
    }

    pub fn to_json(&self) -> String {
        let terms: Vec<FormTerm> = self
            .terms
            .iter()
            .map(|((m, dx), c)| FormTerm { mono: m.clone(), dx: dx_indices(*dx), coeff: c.to_string() })
            .collect();
        serde_json::to_string(&terms).expect("term list serializes")
    }

    /// Parses a term list; `n` and `p` are inferred from the first term.
    pub fn from_json(s: &str) -> Result<Self> {
        let terms: Vec<FormTerm> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let first = terms.first().ok_or_else(|| Error::Parse("empty form; use an explicit zero".into()))?;
        if first.mono.is_empty() || first.mono.len() > 63 {
            return Err(Error::Parse("monomial length out of range".into()));
        }
        let n = first.mono.len() - 1;
        let mut out: Option<PolyForm> = None;
        for t in &terms {
            if t.mono.iter().any(|&e| e > 1_000) {
                return Err(Error::Parse("exponent too large".into()));
            }
            let f = PolyForm::term(n, &t.mono, &t.dx, parse_coeff(&t.coeff)?)?;
            out = Some(match out {
                None => f,
                Some(acc) => {
                    if acc.p != f.p || acc.d != f.d {
                        return Err(Error::Parse("terms of different degrees".into()));
                    }
                    acc.add(&f)?
                }
            });
        }
        Ok(out.expect("at least one term"))
    }
}

/// `ι_R` applied to an element of `S^d V ⊗ ⋀^{p+1} V`, written as a
/// `(p+1)`-form with `eᵢ ↔ dxᵢ`.
pub fn form_from_multivector(x: &PolyForm) -> Result<PolyForm> {
    x.contract_radial()
}

/// `e_{i_1} ∧ … ∧ e_{i_k}` as a constant-coefficient form.
pub fn constant_form(n: usize, dx: &[usize]) -> Result<PolyForm> {
    PolyForm::term(n, &vec![0; n + 1], dx, Q::one())
}

/// The twisted 1-form `x₀^{l−2}(x₀dx₁ − x₁dx₀ + x₂dx₃ − x₃dx₂)` on `ℙⁿ`.
pub fn contact_form(n: usize, l: u32) -> Result<PolyForm> {
    if n < 3 || l < 2 {
        return Err(Error::Precondition("needs n >= 3 and l >= 2".into()));
    }
    let base = constant_form(n, &[0, 1])?.add(&constant_form(n, &[2, 3])?)?;
    let theta = form_from_multivector(&base)?;
    let mut mono = vec![0; n + 1];
    mono[0] = l - 2;
    PolyForm::term(n, &mono, &[], Q::one())?.wedge(&theta)
}

/// `x₀^{2l−4}(x₀ dx₁₂₃ − x₁ dx₀₂₃ + x₂ dx₀₁₃ − x₃ dx₀₁₂)`.
pub fn contact_psi_display(n: usize, l: u32) -> Result<PolyForm> {
    let mut acc = PolyForm::zero(n, 3, (2 * l - 3) as usize);
    for (v, dx, s) in [(0, [1, 2, 3], 1), (1, [0, 2, 3], -1), (2, [0, 1, 3], 1), (3, [0, 1, 2], -1)] {
        let mut mono = vec![0; n + 1];
        mono[0] = 2 * l - 4;
        mono[v] += 1;
        acc = acc.add(&PolyForm::term(n, &mono, &dx, q(s))?)?;
    }
    Ok(acc)
}

/// All monomials of degree `d` in `k` variables, lexicographically.
pub fn monomials(k: usize, d: usize) -> Vec<Monomial> {
    (0..k)
        .combinations_with_replacement(d)
        .map(|c| {
            let mut m = vec![0u32; k];
            for i in c {
                m[i] += 1;
            }
            m
        })
        .collect()
}

/// Dimension of the kernel of `ι_R` on `S^d V ⊗ ⋀^p V`, `dim V = n + 1`, by
/// exact elimination.
pub fn radial_kernel_dim(n: usize, p: usize, d: usize) -> Result<usize> {
    if p == 0 || p > n + 1 {
        return Err(Error::Precondition(format!("p = {p} out of range")));
    }
    let cols: Vec<(Monomial, Vec<usize>)> =
        monomials(n + 1, d).into_iter().cartesian_product((0..=n).combinations(p)).collect();
    let rows: Vec<(Monomial, Vec<usize>)> =
        monomials(n + 1, d + 1).into_iter().cartesian_product((0..=n).combinations(p - 1)).collect();
    let row_index: BTreeMap<(Monomial, Vec<usize>), usize> =
        rows.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut mat = vec![vec![Q::zero(); cols.len()]; rows.len()];
    for (j, (mono, dx)) in cols.iter().enumerate() {
        let img = PolyForm::term(n, mono, dx, Q::one())?.contract_radial()?;
        for (m, idx, c) in img.terms() {
            mat[row_index[&(m.to_vec(), idx)]][j] = c.clone();
        }
    }
    Ok(cols.len() - linalg::rank(&mat, cols.len()))
}

/// A random homogeneous form with up to `terms` terms and small integer
/// coefficients.
pub fn random_form<R: Rng>(rng: &mut R, n: usize, p: usize, d: usize, terms: usize) -> PolyForm {
    let mut out = PolyForm::zero(n, p, d);
    let monos = monomials(n + 1, d);
    for _ in 0..terms {
        let mono = &monos[rng.gen_range(0..monos.len())];
        let mut pool: Vec<usize> = (0..=n).collect();
        let mut mask = 0u64;
        for _ in 0..p {
            let i = pool.swap_remove(rng.gen_range(0..pool.len()));
            mask |= 1 << i;
        }
        let c: i64 = rng.gen_range(-3..=3);
        out.insert(mono.clone(), mask, q(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_examples() {
        let w = form_from_multivector(&constant_form(1, &[0, 1]).unwrap()).unwrap();
        let expect = PolyForm::term(1, &[1, 0], &[1], Q::one())
            .unwrap()
            .sub(&PolyForm::term(1, &[0, 1], &[0], Q::one()).unwrap())
            .unwrap();
        assert_eq!(w, expect);
        assert!(w.contract_radial().unwrap().is_zero());
    }

    #[test]
    fn derivative_example() {
        let w = PolyForm::term(1, &[1, 0], &[1], Q::one()).unwrap();
        assert_eq!(w.exterior_derivative(), constant_form(1, &[0, 1]).unwrap());
    }

    #[test]
    fn contact_psi_is_twice_display() {
        for l in 2..5 {
            let w = contact_form(3, l).unwrap();
            assert!(w.contract_radial().unwrap().is_zero());
            let psi = w.psi_wedge_d().unwrap();
            assert_eq!(psi.ratio_to(&contact_psi_display(3, l).unwrap()), Some(q(2)));
            assert!(!w.is_integrable().unwrap());
        }
    }

    #[test]
    fn pencil_form_integrable() {
        let w = form_from_multivector(&constant_form(3, &[0, 1]).unwrap()).unwrap();
        assert!(w.is_integrable().unwrap());
        assert!(w.psi_wedge_d().unwrap().is_zero());
        assert!(w.euler_identity_check().unwrap());
    }

    #[test]
    fn one_form_section_dims() {
        for n in 1..=4 {
            assert_eq!(radial_kernel_dim(n, 1, 1).unwrap(), (n + 1) * n / 2);
        }
    }

    #[test]
    fn json_round_trip() {
        let w = contact_form(3, 3).unwrap();
        assert_eq!(PolyForm::from_json(&w.to_json()).unwrap(), w);
    }
}
