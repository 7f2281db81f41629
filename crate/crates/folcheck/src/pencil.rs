//! Regular skew-symmetric pencils `A + tB` in Thompson's canonical block form,
//! the kernel sets `K_z^r`, and the structure statement for bivectors `v`
//! whose square is divisible by a nondegenerate `w`.
//!
//! Bivectors live in `⋀²ℂ^{2n}` as [`MultiVector`]s with inner degree 1;
//! indices are 1-based in the public API.

use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extalg::{InnerBasis, MultiVector, Outer};
use crate::linalg::{self, Q};

/// Largest `C(2n, r)` handled by [`kset_basis`] by default (`2n ≤ 12`).
pub const DEFAULT_KSET_CAP: usize = 924;

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// A pencil `A + tB` of `2n × 2n` skew matrices with exact entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewPencil {
    n: usize,
    partition: Vec<usize>,
    values: Vec<Q>,
    a: Vec<Vec<Q>>,
    b: Vec<Vec<Q>>,
}

fn is_skew(m: &[Vec<Q>]) -> bool {
    let k = m.len();
    m.iter().all(|r| r.len() == k) && (0..k).all(|i| (0..k).all(|j| m[i][j] == -m[j][i].clone()))
}

fn matmul(x: &[Vec<Q>], y: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let k = y.len();
    x.iter()
        .map(|row| {
            (0..y[0].len())
                .map(|j| (0..k).filter(|&l| !row[l].is_zero() && !y[l][j].is_zero()).map(|l| &row[l] * &y[l][j]).sum())
                .collect()
        })
        .collect()
}

fn transpose(x: &[Vec<Q>]) -> Vec<Vec<Q>> {
    (0..x[0].len()).map(|j| x.iter().map(|r| r[j].clone()).collect()).collect()
}

impl SkewPencil {
    /// `B(a₁, λ₁) ⊕ … ⊕ B(a_r, λ_r)` with `Δ_m` the anti-diagonal and `Λ_m`
    /// the shifted anti-diagonal `{(i, j) : i + j = m + 2, i ≥ 2}`.
    pub fn canonical(partition: &[usize], values: &[Q]) -> Result<Self> {
        if partition.is_empty() || partition.contains(&0) || partition.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition(format!("malformed partition {partition:?}")));
        }
        if values.len() != partition.len() {
            return Err(Error::Precondition(format!("{} parts but {} values", partition.len(), values.len())));
        }
        let n: usize = partition.iter().sum();
        if 2 * n > 62 {
            return Err(Error::Precondition(format!("n = {n} too large")));
        }
        let size = 2 * n;
        let mut a = vec![vec![Q::zero(); size]; size];
        let mut b = vec![vec![Q::zero(); size]; size];
        let mut off = 0;
        for (&m, val) in partition.iter().zip(values) {
            let put = |mat: &mut Vec<Vec<Q>>, i: usize, j: usize, c: Q| {
                mat[off + i][off + m + j] = c.clone();
                mat[off + m + j][off + i] = -c;
            };
            for i in 0..m {
                let j = m - 1 - i;
                put(&mut a, i, j, val.clone());
                put(&mut b, i, j, Q::one());
                if i >= 1 {
                    put(&mut a, i, m - i, Q::one());
                }
            }
            off += 2 * m;
        }
        Ok(SkewPencil { n, partition: partition.to_vec(), values: values.to_vec(), a, b })
    }

    /// A pencil from explicit skew matrices; partition and values are left
    /// empty.
    pub fn from_matrices(a: Vec<Vec<Q>>, b: Vec<Vec<Q>>) -> Result<Self> {
        if a.len() != b.len() || a.len() % 2 != 0 || !is_skew(&a) || !is_skew(&b) {
            return Err(Error::Precondition("pencil needs two even-size skew matrices".into()));
        }
        Ok(SkewPencil { n: a.len() / 2, partition: vec![], values: vec![], a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn matrix_a(&self) -> &[Vec<Q>] {
        &self.a
    }

    pub fn matrix_b(&self) -> &[Vec<Q>] {
        &self.b
    }

    pub fn is_skew(&self) -> bool {
        is_skew(&self.a) && is_skew(&self.b)
    }

    pub fn det_b(&self) -> Q {
        linalg::determinant(&self.b)
    }

    /// `(PᵀAP, PᵀBP)`; metadata is carried over unchanged.
    pub fn congruent(&self, p: &[Vec<Q>]) -> Result<Self> {
        if p.len() != 2 * self.n || linalg::determinant(p).is_zero() {
            return Err(Error::Precondition("congruence needs an invertible matrix of matching size".into()));
        }
        let pt = transpose(p);
        Ok(SkewPencil {
            n: self.n,
            partition: self.partition.clone(),
            values: self.values.clone(),
            a: matmul(&matmul(&pt, &self.a), p),
            b: matmul(&matmul(&pt, &self.b), p),
        })
    }

    fn bivector(&self, m: &[Vec<Q>]) -> MultiVector {
        let basis = InnerBasis::shared(2 * self.n, 1).expect("size checked at construction");
        let terms = (0..2 * self.n)
            .tuple_combinations()
            .filter(|&(i, j)| !m[i][j].is_zero())
            .map(|(i, j)| (Outer::from_slice(&[i as u32, j as u32]), m[i][j].clone()));
        MultiVector::from_terms(basis, 2, terms).expect("keys are valid")
    }

    /// `v = Σ_{i<j} p_{ij} eᵢ∧eⱼ`.
    pub fn v(&self) -> MultiVector {
        self.bivector(&self.a)
    }

    /// `w = Σ_{i<j} q_{ij} eᵢ∧eⱼ`.
    pub fn w(&self) -> MultiVector {
        self.bivector(&self.b)
    }

    /// Elementary divisors `(a + t)^{2m}` as display strings.
    pub fn elementary_divisors(&self) -> Vec<String> {
        self.partition.iter().zip(&self.values).map(|(m, a)| format!("({a}+t)^{}", 2 * m)).collect()
    }
}

fn basis_keys(size: usize, r: usize) -> Vec<Outer> {
    (0..size as u32).combinations(r).map(|c| Outer::from_slice(&c)).collect()
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Matrix of `x ↦ x ∧ z` from `⋀^r` to `⋀^{r+k}`, rows indexed by the target
/// basis.
fn wedge_matrix(z: &MultiVector, r: usize) -> Result<Vec<Vec<Q>>> {
    let size = z.n();
    let src = basis_keys(size, r);
    let dst = basis_keys(size, r + z.degree());
    let index: rustc_hash::FxHashMap<&Outer, usize> = dst.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut mat = vec![vec![Q::zero(); src.len()]; dst.len()];
    for (j, key) in src.iter().enumerate() {
        let x = MultiVector::from_terms(z.basis().clone(), r, [(key.clone(), Q::one())])?;
        for (k, c) in x.wedge(z)?.terms() {
            mat[index[k]][j] = c.clone();
        }
    }
    Ok(mat)
}

/// A basis of `K_z^r = {x ∈ ⋀^r : x ∧ z = 0}`.
pub fn kset_basis(z: &MultiVector, r: usize, cap: usize) -> Result<Vec<MultiVector>> {
    if z.inner_degree() != 1 {
        return Err(Error::Precondition("K-sets are taken in the plain exterior algebra".into()));
    }
    let size = z.n();
    if r + z.degree() > size {
        return Err(Error::DegreeOverflow(format!("r + k = {} exceeds {size}", r + z.degree())));
    }
    if binom(size, r) > cap {
        return Err(Error::Precondition(format!("C({size},{r}) exceeds the cap {cap}")));
    }
    let src = basis_keys(size, r);
    let mat = wedge_matrix(z, r)?;
    linalg::kernel(&mat, src.len())
        .into_iter()
        .map(|v| {
            let terms = src.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero());
            MultiVector::from_terms(z.basis().clone(), r, terms)
        })
        .collect()
}

/// The scalar `x ∧ z` for complementary degrees.
fn top_pairing(x: &MultiVector, z: &MultiVector) -> Result<Q> {
    let top = x.wedge(z)?;
    let key: Outer = (0..x.n() as u32).collect();
    Ok(top.coeff(&key))
}

fn check_nondegenerate(w: &MultiVector) -> Result<()> {
    if w.degree() != 2 || w.inner_degree() != 1 || w.n() % 2 != 0 {
        return Err(Error::Precondition("w must be a bivector on an even-dimensional space".into()));
    }
    if w.skew_rank()? != w.n() {
        return Err(Error::Precondition("w^n = 0".into()));
    }
    Ok(())
}

/// Divisibility of `v ∧ v` by `w` through `K_w^{2n−4} ⊆ K_{v∧v}^{2n−4}`.
/// On failure returns a kernel vector `φ` with `φ ∧ v ∧ v ≠ 0`.
pub fn divides_wedge_square(w: &MultiVector, v: &MultiVector) -> Result<(bool, Option<(MultiVector, Q)>)> {
    divides_wedge_square_capped(w, v, DEFAULT_KSET_CAP)
}

/// [`divides_wedge_square`] with an explicit cap on `C(2n, 2n−4)`.
pub fn divides_wedge_square_capped(
    w: &MultiVector,
    v: &MultiVector,
    cap: usize,
) -> Result<(bool, Option<(MultiVector, Q)>)> {
    check_nondegenerate(w)?;
    let size = w.n();
    if size < 4 {
        return Ok((true, None));
    }
    let vv = v.wedge(v)?;
    for phi in kset_basis(w, size - 4, cap)? {
        let c = top_pairing(&phi, &vv)?;
        if !c.is_zero() {
            return Ok((false, Some((phi, c))));
        }
    }
    Ok((true, None))
}

/// Solves `v ∧ v = w ∧ x` for `x ∈ ⋀²` directly.
pub fn solve_wedge_square(w: &MultiVector, v: &MultiVector) -> Result<Option<MultiVector>> {
    let size = w.n();
    if size < 4 {
        return Ok(Some(MultiVector::zero(w.basis().clone(), 2)));
    }
    let mat = wedge_matrix(w, 2)?;
    let vv = v.wedge(v)?;
    let rhs: Vec<Q> = basis_keys(size, 4).iter().map(|k| vv.coeff(k)).collect();
    let src = basis_keys(size, 2);
    Ok(linalg::solve(&mat, src.len(), &rhs).map(|x| {
        let terms = src.into_iter().zip(x).filter(|(_, c)| !c.is_zero());
        MultiVector::from_terms(w.basis().clone(), 2, terms).expect("valid keys")
    }))
}

/// The predicted verdict: divisible exactly for `(1ⁿ)` with
/// at least `n − 1` equal values and for `(2, 1^{n−2})` with all values
/// equal.
pub fn predicted_divisible(partition: &[usize], values: &[Q]) -> bool {
    let n: usize = partition.iter().sum();
    if partition.iter().all(|&m| m == 1) {
        let max_equal = values.iter().map(|x| values.iter().filter(|y| *y == x).count()).max().unwrap_or(0);
        return max_equal + 1 >= n;
    }
    partition[0] == 2 && partition[1..].iter().all(|&m| m == 1) && values.iter().all(|x| *x == values[0])
}

/// The classical obstruction vectors `⋀_{j ∉ S} e_j`, when the partition
/// calls for one.
pub fn proof_witness(partition: &[usize]) -> Option<Vec<usize>> {
    let n: usize = partition.iter().sum();
    let skip: Vec<usize> = if partition[0] >= 3 {
        let l = partition[0];
        vec![2, 3, 2 * l - 1, 2 * l]
    } else if partition.len() >= 2 && partition[0] == 2 && partition[1] == 2 {
        vec![2, 4, 6, 8]
    } else {
        return None;
    };
    Some((1..=2 * n).filter(|j| !skip.contains(j)).collect())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Decomposition {
    pub a: String,
    pub y: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Witness {
    pub phi: String,
    pub pairing: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ProofWitnessCheck {
    pub indices: Vec<usize>,
    pub in_kernel: bool,
    pub pairing: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PencilReport {
    pub n: usize,
    pub partition: Vec<usize>,
    pub values: Vec<String>,
    pub elementary_divisors: Vec<String>,
    pub divisible: bool,
    pub divisible_by_solving: bool,
    pub tests_agree: bool,
    pub predicted_divisible: bool,
    pub decomposition: Option<Decomposition>,
    pub witness: Option<Witness>,
    pub proof_witness: Option<ProofWitnessCheck>,
    /// Divisibility matches the prediction and, when divisible, `v = aw + y`
    /// with `y ∧ y = 0` was found.
    pub verdict_matches: bool,
}

/// Finds `a` with `(v − aw)^2 = 0`. Any such `a` is a root of
/// `det(A − aB)`, so the block values are the only candidates.
pub fn find_decomposition(pencil: &SkewPencil) -> Result<Option<(Q, MultiVector)>> {
    let (v, w) = (pencil.v(), pencil.w());
    for a in pencil.values.iter().unique() {
        let y = v.sub(&w.scale(a))?;
        if y.power(2)?.is_zero() {
            return Ok(Some((a.clone(), y)));
        }
    }
    Ok(None)
}

pub fn verify_pencil(partition: &[usize], values: &[Q]) -> Result<PencilReport> {
    let pencil = SkewPencil::canonical(partition, values)?;
    let (v, w) = (pencil.v(), pencil.w());
    let (divisible, witness) = divides_wedge_square(&w, &v)?;
    let divisible_by_solving = solve_wedge_square(&w, &v)?.is_some();
    let predicted = predicted_divisible(partition, values);
    let decomposition = if divisible { find_decomposition(&pencil)? } else { None };
    let proof_witness = match proof_witness(partition) {
        Some(idx) if pencil.n >= 2 => {
            let basis = InnerBasis::shared(2 * pencil.n, 1)?;
            let key: Outer = idx.iter().map(|&i| (i - 1) as u32).collect();
            let phi = MultiVector::from_terms(basis, idx.len(), [(key, Q::one())])?;
            let in_kernel = phi.wedge(&w)?.is_zero();
            let pairing = top_pairing(&phi, &v.wedge(&v)?)?;
            Some(ProofWitnessCheck { indices: idx, in_kernel, pairing: pairing.to_string() })
        }
        _ => None,
    };
    let verdict_matches = divisible == predicted && (!divisible || decomposition.is_some());
    Ok(PencilReport {
        n: pencil.n,
        partition: partition.to_vec(),
        values: values.iter().map(|x| x.to_string()).collect(),
        elementary_divisors: pencil.elementary_divisors(),
        divisible,
        divisible_by_solving,
        tests_agree: divisible == divisible_by_solving,
        predicted_divisible: predicted,
        decomposition: decomposition.map(|(a, y)| Decomposition { a: a.to_string(), y: y.to_json() }),
        witness: witness.map(|(phi, c)| Witness { phi: phi.to_json(), pairing: c.to_string() }),
        proof_witness,
        verdict_matches,
    })
}

/// All partitions of `n` in decreasing order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Five value vectors for a partition with `r` parts: all equal, all but one
/// equal, one pair equal, distinct, and a random draw from a small range.
pub fn value_patterns<R: Rng>(rng: &mut R, r: usize) -> Vec<Vec<Q>> {
    let mut distinct: Vec<i64> = (-20..=20).collect();
    distinct.shuffle(rng);
    let d = &distinct[..r.max(2)];
    let base = d[0];
    let mut out = vec![vec![q(base); r]];
    let mut one_off = vec![q(base); r];
    one_off[rng.gen_range(0..r)] = q(d[1]);
    out.push(one_off);
    let mut pair: Vec<Q> = d[..r].iter().map(|&x| q(x)).collect();
    if r >= 2 {
        pair[1] = pair[0].clone();
    }
    out.push(pair);
    out.push(d[..r].iter().map(|&x| q(x)).collect());
    out.push((0..r).map(|_| q(rng.gen_range(-2..=2))).collect());
    out
}

/// A random invertible integer matrix: a product of elementary operations
/// and a signed permutation.
pub fn random_invertible<R: Rng>(rng: &mut R, size: usize) -> Vec<Vec<Q>> {
    let mut p: Vec<Vec<Q>> = (0..size).map(|i| (0..size).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    let mut perm: Vec<usize> = (0..size).collect();
    perm.shuffle(rng);
    p = perm.iter().map(|&i| p[i].clone()).collect();
    for _ in 0..2 * size {
        let (i, j) = (rng.gen_range(0..size), rng.gen_range(0..size));
        if i == j {
            continue;
        }
        let c = q(rng.gen_range(-2..=2));
        let row = p[j].clone();
        for (x, y) in p[i].iter_mut().zip(row) {
            *x += &c * y;
        }
    }
    p
}

/// Shared handle to a plain exterior algebra basis of `ℂ^{2n}`.
pub fn plain_basis(size: usize) -> Result<Arc<InnerBasis>> {
    InnerBasis::shared(size, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn bivec(size: usize, terms: &[(usize, usize, i64)]) -> MultiVector {
        let basis = plain_basis(size).unwrap();
        MultiVector::from_terms(
            basis,
            2,
            terms.iter().map(|&(i, j, c)| (Outer::from_slice(&[(i - 1) as u32, (j - 1) as u32]), q(c))),
        )
        .unwrap()
    }

    #[test]
    fn canonical_blocks() {
        let p = SkewPencil::canonical(&[1, 1, 1], &qs(&[1, 2, 3])).unwrap();
        assert_eq!(p.w(), bivec(6, &[(1, 2, 1), (3, 4, 1), (5, 6, 1)]));
        assert_eq!(p.v(), bivec(6, &[(1, 2, 1), (3, 4, 2), (5, 6, 3)]));
        let p = SkewPencil::canonical(&[2, 1], &qs(&[5, 7])).unwrap();
        assert_eq!(p.v(), bivec(6, &[(1, 4, 5), (2, 3, 5), (2, 4, 1), (5, 6, 7)]));
        assert!(p.is_skew());
        assert!(!p.det_b().is_zero());
    }

    #[test]
    fn ones_with_one_outlier() {
        let r = verify_pencil(&[1, 1, 1, 1], &qs(&[5, 3, 3, 3])).unwrap();
        assert!(r.divisible && r.tests_agree && r.verdict_matches);
        let d = r.decomposition.unwrap();
        assert_eq!(d.a, "3");
        assert_eq!(d.y, r#"[{"outer":[[1],[2]],"coeff":"2"}]"#);
    }

    #[test]
    fn two_ones_all_equal() {
        let r = verify_pencil(&[2, 1, 1], &qs(&[4, 4, 4])).unwrap();
        let d = r.decomposition.unwrap();
        assert_eq!(d.a, "4");
        assert_eq!(d.y, r#"[{"outer":[[2],[4]],"coeff":"1"}]"#);
    }

    #[test]
    fn two_two_obstructed() {
        let r = verify_pencil(&[2, 2], &qs(&[1, 1])).unwrap();
        assert!(!r.divisible && r.tests_agree && r.verdict_matches);
        let pw = r.proof_witness.unwrap();
        assert!(pw.in_kernel && pw.pairing != "0");
    }

    #[test]
    fn partitions_count() {
        assert_eq!(partitions(5).len(), 7);
        assert_eq!(partitions(4)[0], vec![4]);
    }

    #[test]
    fn kset_of_zero_is_everything() {
        let z = MultiVector::zero(plain_basis(6).unwrap(), 2);
        assert_eq!(kset_basis(&z, 2, DEFAULT_KSET_CAP).unwrap().len(), 15);
    }
}
