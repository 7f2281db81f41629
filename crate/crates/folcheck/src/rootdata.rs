//! Root data for products of simple Lie algebras and their Levi subsystems.
//!
//! Nodes follow Bourbaki numbering inside each simple factor. Internally
//! nodes are 0-based; the textual forms (`A7/P3`, `L3`) are 1-based.
//!
//! A [`RootSystem`] always lives on an ambient product system. Levi
//! subsystems keep the ambient weight coordinates and only shrink the set
//! of active simple roots, so characters of parabolic representations carry
//! their central coordinates along for free.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::weight::{Weight, MAX_RANK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl CartanType {
    fn letter(self) -> char {
        match self {
            CartanType::A => 'A',
            CartanType::B => 'B',
            CartanType::C => 'C',
            CartanType::D => 'D',
            CartanType::E => 'E',
            CartanType::F => 'F',
            CartanType::G => 'G',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'A' => CartanType::A,
            'B' => CartanType::B,
            'C' => CartanType::C,
            'D' => CartanType::D,
            'E' => CartanType::E,
            'F' => CartanType::F,
            'G' => CartanType::G,
            _ => return None,
        })
    }
}

/// A simple factor of the ambient system, occupying nodes `offset..offset + rank`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub kind: CartanType,
    pub rank: usize,
    pub offset: usize,
}

impl Component {
    pub fn name(&self) -> String {
        format!("{}{}", self.kind.letter(), self.rank)
    }

    pub fn contains(&self, node: usize) -> bool {
        node >= self.offset && node < self.offset + self.rank
    }

    /// Cominuscule nodes, 0-based and local to the component.
    pub fn cominuscule_nodes(&self) -> Vec<usize> {
        let r = self.rank;
        match self.kind {
            CartanType::A => (0..r).collect(),
            CartanType::B => vec![0],
            CartanType::C => vec![r - 1],
            CartanType::D => vec![0, r - 2, r - 1],
            CartanType::E if r == 6 => vec![0, 5],
            CartanType::E if r == 7 => vec![6],
            _ => vec![],
        }
    }
}

/// A positive root with the data needed by the character algorithms.
#[derive(Clone, Debug)]
pub struct Root {
    /// Coordinates in the basis of simple roots.
    pub coords: Vec<i32>,
    /// The root in fundamental-weight coordinates.
    pub weight: Weight,
    /// `<mu, root^vee> = sum_j coroot[j] * mu[j]`.
    pub coroot: Vec<i32>,
    /// `(mu, root) = sum_j dvec[j] * mu[j]` in the integral normalization.
    pub dvec: Vec<i64>,
    /// `(root, root)` in the integral normalization.
    pub norm: i64,
    pub height: i32,
}

#[derive(Clone)]
pub struct RootSystem {
    name: String,
    components: Vec<Component>,
    cartan: Vec<Vec<i32>>,
    half_norms: Vec<i64>,
    active: Vec<usize>,
    removed: Vec<usize>,
    cinv_num: Vec<Vec<i64>>,
    cinv_den: i64,
    positive_roots: Vec<Root>,
    levi_type: Vec<(CartanType, Vec<usize>)>,
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootSystem({})", self.name)
    }
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl PartialEq for RootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components && self.active == other.active
    }
}

impl Eq for RootSystem {}

/// Symmetrized Gram matrix of the simple roots, scaled so short roots have
/// squared length 2.
fn simple_gram(kind: CartanType, r: usize) -> Result<Vec<Vec<i64>>> {
    let bad = || Error::UnsupportedRootSystem(format!("{}{}", kind.letter(), r));
    let mut g = vec![vec![0i64; r]; r];
    let link = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
        g[i][j] = v;
        g[j][i] = v;
    };
    match kind {
        CartanType::A => {
            if r < 1 {
                return Err(bad());
            }
            for i in 0..r {
                g[i][i] = 2;
                if i + 1 < r {
                    link(&mut g, i, i + 1, -1);
                }
            }
        }
        CartanType::B => {
            if r < 2 {
                return Err(bad());
            }
            for i in 0..r {
                g[i][i] = if i + 1 == r { 2 } else { 4 };
                if i + 1 < r {
                    link(&mut g, i, i + 1, -2);
                }
            }
        }
        CartanType::C => {
            if r < 2 {
                return Err(bad());
            }
            for i in 0..r {
                g[i][i] = if i + 1 == r { 4 } else { 2 };
                if i + 2 < r {
                    link(&mut g, i, i + 1, -1);
                } else if i + 1 < r {
                    link(&mut g, i, i + 1, -2);
                }
            }
        }
        CartanType::D => {
            if r < 3 {
                return Err(bad());
            }
            for i in 0..r {
                g[i][i] = 2;
            }
            for i in 0..r - 2 {
                link(&mut g, i, i + 1, -1);
            }
            link(&mut g, r - 3, r - 1, -1);
        }
        CartanType::E => {
            if !(6..=8).contains(&r) {
                return Err(bad());
            }
            for i in 0..r {
                g[i][i] = 2;
            }
            link(&mut g, 0, 2, -1);
            link(&mut g, 1, 3, -1);
            for i in 2..r - 1 {
                link(&mut g, i, i + 1, -1);
            }
        }
        CartanType::F => {
            if r != 4 {
                return Err(bad());
            }
            g[0][0] = 4;
            g[1][1] = 4;
            g[2][2] = 2;
            g[3][3] = 2;
            link(&mut g, 0, 1, -2);
            link(&mut g, 1, 2, -2);
            link(&mut g, 2, 3, -1);
        }
        CartanType::G => {
            if r != 2 {
                return Err(bad());
            }
            g[0][0] = 2;
            g[1][1] = 6;
            link(&mut g, 0, 1, -3);
        }
    }
    Ok(g)
}

fn invert_exact(m: &[Vec<i32>]) -> Option<Vec<Vec<Rational64>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational64> = row.iter().map(|&x| Rational64::from_integer(x as i64)).collect();
            r.extend((0..n).map(|j| if i == j { Rational64::one() } else { Rational64::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in 0..2 * n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

impl RootSystem {
    /// Parses `A7`, `A2xA4`, `E6`, optionally followed by a parabolic such as
    /// `/P3` or `/P1,4`, in which case the Levi subsystem is returned.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (base, para) = match s.split_once('/') {
            Some((b, p)) => (b.trim(), Some(p.trim())),
            None => (s, None),
        };
        if base.is_empty() {
            return Err(Error::Parse("empty root system".into()));
        }
        let mut parts = Vec::new();
        for piece in base.split(['x', 'X', '×']) {
            let piece = piece.trim();
            let mut chars = piece.chars();
            let letter = chars
                .next()
                .and_then(CartanType::from_letter)
                .ok_or_else(|| Error::Parse(format!("bad root system factor {piece:?}")))?;
            let digits = chars.as_str();
            if digits.is_empty() || digits.len() > 3 || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad rank in {piece:?}")));
            }
            let r: usize = digits.parse().map_err(|_| Error::Parse(format!("bad rank in {piece:?}")))?;
            parts.push((letter, r));
        }
        let rs = RootSystem::product(&parts)?;
        match para {
            None => Ok(rs),
            Some(p) => {
                let p = p
                    .strip_prefix('P')
                    .or_else(|| p.strip_prefix('p'))
                    .ok_or_else(|| Error::Parse(format!("bad parabolic {p:?}")))?;
                let mut nodes = Vec::new();
                for t in p.split(',') {
                    let k: usize = t
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad parabolic node {t:?}")))?;
                    if k == 0 || k > rs.rank() {
                        return Err(Error::NodeOutOfRange { node: k, rank: rs.rank() });
                    }
                    nodes.push(k - 1);
                }
                rs.levi(&nodes)
            }
        }
    }

    pub fn simple(kind: CartanType, rank: usize) -> Result<Self> {
        Self::product(&[(kind, rank)])
    }

    pub fn product(parts: &[(CartanType, usize)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::UnsupportedRootSystem("empty product".into()));
        }
        let total: usize = parts.iter().map(|p| p.1).sum();
        if total > MAX_RANK {
            return Err(Error::UnsupportedRootSystem(format!("total rank {total} exceeds {MAX_RANK}")));
        }
        let mut gram = vec![vec![0i64; total]; total];
        let mut components = Vec::new();
        let mut offset = 0;
        for &(kind, r) in parts {
            let g = simple_gram(kind, r)?;
            for i in 0..r {
                for j in 0..r {
                    gram[offset + i][offset + j] = g[i][j];
                }
            }
            components.push(Component { kind, rank: r, offset });
            offset += r;
        }
        Self::from_gram(components, gram, (0..total).collect())
    }

    fn from_gram(components: Vec<Component>, gram: Vec<Vec<i64>>, active: Vec<usize>) -> Result<Self> {
        let n = gram.len();
        let half_norms: Vec<i64> = (0..n).map(|i| gram[i][i] / 2).collect();
        let cartan: Vec<Vec<i32>> = (0..n)
            .map(|i| (0..n).map(|j| (2 * gram[i][j] / gram[j][j]) as i32).collect())
            .collect();
        let cinv = invert_exact(&cartan)
            .ok_or_else(|| Error::UnsupportedRootSystem("singular Cartan matrix".into()))?;
        let cinv_den = cinv.iter().flatten().fold(1i64, |acc, q| acc.lcm(q.denom()));
        let cinv_num = cinv
            .iter()
            .map(|row| row.iter().map(|q| q.numer() * (cinv_den / q.denom())).collect())
            .collect();
        let removed = (0..n).filter(|i| !active.contains(i)).collect();
        let mut rs = RootSystem {
            name: String::new(),
            components,
            cartan,
            half_norms,
            active,
            removed,
            cinv_num,
            cinv_den,
            positive_roots: Vec::new(),
            levi_type: Vec::new(),
        };
        rs.positive_roots = rs.generate_positive_roots(&gram);
        rs.levi_type = rs.classify_active();
        rs.name = rs.make_name();
        Ok(rs)
    }

    fn generate_positive_roots(&self, gram: &[Vec<i64>]) -> Vec<Root> {
        let n = self.rank();
        let active = &self.active;
        let mut seen: FxHashSet<Vec<i32>> = FxHashSet::default();
        let mut layers: Vec<Vec<Vec<i32>>> = Vec::new();
        let simple: Vec<Vec<i32>> = active
            .iter()
            .map(|&i| {
                let mut c = vec![0; n];
                c[i] = 1;
                c
            })
            .collect();
        for c in &simple {
            seen.insert(c.clone());
        }
        layers.push(simple);
        loop {
            let mut next = Vec::new();
            for beta in layers.last().unwrap() {
                for &i in active {
                    // <beta, alpha_i^vee> from the Cartan rows.
                    let pair: i32 = (0..n).map(|j| beta[j] * self.cartan[j][i]).sum();
                    let mut p = 0;
                    let mut probe = beta.clone();
                    loop {
                        probe[i] -= 1;
                        if probe[i] >= 0 && seen.contains(&probe) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let q = p - pair;
                    if q > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if seen.insert(up.clone()) {
                            next.push(up);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort();
            layers.push(next);
        }
        layers
            .into_iter()
            .flatten()
            .map(|coords| {
                let mut weight = Weight::zero(n);
                for j in 0..n {
                    if coords[j] != 0 {
                        for t in 0..n {
                            weight.as_mut_slice()[t] += coords[j] * self.cartan[j][t];
                        }
                    }
                }
                let mut norm = 0i64;
                for a in 0..n {
                    for b in 0..n {
                        norm += coords[a] as i64 * coords[b] as i64 * gram[a][b];
                    }
                }
                let dvec: Vec<i64> = (0..n).map(|j| coords[j] as i64 * self.half_norms[j]).collect();
                let coroot = (0..n).map(|j| (2 * dvec[j] / norm) as i32).collect();
                let height = coords.iter().sum();
                Root { coords, weight, coroot, dvec, norm, height }
            })
            .collect()
    }

    fn classify_active(&self) -> Vec<(CartanType, Vec<usize>)> {
        let mut out = Vec::new();
        let mut visited = vec![false; self.rank()];
        for &start in &self.active {
            if visited[start] {
                continue;
            }
            let mut comp = vec![start];
            visited[start] = true;
            let mut idx = 0;
            while idx < comp.len() {
                let u = comp[idx];
                idx += 1;
                for &v in &self.active {
                    if !visited[v] && self.cartan[u][v] != 0 {
                        visited[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort();
            out.push((self.classify_component(&comp), comp));
        }
        out
    }

    fn classify_component(&self, nodes: &[usize]) -> CartanType {
        let c = &self.cartan;
        let n = nodes.len();
        let mut max_bond = 1;
        let mut degree = vec![0; n];
        for (a, &u) in nodes.iter().enumerate() {
            for &v in nodes {
                if u != v && c[u][v] != 0 {
                    degree[a] += 1;
                    max_bond = max_bond.max(c[u][v] * c[v][u]);
                }
            }
        }
        if max_bond == 3 {
            return CartanType::G;
        }
        if max_bond == 2 {
            if n == 4 && degree.iter().filter(|&&d| d == 2).count() == 2 {
                let ends: Vec<usize> = (0..n).filter(|&a| degree[a] == 1).map(|a| nodes[a]).collect();
                let end_double = ends.iter().any(|&e| nodes.iter().any(|&v| v != e && c[e][v] * c[v][e] == 2));
                if !end_double {
                    return CartanType::F;
                }
            }
            // The doubly bonded end node is short in type B and long in type C.
            for (a, &u) in nodes.iter().enumerate() {
                if degree[a] <= 1 {
                    if let Some(&v) = nodes.iter().find(|&&v| v != u && c[u][v] * c[v][u] == 2) {
                        return if self.half_norms[u] < self.half_norms[v] { CartanType::B } else { CartanType::C };
                    }
                }
            }
            return CartanType::B;
        }
        if let Some(center) = (0..n).find(|&a| degree[a] == 3) {
            let mut arms = Vec::new();
            for &v in nodes {
                if v != nodes[center] && c[nodes[center]][v] != 0 {
                    let mut len = 1;
                    let (mut prev, mut cur) = (nodes[center], v);
                    loop {
                        let nxt = nodes.iter().copied().find(|&w| w != prev && w != cur && c[cur][w] != 0);
                        match nxt {
                            Some(w) => {
                                prev = cur;
                                cur = w;
                                len += 1;
                            }
                            None => break,
                        }
                    }
                    arms.push(len);
                }
            }
            arms.sort();
            return if arms[0] == 1 && arms[1] == 1 { CartanType::D } else { CartanType::E };
        }
        CartanType::A
    }

    fn make_name(&self) -> String {
        let base = self.components.iter().map(|c| c.name()).collect::<Vec<_>>().join("x");
        if self.removed.is_empty() {
            base
        } else {
            let nodes = self.removed.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",");
            format!("{base}/P{nodes}")
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Total rank of the ambient system; the length of every weight.
    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Active simple nodes (all nodes unless this is a Levi subsystem).
    pub fn active_nodes(&self) -> &[usize] {
        &self.active
    }

    /// Nodes removed to form this Levi subsystem.
    pub fn removed_nodes(&self) -> &[usize] {
        &self.removed
    }

    pub fn is_levi(&self) -> bool {
        !self.removed.is_empty()
    }

    /// Cartan types of the connected pieces of the active diagram, e.g. `A2xA4`.
    pub fn semisimple_type(&self) -> String {
        if self.levi_type.is_empty() {
            return "trivial".into();
        }
        self.levi_type
            .iter()
            .map(|(t, nodes)| format!("{}{}", t.letter(), nodes.len()))
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Connected pieces of the active diagram with their ambient node lists.
    pub fn active_components(&self) -> &[(CartanType, Vec<usize>)] {
        &self.levi_type
    }

    /// Cartan matrix with `C[i][j] = <alpha_i, alpha_j^vee>`; row `i` is
    /// `alpha_i` in fundamental coordinates.
    pub fn cartan_matrix(&self) -> &[Vec<i32>] {
        &self.cartan
    }

    /// `(alpha_i, alpha_i) / 2`, with short roots normalized to 1.
    pub fn root_half_norms(&self) -> &[i64] {
        &self.half_norms
    }

    pub fn inverse_cartan(&self) -> Vec<Vec<Rational64>> {
        self.cinv_num
            .iter()
            .map(|row| row.iter().map(|&x| Rational64::new(x, self.cinv_den)).collect())
            .collect()
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    pub fn simple_root(&self, i: usize) -> Weight {
        Weight::from_slice(&self.cartan[i]).expect("rank checked")
    }

    pub fn rho(&self) -> Weight {
        let mut w = Weight::zero(self.rank());
        for &i in &self.active {
            w.as_mut_slice()[i] = 1;
        }
        w
    }

    pub fn check_weight(&self, mu: &Weight) -> Result<()> {
        if mu.rank() != self.rank() {
            return Err(Error::WeightLength { got: mu.rank(), expected: self.rank() });
        }
        Ok(())
    }

    fn check_node(&self, k: usize) -> Result<()> {
        if k >= self.rank() {
            return Err(Error::NodeOutOfRange { node: k + 1, rank: self.rank() });
        }
        Ok(())
    }

    pub fn component_of(&self, node: usize) -> Option<&Component> {
        self.components.iter().find(|c| c.contains(node))
    }

    pub fn is_dominant(&self, mu: &Weight) -> bool {
        self.active.iter().all(|&i| mu[i] >= 0)
    }

    /// Simple reflection `s_i`.
    pub fn reflect(&self, mu: &mut Weight, i: usize) {
        let c = mu[i];
        if c != 0 {
            for (t, &a) in self.cartan[i].iter().enumerate() {
                mu.as_mut_slice()[t] -= c * a;
            }
        }
    }

    /// The dominant Weyl conjugate and the parity of the reflections used.
    pub fn dominant_conjugate(&self, mu: &Weight) -> (Weight, bool) {
        let mut w = mu.clone();
        let mut odd = false;
        while let Some(&i) = self.active.iter().find(|&&i| w[i] < 0) {
            self.reflect(&mut w, i);
            odd = !odd;
        }
        (w, odd)
    }

    /// The Weyl orbit of `mu`, sorted.
    pub fn orbit(&self, mu: &Weight) -> Vec<Weight> {
        let (dom, _) = self.dominant_conjugate(mu);
        let mut seen: FxHashSet<Weight> = FxHashSet::default();
        seen.insert(dom.clone());
        let mut stack = vec![dom];
        let mut out = Vec::new();
        while let Some(w) = stack.pop() {
            for &i in &self.active {
                if w[i] > 0 {
                    let mut v = w.clone();
                    self.reflect(&mut v, i);
                    if seen.insert(v.clone()) {
                        stack.push(v);
                    }
                }
            }
            out.push(w);
        }
        out.sort();
        out
    }

    /// Root-basis coordinates of `mu`, scaled by [`Self::root_coord_den`].
    pub fn root_coords_scaled(&self, mu: &Weight) -> Vec<i64> {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| mu[j] as i64 * self.cinv_num[j][i]).sum())
            .collect()
    }

    pub fn root_coord_den(&self) -> i64 {
        self.cinv_den
    }

    /// Height of `mu` scaled by [`Self::root_coord_den`]. Positive roots have
    /// positive height, so maximal height is maximal in the dominance order.
    pub fn height_scaled(&self, mu: &Weight) -> i64 {
        self.root_coords_scaled(mu).iter().sum()
    }

    /// Whether `mu - nu` is a non-negative combination of active simple roots.
    pub fn dominates(&self, mu: &Weight, nu: &Weight) -> bool {
        let c = self.root_coords_scaled(&(mu - nu));
        c.iter().enumerate().all(|(i, &x)| {
            x >= 0 && x % self.cinv_den == 0 && (x == 0 || self.active.contains(&i))
        })
    }

    /// The invariant form on weights, `(L_i, L_j) = Cinv[i][j] * d_j`.
    pub fn pairing(&self, mu: &Weight, nu: &Weight) -> Rational64 {
        let n = self.rank();
        let mut acc: i64 = 0;
        for i in 0..n {
            if mu[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc += mu[i] as i64 * self.cinv_num[i][j] * self.half_norms[j] * nu[j] as i64;
            }
        }
        Rational64::new(acc, self.cinv_den)
    }

    /// Weyl dimension of the irreducible module of the active subsystem with
    /// highest weight `lambda`.
    pub fn weyl_dim(&self, lambda: &Weight) -> Result<u128> {
        self.check_weight(lambda)?;
        if !self.is_dominant(lambda) {
            return Err(Error::NotDominant(lambda.to_string()));
        }
        self.weyl_dim_signed(lambda)?
            .to_u128()
            .ok_or(Error::Overflow("weyl_dim"))
    }

    /// Weyl's product for any weight; negative or zero off the dominant chamber.
    pub fn weyl_dim_signed(&self, lambda: &Weight) -> Result<BigInt> {
        self.check_weight(lambda)?;
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for root in &self.positive_roots {
            let mut a: i64 = 0;
            let mut b: i64 = 0;
            for j in 0..self.rank() {
                a += root.dvec[j] * (lambda[j] as i64 + 1);
                b += root.dvec[j];
            }
            num *= a;
            den *= b;
        }
        let (q, r) = num.div_rem(&den);
        if !r.is_zero() {
            return Err(Error::NonIntegral(format!("weyl dimension of {lambda}")));
        }
        Ok(q)
    }

    /// Levi subsystem obtained by removing `nodes` from the active diagram.
    pub fn levi(&self, nodes: &[usize]) -> Result<Self> {
        for &k in nodes {
            self.check_node(k)?;
            if !self.active.contains(&k) {
                return Err(Error::Precondition(format!("node {} already removed", k + 1)));
            }
        }
        let active = self.active.iter().copied().filter(|i| !nodes.contains(i)).collect();
        let gram = self.gram();
        Self::from_gram(self.components.clone(), gram, active)
    }

    /// Levi subsystem of the maximal parabolic at node `k`.
    pub fn levi_subsystem(&self, k: usize) -> Result<Self> {
        self.levi(&[k])
    }

    /// The full system on the same ambient nodes.
    pub fn ambient(&self) -> Result<Self> {
        if self.removed.is_empty() {
            return Ok(self.clone());
        }
        Self::from_gram(self.components.clone(), self.gram(), (0..self.rank()).collect())
    }

    fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| self.cartan[i][j] as i64 * self.half_norms[j]).collect())
            .collect()
    }

    /// Highest root of the simple factor containing `node`.
    pub fn highest_root(&self, node: usize) -> Result<Weight> {
        let comp = *self
            .component_of(node)
            .ok_or(Error::NodeOutOfRange { node: node + 1, rank: self.rank() })?;
        let full = self.ambient()?;
        let best = full
            .positive_roots
            .iter()
            .filter(|r| comp.contains(r.coords.iter().position(|&c| c != 0).unwrap_or(0)))
            .max_by_key(|r| r.height)
            .expect("every factor has roots");
        Ok(best.weight.clone())
    }

    pub fn is_cominuscule(&self, k: usize) -> bool {
        match self.component_of(k) {
            Some(c) => c.cominuscule_nodes().contains(&(k - c.offset)),
            None => false,
        }
    }

    fn require_cominuscule(&self, k: usize) -> Result<()> {
        self.check_node(k)?;
        if self.is_levi() {
            return Err(Error::Precondition("expected a full root system".into()));
        }
        if !self.is_cominuscule(k) {
            return Err(Error::NotCominuscule(format!("({}, {})", self.name, k + 1)));
        }
        Ok(())
    }

    /// First Chern class of the irreducible bundle `E_mu` on `G/P_k`, in
    /// units of the ample generator.
    pub fn c1_irreducible(&self, k: usize, mu: &Weight) -> Result<i64> {
        self.check_node(k)?;
        self.check_weight(mu)?;
        let levi = self.levi_subsystem(k)?;
        if !levi.is_dominant(mu) {
            return Err(Error::NotParabolicDominant(mu.to_string()));
        }
        let rk = levi.weyl_dim(mu)? as i64;
        let lk = Weight::fundamental(self.rank(), k);
        let v = Rational64::from_integer(rk) * self.pairing(mu, &lk) / self.pairing(&lk, &lk);
        if !v.is_integer() {
            return Err(Error::NonIntegral(format!("c1 of {mu} is {v}")));
        }
        Ok(v.to_integer())
    }

    /// Highest weight of the dual of the Levi part of `E_mu`, with the
    /// coefficient at `k` cleared.
    pub fn dual_levi_weight(&self, k: usize, mu: &Weight) -> Result<Weight> {
        self.check_node(k)?;
        self.check_weight(mu)?;
        let levi = self.levi_subsystem(k)?;
        if !levi.is_dominant(mu) {
            return Err(Error::NotParabolicDominant(mu.to_string()));
        }
        let (mut w, _) = levi.dominant_conjugate(&-mu);
        w.as_mut_slice()[k] = 0;
        Ok(w)
    }

    /// Highest weight of the cotangent bundle of the cominuscule `G/P_k`.
    pub fn cotangent_weight(&self, k: usize) -> Result<Weight> {
        self.require_cominuscule(k)?;
        let delta = self.highest_root(k)?;
        let dual = self.dual_levi_weight(k, &delta)?;
        let rk = self.levi_subsystem(k)?.weyl_dim(&delta)? as i64;
        let total = -self.c1_irreducible(k, &delta)? - self.c1_irreducible(k, &dual)?;
        if total % rk != 0 {
            return Err(Error::NonIntegral(format!("cotangent twist {total}/{rk}")));
        }
        let mut w = dual;
        w.as_mut_slice()[k] += (total / rk) as i32;
        Ok(w)
    }

    /// Sections of the irreducible bundle `E_lambda` on `G/P` for the
    /// parabolic of this Levi system (or of `nodes` on a full system).
    pub fn bbw_h0_parabolic(&self, nodes: &[usize], lambda: &Weight) -> Result<Vec<(Weight, i128)>> {
        self.check_weight(lambda)?;
        for &k in nodes {
            self.check_node(k)?;
        }
        let levi_dominant = (0..self.rank()).all(|i| nodes.contains(&i) || lambda[i] >= 0);
        if !levi_dominant {
            return Err(Error::NotParabolicDominant(lambda.to_string()));
        }
        if nodes.iter().all(|&k| lambda[k] >= 0) {
            Ok(vec![(lambda.clone(), 1)])
        } else {
            Ok(Vec::new())
        }
    }

    pub fn bbw_h0(&self, k: usize, lambda: &Weight) -> Result<Vec<(Weight, i128)>> {
        self.bbw_h0_parabolic(&[k], lambda)
    }

    /// Classical count of positive roots of the active subsystem.
    pub fn expected_positive_root_count(&self) -> usize {
        self.levi_type
            .iter()
            .map(|(t, nodes)| {
                let r = nodes.len();
                match t {
                    CartanType::A => r * (r + 1) / 2,
                    CartanType::B | CartanType::C => r * r,
                    CartanType::D => r * (r - 1),
                    CartanType::E => match r {
                        6 => 36,
                        7 => 63,
                        _ => 120,
                    },
                    CartanType::F => 24,
                    CartanType::G => 6,
                }
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> Weight {
        Weight::from_slice(v).unwrap()
    }

    #[test]
    fn positive_root_counts() {
        for (s, n) in [("A3", 6), ("B4", 16), ("C3", 9), ("D5", 20), ("E6", 36), ("E7", 63), ("E8", 120), ("F4", 24), ("G2", 6), ("A2xA4", 13)] {
            let rs = RootSystem::parse(s).unwrap();
            assert_eq!(rs.positive_roots().len(), n, "{s}");
            assert_eq!(rs.expected_positive_root_count(), n);
        }
    }

    #[test]
    fn highest_roots() {
        let c3 = RootSystem::parse("C3").unwrap();
        assert_eq!(c3.highest_root(0).unwrap(), w(&[2, 0, 0]));
        let b4 = RootSystem::parse("B4").unwrap();
        assert_eq!(b4.highest_root(0).unwrap(), w(&[0, 1, 0, 0]));
        let e6 = RootSystem::parse("E6").unwrap();
        assert_eq!(e6.highest_root(0).unwrap(), w(&[0, 1, 0, 0, 0, 0]));
        let a7 = RootSystem::parse("A7").unwrap();
        assert_eq!(a7.highest_root(3).unwrap(), w(&[1, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn dimensions() {
        let e6 = RootSystem::parse("E6").unwrap();
        assert_eq!(e6.weyl_dim(&w(&[1, 0, 0, 0, 0, 0])).unwrap(), 27);
        let d5 = RootSystem::parse("D5").unwrap();
        assert_eq!(d5.weyl_dim(&w(&[0, 0, 0, 0, 1])).unwrap(), 16);
        let e7 = RootSystem::parse("E7").unwrap();
        assert_eq!(e7.weyl_dim(&w(&[0, 0, 0, 0, 0, 0, 1])).unwrap(), 56);
        let g2 = RootSystem::parse("G2").unwrap();
        assert_eq!(g2.weyl_dim(&w(&[1, 0])).unwrap(), 7);
        let f4 = RootSystem::parse("F4").unwrap();
        assert_eq!(f4.weyl_dim(&w(&[0, 0, 0, 1])).unwrap(), 26);
        let e8 = RootSystem::parse("E8").unwrap();
        assert_eq!(e8.weyl_dim(&w(&[0, 0, 0, 0, 0, 0, 0, 1])).unwrap(), 248);
    }

    #[test]
    fn levi_types() {
        let rs = RootSystem::parse("A7/P3").unwrap();
        assert_eq!(rs.semisimple_type(), "A2xA4");
        assert_eq!(rs.name(), "A7/P3");
        assert_eq!(RootSystem::parse("E6/P1").unwrap().semisimple_type(), "D5");
        assert_eq!(RootSystem::parse("E7/P7").unwrap().semisimple_type(), "E6");
        assert_eq!(RootSystem::parse("D5/P5").unwrap().semisimple_type(), "A4");
        assert_eq!(RootSystem::parse("C4/P4").unwrap().semisimple_type(), "A3");
        assert_eq!(RootSystem::parse("B4/P1").unwrap().semisimple_type(), "B3");
        assert_eq!(RootSystem::parse("C4/P1").unwrap().semisimple_type(), "C3");
        assert_eq!(RootSystem::parse("E8/P8").unwrap().semisimple_type(), "E7");
        assert_eq!(RootSystem::parse("D6/P1").unwrap().semisimple_type(), "D5");
    }

    #[test]
    fn chern_classes() {
        let e6 = RootSystem::parse("E6").unwrap();
        assert_eq!(e6.c1_irreducible(0, &e6.highest_root(0).unwrap()).unwrap(), 12);
        let e7 = RootSystem::parse("E7").unwrap();
        assert_eq!(e7.c1_irreducible(6, &e7.highest_root(6).unwrap()).unwrap(), 18);
        let a7 = RootSystem::parse("A7").unwrap();
        assert_eq!(a7.c1_irreducible(2, &Weight::fundamental(7, 2)).unwrap(), 1);
    }

    #[test]
    fn cotangent_grassmannian() {
        let a7 = RootSystem::parse("A7").unwrap();
        assert_eq!(a7.cotangent_weight(2).unwrap(), w(&[0, 1, -2, 1, 0, 0, 0]));
        assert!(a7.levi_subsystem(2).is_ok());
        let f4 = RootSystem::parse("F4").unwrap();
        assert!(matches!(f4.cotangent_weight(0), Err(Error::NotCominuscule(_))));
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "Q3", "A", "E9", "B1", "A2x", "A17", "A7/P9", "A7/Q1"] {
            assert!(RootSystem::parse(bad).is_err(), "{bad}");
        }
    }
}
