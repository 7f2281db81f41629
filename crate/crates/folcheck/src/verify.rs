//! Named verification cases.
//!
//! Cases live in a TOML registry: each names a root system template, default
//! parameters, an operation and the expected outcome. The runner evaluates a
//! case and produces a [`Report`] whose JSON form is deterministic (sorted
//! maps, no timing unless requested).

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charring::{self, DominantSlice, FormalCharacter, Mult};
use crate::decomp::{self, IrrDecomposition};
use crate::error::{Error, Result};
use crate::expr::{self, Params};
use crate::extalg::{self, HwTag, MixedTensor};
use crate::linalg::Q;
use crate::pencil;
use crate::pforms::{self, PolyForm};
use crate::rootdata::RootSystem;
use crate::weight::{fundamental_notation, Weight};

/// The registry shipped with the crate.
pub const BUILTIN_REGISTRY: &str = include_str!("../data/registry.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fast,
    Slow,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Fast => "fast",
            Tier::Slow => "slow",
        }
    }
}

impl FromStr for Tier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(Tier::Fast),
            "slow" => Ok(Tier::Slow),
            other => Err(Error::Parse(format!("unknown tier {other:?}"))),
        }
    }
}

/// How computed summands are compared with the expected list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Same summands with the same multiplicities.
    #[default]
    Equals,
    /// Every expected summand occurs with at least its multiplicity.
    Contains,
    /// Contains, and something is left over.
    Strict,
}

/// An expected summand: a weight template, optionally with a multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermSpec {
    Plain(String),
    Counted { weight: String, mult: i64 },
}

impl TermSpec {
    fn parts(&self) -> (&str, i64) {
        match self {
            TermSpec::Plain(w) => (w, 1),
            TermSpec::Counted { weight, mult } => (weight, *mult),
        }
    }
}

/// A scalar expectation. Strings are templates and may hold rationals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    Text(String),
}

impl Scalar {
    fn render(&self, params: &Params) -> Result<String> {
        match self {
            Scalar::Bool(b) => Ok(b.to_string()),
            Scalar::Int(i) => Ok(i.to_string()),
            Scalar::Text(s) => expr::substitute(s, params),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
    /// Weights that must occur exactly once.
    #[serde(default)]
    pub unique: Vec<String>,
    /// Weights that must occur at least once.
    #[serde(default)]
    pub present: Vec<String>,
    /// Number of distinct summands.
    #[serde(default)]
    pub distinct: Option<usize>,
    /// A single expected weight (cotangent cases).
    #[serde(default)]
    pub weight: Option<String>,
    /// Named values that must match exactly.
    #[serde(default)]
    pub values: BTreeMap<String, Scalar>,
    /// Named values that must match one of the listed alternatives.
    #[serde(default)]
    pub one_of: BTreeMap<String, Vec<Scalar>>,
}

/// A coefficient key `e_six ⊗ (e_a ∧ e_b)` with 1-based indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Key {
    pub six: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// The ratio target `e_six ⊗ v` for a named highest-weight vector `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub six: Vec<usize>,
    pub vector: String,
}

/// What a case computes. Templates are evaluated against the parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Op {
    /// `Γ^outer(Γ^inner(⊕ V_rep))`, decomposed.
    Plethysm {
        rep: Vec<String>,
        inner: Vec<usize>,
        #[serde(default)]
        outer: Option<Vec<usize>>,
    },
    /// `H⁰(Ω^m(twist))` on the cominuscule `G/P_node`.
    FormSections { node: String, m: usize, twist: String },
    /// `H⁰(⋀^m(⊕ E_summand) ⊗ O(twist))` on `G/P_nodes`.
    BundleSections { nodes: Vec<String>, summands: Vec<String>, m: usize, twist: Vec<String> },
    /// Cotangent weight, first Chern class and low twists on `G/P_node`.
    Cotangent { node: String },
    /// `⋀²V_rep` as one trivial summand plus `H⁰(Ω¹(2))` of `G/P_node`.
    ContactSummand { rep: String, node: String },
    /// `ξ ∘ Ψ∨` on a highest-weight vector (wedged with `partner` if given).
    XiPsi {
        vector: String,
        #[serde(default)]
        partner: Option<String>,
        #[serde(default)]
        key: Option<Key>,
        #[serde(default)]
        target: Option<Target>,
    },
    /// Raising operators kill every named highest-weight vector.
    HwCertify,
    /// Support, rank, powers and `m`-image of `w6`.
    W6Facts,
    /// Multiply-back, equivariance and rank-versus-powers on random input.
    ExtalgProperties { samples: usize, actions: usize },
    /// The degenerate contact form on `ℙⁿ` and its `ψ`.
    ContactForm,
    /// Pencil forms `f dg − g df` and Plücker forms from bivectors.
    PencilForms { samples: usize, degree: usize },
    /// `dim H⁰(Ω¹(2))` on `ℙⁿ` and the hook-shape dimension oracle.
    PluckerKernel { max_n: usize },
    /// `d² = 0`, `ι_R² = 0`, Leibniz and Euler on random forms.
    FormProperties { samples: usize },
    /// Explicit pencils with known outcome.
    PencilCanonical { partition: Vec<usize>, values: Vec<i64> },
    /// Divisibility verdict versus prediction over all partitions.
    PencilTrichotomy { max_n: usize },
    /// K-set criterion versus direct solvability on random pencils.
    PencilAgreement { samples: usize, max_size: usize },
    /// Divisibility is unchanged under congruence.
    PencilCongruence { samples: usize },
}

/// One registry entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub id: String,
    pub anchor: String,
    #[serde(default)]
    pub tags: Vec<String>,
    pub tier: Tier,
    #[serde(default)]
    pub system: Option<String>,
    #[serde(default)]
    pub params: Params,
    /// Per-parameter lower bounds (arithmetic over the parameters); below
    /// them the case runs in convention mode and is reported, not asserted.
    #[serde(default)]
    pub assert_from: BTreeMap<String, String>,
    pub op: Op,
    #[serde(default)]
    pub expect: Expect,
}

impl Case {
    pub fn is_asserted(&self, params: &Params) -> Result<bool> {
        for (name, bound) in &self.assert_from {
            let v = *params
                .get(name)
                .ok_or_else(|| Error::Registry(format!("{}: assert_from names unknown parameter {name:?}", self.id)))?;
            if v < expr::eval_int(bound, params)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `pattern` names this case: id substring, tag or tier.
    pub fn matches(&self, pattern: &str) -> bool {
        let p = pattern.trim().to_ascii_lowercase();
        p.is_empty() || self.id.contains(&p) || self.tags.iter().any(|t| *t == p) || self.tier.name() == p
    }

    fn root_system(&self, params: &Params) -> Result<Arc<RootSystem>> {
        let tpl = self
            .system
            .as_deref()
            .ok_or_else(|| Error::Registry(format!("{}: operation needs a root system", self.id)))?;
        Ok(Arc::new(RootSystem::parse(&expr::substitute(tpl, params)?)?))
    }

    /// Resolves every template at the default parameters.
    fn validate(&self) -> Result<()> {
        if self.id.is_empty() || !self.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(Error::Registry(format!("bad case id {:?}", self.id)));
        }
        let p = &self.params;
        self.is_asserted(p)?;
        let rank = match &self.system {
            Some(_) => Some(self.root_system(p)?.rank()),
            None => None,
        };
        let weights: Vec<&str> = self
            .expect
            .terms
            .iter()
            .map(|t| t.parts().0)
            .chain(self.expect.unique.iter().map(String::as_str))
            .chain(self.expect.present.iter().map(String::as_str))
            .chain(self.expect.weight.as_deref())
            .collect();
        for w in weights {
            let r = rank.ok_or_else(|| Error::Registry(format!("{}: weights need a root system", self.id)))?;
            expr::weight_from_template(w, p, r)?;
        }
        for s in self.expect.values.values().chain(self.expect.one_of.values().flatten()) {
            s.render(p)?;
        }
        match &self.op {
            Op::XiPsi { vector, partner, target, .. } => {
                HwTag::from_str(vector)?;
                if let Some(t) = partner {
                    HwTag::from_str(t)?;
                }
                if let Some(t) = target {
                    HwTag::from_str(&t.vector)?;
                }
            }
            Op::BundleSections { nodes, twist, .. } if nodes.len() != twist.len() => {
                return Err(Error::Registry(format!("{}: one twist per node", self.id)));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(default)]
    case: Vec<Case>,
}

/// An ordered collection of cases with unique ids.
#[derive(Clone, Debug, PartialEq)]
pub struct Registry {
    cases: Vec<Case>,
}

impl Registry {
    pub fn builtin() -> Result<Self> {
        Self::parse(BUILTIN_REGISTRY)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Registry(format!("{}: {e}", path.display())))?;
        Self::parse(&src)
    }

    pub fn parse(src: &str) -> Result<Self> {
        let file: RegistryFile = toml::from_str(src).map_err(|e| Error::Registry(e.to_string()))?;
        let mut seen = std::collections::BTreeSet::new();
        for c in &file.case {
            if !seen.insert(c.id.clone()) {
                return Err(Error::Registry(format!("duplicate case id {:?}", c.id)));
            }
            c.validate()?;
        }
        Ok(Registry { cases: file.case })
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn get(&self, id: &str) -> Result<&Case> {
        self.cases.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownCase(id.to_string()))
    }

    pub fn filter(&self, pattern: &str) -> Vec<&Case> {
        self.cases.iter().filter(|c| c.matches(pattern)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Seed for randomized cases; recorded in their reports.
    pub seed: u64,
    /// Include wall time in reports (breaks byte-for-byte reproducibility).
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 20240917, timing: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Convention-mode run: computed and shown, not asserted.
    Reported,
    Error,
}

impl Status {
    /// Whether this status makes a run fail.
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::Error)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermOut {
    pub weight: Weight,
    pub notation: String,
    pub mult: Mult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompOut {
    pub rs: String,
    pub dim: String,
    pub distinct: usize,
    pub count: Mult,
    pub terms: Vec<TermOut>,
}

fn term_list(terms: &BTreeMap<Weight, Mult>) -> Vec<TermOut> {
    terms
        .iter()
        .rev()
        .map(|(w, &m)| TermOut { weight: w.clone(), notation: fundamental_notation(w), mult: m })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub id: String,
    pub anchor: String,
    pub tier: Tier,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    pub params: Params,
    pub asserted: bool,
    pub status: Status,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<DecompOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<TermOut>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn value(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    /// One line per check, for terminals.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} [{}] {}", self.id, self.tier.name(), status_word(self.status));
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(" ({})", p.join(", ")));
        }
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!(" {ms} ms"));
        }
        out.push('\n');
        if let Some(e) = &self.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("  [{}] {}: {}\n", if c.pass { "ok" } else { "FAIL" }, c.name, c.detail));
        }
        out
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Reported => "REPORTED",
        Status::Error => "ERROR",
    }
}

#[derive(Default)]
struct Ctx {
    checks: Vec<Check>,
    values: BTreeMap<String, String>,
    data: BTreeMap<String, serde_json::Value>,
    computed: Option<DecompOut>,
    expected: Option<Vec<TermOut>>,
    seeded: bool,
}

impl Ctx {
    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    fn value(&mut self, name: impl Into<String>, v: impl ToString) {
        self.values.insert(name.into(), v.to_string());
    }

    fn data(&mut self, name: &str, v: impl Serialize) {
        self.data.insert(name.to_string(), serde_json::to_value(v).expect("report data serializes"));
    }

    fn rng(&mut self, seed: u64) -> ChaCha8Rng {
        self.seeded = true;
        ChaCha8Rng::seed_from_u64(seed)
    }
}

/// Runs one case with parameter overrides. Unknown override names are an
/// error; mathematical failures are reported in the [`Report`].
pub fn run_case(case: &Case, overrides: &Params, opts: &RunOptions) -> Result<Report> {
    let mut params = case.params.clone();
    for (k, &v) in overrides {
        match params.get_mut(k) {
            Some(slot) => *slot = v,
            None => return Err(Error::Precondition(format!("case {} has no parameter {k:?}", case.id))),
        }
    }
    let asserted = case.is_asserted(&params)?;
    let start = Instant::now();
    let mut ctx = Ctx::default();
    let outcome = evaluate(case, &params, opts, &mut ctx).and_then(|()| compare_values(case, &params, &mut ctx));
    let error = outcome.err().map(|e| e.to_string());
    let status = if error.is_some() {
        Status::Error
    } else if !asserted {
        Status::Reported
    } else if ctx.checks.iter().all(|c| c.pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    let system = match &case.system {
        Some(t) => Some(expr::substitute(t, &params)?),
        None => None,
    };
    Ok(Report {
        id: case.id.clone(),
        anchor: case.anchor.clone(),
        tier: case.tier,
        system,
        params,
        asserted,
        status,
        checks: ctx.checks,
        values: ctx.values,
        computed: ctx.computed,
        expected: ctx.expected,
        data: ctx.data,
        seed: ctx.seeded.then_some(opts.seed),
        error,
        elapsed_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
    })
}

/// Runs cases in parallel; reports come back in input order.
pub fn run_cases(cases: &[&Case], overrides: &Params, opts: &RunOptions) -> Result<Vec<Report>> {
    cases.par_iter().map(|c| run_case(c, overrides, opts)).collect()
}

/// Deterministic JSON document for a list of reports.
pub fn reports_to_json(reports: &[Report]) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        passed: usize,
        failed: usize,
        reported: usize,
        reports: &'a [Report],
    }
    let doc = Doc {
        passed: reports.iter().filter(|r| r.status == Status::Pass).count(),
        failed: reports.iter().filter(|r| r.status.is_failure()).count(),
        reported: reports.iter().filter(|r| r.status == Status::Reported).count(),
        reports,
    };
    serde_json::to_string_pretty(&doc).expect("reports serialize")
}

fn node_index(tpl: &str, params: &Params, rank: usize) -> Result<usize> {
    let k = expr::eval_int(tpl, params)?;
    if k < 1 || k as usize > rank {
        return Err(Error::NodeOutOfRange { node: k.max(0) as usize, rank });
    }
    Ok(k as usize - 1)
}

fn required_weight(tpl: &str, params: &Params, rank: usize) -> Result<Weight> {
    expr::weight_from_template(tpl, params, rank)?
        .ok_or_else(|| Error::Precondition(format!("weight {tpl:?} vanishes at rank {rank}")))
}

fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// `dim Γ^mu(ℂ^d)` by the hook content formula.
pub fn schur_dim(d: &BigInt, mu: &[usize]) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (i, &row) in mu.iter().enumerate() {
        for j in 0..row {
            let content = j as i64 - i as i64;
            num *= d + BigInt::from(content);
            let arm = row - j - 1;
            let leg = mu[i + 1..].iter().filter(|&&r| r > j).count();
            den *= BigInt::from(arm + leg + 1);
        }
    }
    num / den
}

fn plethysm_dominant(ch: &FormalCharacter, mu: &[usize]) -> Result<DominantSlice> {
    if mu.iter().all(|&p| p == 1) {
        ch.exterior_power_dominant(mu.len())
    } else if mu.len() == 1 {
        ch.symmetric_power_dominant(mu[0])
    } else {
        ch.schur_plethysm_dominant(mu)
    }
}

fn plethysm_full(ch: &FormalCharacter, mu: &[usize]) -> Result<FormalCharacter> {
    if mu.iter().all(|&p| p == 1) {
        ch.exterior_power(mu.len())
    } else if mu.len() == 1 {
        ch.symmetric_power(mu[0])
    } else {
        ch.schur_plethysm(mu)
    }
}

fn evaluate(case: &Case, params: &Params, opts: &RunOptions, ctx: &mut Ctx) -> Result<()> {
    match &case.op {
        Op::Plethysm { rep, inner, outer } => {
            let rs = case.root_system(params)?;
            let mut ch = FormalCharacter::zero(rs.clone());
            let mut d0 = BigInt::zero();
            for r in rep {
                let w = required_weight(r, params, rs.rank())?;
                ch = ch.add(&FormalCharacter::irreducible(rs.clone(), &w)?)?;
                d0 += BigInt::from(rs.weyl_dim(&w)?);
            }
            let (slice, dim) = match outer {
                None => (plethysm_dominant(&ch, inner)?, schur_dim(&d0, inner)),
                Some(o) => {
                    let mid = plethysm_full(&ch, inner)?;
                    (plethysm_dominant(&mid, o)?, schur_dim(&schur_dim(&d0, inner), o))
                }
            };
            let dec = decomp::decompose(&slice)?;
            record_decomposition(ctx, &dec, Some(&slice), Some(dim))?;
            compare_terms(case, params, &dec, ctx)
        }
        Op::FormSections { node, m, twist } => {
            let rs = case.root_system(params)?;
            let k = node_index(node, params, rs.rank())?;
            let t = i32::try_from(expr::eval_int(twist, params)?).map_err(|_| Error::Overflow("twist"))?;
            let dec = charring::twisted_form_sections(&rs, k, *m, t)?;
            ctx.data("cotangent_weight", fundamental_notation(&rs.cotangent_weight(k)?));
            record_decomposition(ctx, &dec, None, None)?;
            compare_terms(case, params, &dec, ctx)
        }
        Op::BundleSections { nodes, summands, m, twist } => {
            let rs = case.root_system(params)?;
            let ks = nodes.iter().map(|n| node_index(n, params, rs.rank())).collect::<Result<Vec<_>>>()?;
            let ws = summands.iter().map(|s| required_weight(s, params, rs.rank())).collect::<Result<Vec<_>>>()?;
            let ts = twist
                .iter()
                .map(|t| i32::try_from(expr::eval_int(t, params)?).map_err(|_| Error::Overflow("twist")))
                .collect::<Result<Vec<_>>>()?;
            let res = charring::parabolic_bundle_sections(&rs, &ks, &ws, *m, &ts)?;
            ctx.data("levi_summands", res.levi.pretty());
            record_decomposition(ctx, &res.sections, None, None)?;
            compare_terms(case, params, &res.sections, ctx)
        }
        Op::Cotangent { node } => cotangent(case, params, node, ctx),
        Op::ContactSummand { rep, node } => contact_summand(case, params, rep, node, ctx),
        Op::XiPsi { vector, partner, key, target } => {
            xi_psi_case(params, vector, partner.as_deref(), key.as_ref(), target.as_ref(), ctx)
        }
        Op::HwCertify => {
            for tag in HwTag::ALL {
                let n = tag.min_n();
                let v = extalg::build_hw_vector(tag, n)?;
                let weight = tag.gl_weight(n);
                let ok = extalg::is_highest_weight(&v, &weight)?;
                ctx.check(format!("{tag} is a highest-weight vector"), ok, format!("n = {n}, weight {weight:?}, {} terms", v.len()));
            }
            Ok(())
        }
        Op::W6Facts => {
            let w6 = extalg::build_hw_vector(HwTag::W6, 6)?;
            ctx.value("support", w6.len());
            let mut abs: Vec<String> = w6.terms().values().map(|c| c.abs().to_string()).collect();
            abs.sort();
            abs.dedup();
            ctx.value("coefficient_abs", abs.join(","));
            let rank = w6.skew_rank()?;
            ctx.value("skew_rank", rank);
            ctx.value("power_10_zero", w6.power(10)?.is_zero());
            ctx.value("power_11_zero", w6.power(11)?.is_zero());
            let m = extalg::multiply_m(&w6)?;
            ctx.value("m_coefficient", m.coefficient_of(&[&[1usize] as &[usize], &[2], &[3], &[4], &[5], &[6]])?);
            ctx.value("m_terms", m.len());
            Ok(())
        }
        Op::ExtalgProperties { samples, actions } => extalg_properties(params, opts, *samples, *actions, ctx),
        Op::ContactForm => contact_form_case(params, ctx),
        Op::PencilForms { samples, degree } => pencil_forms(params, opts, *samples, *degree, ctx),
        Op::PluckerKernel { max_n } => {
            for n in 1..=*max_n {
                ctx.value(format!("dim_{n}"), pforms::radial_kernel_dim(n, 1, 1)?);
            }
            let mut mismatches = Vec::new();
            for n in 1..=3usize {
                let rs = RootSystem::parse(&format!("A{n}"))?;
                for p in 1..=n {
                    for d in 1..=2usize {
                        let mut w = Weight::zero(n);
                        w.as_mut_slice()[0] += d as i32 - 1;
                        if p < n {
                            w.as_mut_slice()[p] += 1;
                        }
                        let oracle = rs.weyl_dim(&w)? as usize;
                        let got = pforms::radial_kernel_dim(n, p, d)?;
                        if oracle != got {
                            mismatches.push(format!("n={n} p={p} d={d}: {got} vs {oracle}"));
                        }
                    }
                }
            }
            ctx.check("kernel dimension matches the hook-shape module", mismatches.is_empty(), mismatches.join("; "));
            Ok(())
        }
        Op::FormProperties { samples } => form_properties(params, opts, *samples, ctx),
        Op::PencilCanonical { partition, values } => pencil_canonical(partition, values, ctx),
        Op::PencilTrichotomy { max_n } => {
            let mut rng = ctx.rng(opts.seed);
            let (mut total, mut mismatches, mut disagreements) = (0usize, Vec::new(), Vec::new());
            for n in 1..=*max_n {
                for p in pencil::partitions(n) {
                    for vals in pencil::value_patterns(&mut rng, p.len()) {
                        let r = pencil::verify_pencil(&p, &vals)?;
                        total += 1;
                        let label = format!("{:?} {:?}", p, r.values);
                        if !r.verdict_matches {
                            mismatches.push(label.clone());
                        }
                        if !r.tests_agree {
                            disagreements.push(label);
                        }
                    }
                }
            }
            ctx.value("pencils", total);
            ctx.value("verdict_mismatches", mismatches.len());
            ctx.value("test_disagreements", disagreements.len());
            ctx.data("mismatches", &mismatches);
            Ok(())
        }
        Op::PencilAgreement { samples, max_size } => {
            let mut rng = ctx.rng(opts.seed);
            let (mut divisible, mut disagreements) = (0usize, 0usize);
            for _ in 0..*samples {
                let n = rng.gen_range(1..=(*max_size / 2).max(1));
                let parts = pencil::partitions(n);
                let p = &parts[rng.gen_range(0..parts.len())];
                let vals: Vec<Q> = (0..p.len()).map(|_| q_int(rng.gen_range(-2..=2))).collect();
                let base = pencil::SkewPencil::canonical(p, &vals)?;
                let pen = base.congruent(&pencil::random_invertible(&mut rng, 2 * n))?;
                let (w, v) = (pen.w(), pen.v());
                let by_kset = pencil::divides_wedge_square(&w, &v)?.0;
                let by_solving = pencil::solve_wedge_square(&w, &v)?.is_some();
                divisible += by_kset as usize;
                disagreements += (by_kset != by_solving) as usize;
            }
            ctx.value("disagreements", disagreements);
            ctx.data("divisible", divisible);
            ctx.data("samples", samples);
            Ok(())
        }
        Op::PencilCongruence { samples } => {
            let mut rng = ctx.rng(opts.seed);
            let mut changed = 0usize;
            for _ in 0..*samples {
                let n = rng.gen_range(2..=4);
                let parts = pencil::partitions(n);
                let p = &parts[rng.gen_range(0..parts.len())];
                let vals: Vec<Q> = (0..p.len()).map(|_| q_int(rng.gen_range(-2..=2))).collect();
                let base = pencil::SkewPencil::canonical(p, &vals)?;
                let moved = base.congruent(&pencil::random_invertible(&mut rng, 2 * n))?;
                let a = pencil::divides_wedge_square(&base.w(), &base.v())?.0;
                let b = pencil::divides_wedge_square(&moved.w(), &moved.v())?.0;
                changed += (a != b) as usize;
            }
            ctx.value("verdict_changes", changed);
            Ok(())
        }
    }
}

fn record_decomposition(
    ctx: &mut Ctx,
    dec: &IrrDecomposition,
    slice: Option<&DominantSlice>,
    expected_dim: Option<BigInt>,
) -> Result<()> {
    let dim = dec.dim()?;
    let recombined = dec.recombine()?;
    if let Some(s) = slice {
        ctx.check(
            "dimension bookkeeping",
            dim == BigInt::from(s.dim),
            format!("sum of mult * dim = {dim}, character mass = {}", s.dim),
        );
        ctx.check(
            "recombination reproduces the character",
            recombined.entries == s.entries && recombined.dim == s.dim,
            format!("{} dominant weights", s.entries.len()),
        );
    }
    if let Some(d) = expected_dim {
        ctx.check("dimension formula", dim == d, format!("{dim} vs {d}"));
    }
    let again = decomp::decompose(&recombined)?;
    ctx.check("decompose after recombine is the identity", again == *dec, format!("{} summands", dec.distinct()));
    ctx.computed = Some(DecompOut {
        rs: dec.root_system().name().to_string(),
        dim: dim.to_string(),
        distinct: dec.distinct(),
        count: dec.count(),
        terms: term_list(dec.terms()),
    });
    Ok(())
}

fn compare_terms(case: &Case, params: &Params, dec: &IrrDecomposition, ctx: &mut Ctx) -> Result<()> {
    let e = &case.expect;
    let rs = dec.root_system().clone();
    let rank = rs.rank();
    if e.mode.is_some() || !e.terms.is_empty() {
        let mut terms = Vec::new();
        for t in &e.terms {
            let (tpl, m) = t.parts();
            if let Some(w) = expr::weight_from_template(tpl, params, rank)? {
                terms.push((w, m as Mult));
            }
        }
        let expected = IrrDecomposition::new(rs.clone(), terms)?;
        let mode = e.mode.unwrap_or_default();
        let pass = match mode {
            Mode::Equals => *dec == expected,
            Mode::Contains => dec.contains(&expected),
            Mode::Strict => dec.strictly_contains(&expected),
        };
        let missing = expected.difference(dec);
        let extra = dec.difference(&expected);
        let show = |v: &[(Weight, Mult)]| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.iter().map(|(w, m)| format!("{m} x {}", fundamental_notation(w))).collect::<Vec<_>>().join(", ")
            }
        };
        let name = match mode {
            Mode::Equals => "summands equal the expected list",
            Mode::Contains => "summands contain the expected list",
            Mode::Strict => "summands strictly contain the expected list",
        };
        ctx.check(name, pass, format!("missing: {}; extra: {}", show(&missing), show(&extra)));
        ctx.expected = Some(term_list(expected.terms()));
    }
    for tpl in &e.unique {
        if let Some(w) = expr::weight_from_template(tpl, params, rank)? {
            let m = dec.mult(&w);
            ctx.check(format!("{} occurs once", fundamental_notation(&w)), m == 1, format!("multiplicity {m}"));
        }
    }
    for tpl in &e.present {
        if let Some(w) = expr::weight_from_template(tpl, params, rank)? {
            let m = dec.mult(&w);
            ctx.check(format!("{} occurs", fundamental_notation(&w)), m >= 1, format!("multiplicity {m}"));
        }
    }
    if let Some(n) = e.distinct {
        ctx.check("number of distinct summands", dec.distinct() == n, format!("{} vs {n}", dec.distinct()));
    }
    Ok(())
}

fn same_scalar(a: &str, b: &str) -> bool {
    match (extalg::parse_coeff(a), extalg::parse_coeff(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn compare_values(case: &Case, params: &Params, ctx: &mut Ctx) -> Result<()> {
    for (name, want) in &case.expect.values {
        let want = want.render(params)?;
        let got = ctx.values.get(name).cloned();
        let pass = got.as_deref().is_some_and(|g| same_scalar(g, &want));
        ctx.check(format!("{name} = {want}"), pass, format!("computed {}", got.as_deref().unwrap_or("nothing")));
    }
    for (name, options) in &case.expect.one_of {
        let options = options.iter().map(|s| s.render(params)).collect::<Result<Vec<_>>>()?;
        let got = ctx.values.get(name).cloned();
        let pass = got.as_deref().is_some_and(|g| options.iter().any(|o| same_scalar(g, o)));
        ctx.check(
            format!("{name} in {{{}}}", options.join(", ")),
            pass,
            format!("computed {}", got.as_deref().unwrap_or("nothing")),
        );
    }
    Ok(())
}

fn cotangent(case: &Case, params: &Params, node: &str, ctx: &mut Ctx) -> Result<()> {
    let rs = case.root_system(params)?;
    let k = node_index(node, params, rs.rank())?;
    let w = rs.cotangent_weight(k)?;
    let c1 = rs.c1_irreducible(k, &w)?;
    ctx.value("c1", c1);
    ctx.value("twist", w[k]);
    ctx.data("cotangent_weight", fundamental_notation(&w));
    if let Some(tpl) = &case.expect.weight {
        let want = required_weight(tpl, params, rs.rank())?;
        ctx.check(
            "cotangent weight",
            w == want,
            format!("{} vs {}", fundamental_notation(&w), fundamental_notation(&want)),
        );
    }
    let lk = Weight::fundamental(rs.rank(), k);
    let once = &w + &lk;
    let h1 = rs.bbw_h0(k, &once)?;
    ctx.check("no sections of the cotangent bundle twisted once", h1.is_empty(), format!("{} summands", h1.len()));
    let twice = &once + &lk;
    let h2 = rs.bbw_h0(k, &twice)?;
    let delta_star = rs.dual_levi_weight(k, &rs.highest_root(k)?)?;
    ctx.check(
        "twisting twice gives the dual Levi weight of the highest root",
        h2 == vec![(delta_star.clone(), 1)],
        format!("{} vs {}", fundamental_notation(&twice), fundamental_notation(&delta_star)),
    );
    Ok(())
}

fn contact_summand(case: &Case, params: &Params, rep: &str, node: &str, ctx: &mut Ctx) -> Result<()> {
    let rs = case.root_system(params)?;
    let lambda = required_weight(rep, params, rs.rank())?;
    let k = node_index(node, params, rs.rank())?;
    let ch = FormalCharacter::irreducible(rs.clone(), &lambda)?;
    let slice = ch.exterior_power_dominant(2)?;
    let dec = decomp::decompose(&slice)?;
    let d = BigInt::from(rs.weyl_dim(&lambda)?);
    record_decomposition(ctx, &dec, Some(&slice), Some(schur_dim(&d, &[1, 1])))?;
    let zero = Weight::zero(rs.rank());
    let trivial = dec.mult(&zero);
    ctx.value("trivial_multiplicity", trivial);
    ctx.value("other_summands", dec.count() - trivial);
    let rest = IrrDecomposition::new(rs.clone(), dec.terms().iter().filter(|(w, _)| **w != zero).map(|(w, &m)| (w.clone(), m)))?;
    let forms = charring::twisted_form_sections(&rs, k, 1, 2)?;
    ctx.check(
        "remaining summand is the space of twisted one-forms",
        rest == forms,
        format!("{} vs {}", rest.pretty(), forms.pretty()),
    );
    Ok(())
}

fn xi_psi_case(
    params: &Params,
    vector: &str,
    partner: Option<&str>,
    key: Option<&Key>,
    target: Option<&Target>,
    ctx: &mut Ctx,
) -> Result<()> {
    let tag = HwTag::from_str(vector)?;
    let partner = partner.map(HwTag::from_str).transpose()?;
    let min_n = partner.map_or(tag.min_n(), |p| p.min_n().max(tag.min_n()));
    let n = params.get("n").map_or(min_n, |&v| v.max(0) as usize);
    let mut rep = extalg::build_hw_tensor(tag, n)?;
    if let Some(p) = partner {
        rep = rep.tensor(&extalg::build_hw_tensor(p, n)?)?;
    }
    if rep.k() != 4 {
        return Err(Error::Precondition(format!("ξ ∘ Ψ∨ needs degree 4, got {}", rep.k())));
    }
    let x = rep.alternate();
    ctx.value("support", x.len());
    ctx.data("raw_terms", rep.len());
    let total = extalg::xi_psi(&x)?;
    let parts: Vec<MixedTensor> = rep.psi_parts()?.iter().map(extalg::xi).collect();
    let combined = parts[0].add(&parts[1].scale(&q_int(-1))).add(&parts[2]);
    ctx.check("parts combine as P1 - P2 + P3", combined == total, format!("{} terms", total.len()));
    if let Some(k) = key {
        let c = total.extract_coefficient(&k.six, &k.a, &k.b)?;
        ctx.value("coefficient", &c);
        ctx.value("coefficient_abs", c.abs());
        for (i, p) in parts.iter().enumerate() {
            ctx.value(format!("part_{}", i + 1), p.extract_coefficient(&k.six, &k.a, &k.b)?);
        }
    }
    if let Some(t) = target {
        let v = extalg::build_hw_vector(HwTag::from_str(&t.vector)?, n)?;
        let goal = MixedTensor::from_product(&t.six, &v)?;
        let show = |r: Option<Q>| r.map_or_else(|| "not proportional".to_string(), |r| r.to_string());
        ctx.value("ratio", show(total.ratio_to(&goal)));
        for (i, p) in parts.iter().enumerate() {
            ctx.value(format!("part_{}", i + 1), show(p.ratio_to(&goal)));
        }
    }
    Ok(())
}

fn extalg_properties(params: &Params, opts: &RunOptions, samples: usize, actions: usize, ctx: &mut Ctx) -> Result<()> {
    let n = params.get("n").copied().unwrap_or(6).max(3) as usize;
    let mut rng = ctx.rng(opts.seed);
    let three = q_int(3);
    let mut back_fail = 0usize;
    for _ in 0..samples {
        let x = extalg::random_multivector(&mut rng, n, 3, 4, 3)?;
        if extalg::psi_dual(&x)?.multiply_back() != x.scale(&three) {
            back_fail += 1;
        }
    }
    ctx.value("multiply_back_failures", back_fail);
    let mut equi_fail = 0usize;
    for _ in 0..actions {
        let r = rng.gen_range(1..=n);
        let s = loop {
            let s = rng.gen_range(1..=n);
            if s != r {
                break s;
            }
        };
        let x = extalg::random_multivector(&mut rng, n, 3, 4, 3)?;
        let sx = extalg::psi_dual(&x)?;
        let psi_ok = extalg::psi_dual(&x.sl_action(r, s)?)? == sx.sl_action(r, s)?;
        let xi_ok = extalg::xi(&sx.sl_action(r, s)?) == extalg::xi(&sx).sl_action(r, s)?;
        let y = extalg::random_multivector(&mut rng, n, 3, 2, 4)?;
        let m_ok = extalg::multiply_m(&y.sl_action(r, s)?)? == extalg::multiply_m(&y)?.sl_action(r, s)?;
        equi_fail += !(psi_ok && xi_ok && m_ok) as usize;
    }
    ctx.value("equivariance_failures", equi_fail);
    let mut rank_fail = 0usize;
    for _ in 0..samples.min(20) {
        let y = extalg::random_multivector(&mut rng, n, 3, 2, 4)?;
        let r = y.skew_rank()?;
        let top = y.power(r / 2)?;
        let next = y.power(r / 2 + 1)?;
        rank_fail += (r % 2 != 0 || (r > 0 && top.is_zero()) || !next.is_zero()) as usize;
    }
    ctx.value("skew_rank_failures", rank_fail);
    Ok(())
}

fn contact_form_case(params: &Params, ctx: &mut Ctx) -> Result<()> {
    let n = params.get("n").copied().unwrap_or(3).max(0) as usize;
    let l = params.get("l").copied().unwrap_or(2).max(0) as u32;
    let omega = pforms::contact_form(n, l)?;
    ctx.value("radially_closed", omega.is_radially_closed()?);
    let psi = omega.psi_wedge_d()?;
    ctx.value("psi_zero", psi.is_zero());
    let display = pforms::contact_psi_display(n, l)?;
    ctx.value("ratio_to_display", psi.ratio_to(&display).map_or_else(|| "not proportional".to_string(), |r| r.to_string()));
    ctx.value("integrable", omega.is_integrable()?);
    ctx.value("euler_identity", omega.euler_identity_check()?);
    let c = q_int(3);
    let quadratic = omega.scale(&c).psi_wedge_d()? == psi.scale(&(&c * &c));
    ctx.value("psi_quadratic", quadratic);
    ctx.value("polarization", omega.psi_bilinear(&omega)? == psi);
    ctx.data("psi", psi.to_string());
    Ok(())
}

fn pencil_forms(params: &Params, opts: &RunOptions, samples: usize, degree: usize, ctx: &mut Ctx) -> Result<()> {
    let n = params.get("n").copied().unwrap_or(3).max(1) as usize;
    let mut rng = ctx.rng(opts.seed);
    let (mut pencil_fail, mut plucker_fail) = (0usize, 0usize);
    for _ in 0..samples {
        let f = pforms::random_form(&mut rng, n, 0, degree, 3);
        let g = pforms::random_form(&mut rng, n, 0, degree, 3);
        let omega = f.wedge(&g.exterior_derivative())?.sub(&g.wedge(&f.exterior_derivative())?)?;
        let ok = omega.is_radially_closed()? && omega.is_integrable()? && omega.psi_wedge_d()?.is_zero();
        pencil_fail += !ok as usize;
        let u = pforms::random_form(&mut rng, n, 1, 0, n + 1);
        let v = pforms::random_form(&mut rng, n, 1, 0, n + 1);
        let eta = pforms::form_from_multivector(&u.wedge(&v)?)?;
        let ok = eta.is_integrable()? && eta.psi_wedge_d()?.is_zero();
        plucker_fail += !ok as usize;
    }
    ctx.value("pencil_form_failures", pencil_fail);
    ctx.value("decomposable_failures", plucker_fail);
    if n >= 3 {
        let rank4 = pforms::constant_form(n, &[0, 1])?.add(&pforms::constant_form(n, &[2, 3])?)?;
        let eta = pforms::form_from_multivector(&rank4)?;
        ctx.value("rank_four_integrable", eta.is_integrable()?);
        let pl = pforms::form_from_multivector(&pforms::constant_form(n, &[0, 1])?)?;
        let expect = PolyForm::variable(n, 0)?
            .wedge(&PolyForm::variable(n, 1)?.exterior_derivative())?
            .sub(&PolyForm::variable(n, 1)?.wedge(&PolyForm::variable(n, 0)?.exterior_derivative())?)?;
        ctx.value("plucker_e01", pl == expect);
    }
    Ok(())
}

fn form_properties(params: &Params, opts: &RunOptions, samples: usize, ctx: &mut Ctx) -> Result<()> {
    let n = params.get("n").copied().unwrap_or(3).max(1) as usize;
    let mut rng = ctx.rng(opts.seed);
    let (mut dd, mut rr, mut leibniz, mut euler) = (0usize, 0usize, 0usize, 0usize);
    for _ in 0..samples {
        let p = rng.gen_range(0..=2usize.min(n));
        let d = rng.gen_range(1..=3);
        let w = pforms::random_form(&mut rng, n, p, d, 4);
        dd += !w.exterior_derivative().exterior_derivative().is_zero() as usize;
        let hi = pforms::random_form(&mut rng, n, 2.min(n + 1), d, 4);
        rr += !hi.contract_radial()?.contract_radial()?.is_zero() as usize;
        let q2 = rng.gen_range(0..=1usize);
        let d2 = rng.gen_range(1..=2);
        let eta = pforms::random_form(&mut rng, n, q2, d2, 3);
        let lhs = w.wedge(&eta)?.exterior_derivative();
        let sign = if p % 2 == 0 { q_int(1) } else { q_int(-1) };
        let rhs = w.exterior_derivative().wedge(&eta)?.add(&w.wedge(&eta.exterior_derivative())?.scale(&sign))?;
        leibniz += (lhs != rhs && !(lhs.is_zero() && rhs.is_zero())) as usize;
        let src = pforms::random_form(&mut rng, n, (p + 1).min(n + 1), d, 4);
        let section = src.contract_radial()?;
        if section.p() >= 1 {
            euler += !section.euler_identity_check()? as usize;
        }
    }
    ctx.value("d_squared_failures", dd);
    ctx.value("radial_squared_failures", rr);
    ctx.value("leibniz_failures", leibniz);
    ctx.value("euler_failures", euler);
    Ok(())
}

fn pencil_canonical(partition: &[usize], values: &[i64], ctx: &mut Ctx) -> Result<()> {
    let vals: Vec<Q> = values.iter().map(|&v| q_int(v)).collect();
    let r = pencil::verify_pencil(partition, &vals)?;
    ctx.value("divisible", r.divisible);
    ctx.value("tests_agree", r.tests_agree);
    ctx.value("predicted_divisible", r.predicted_divisible);
    ctx.value("verdict_matches", r.verdict_matches);
    if let Some(dec) = &r.decomposition {
        ctx.value("a", &dec.a);
        ctx.value("y", extalg::MultiVector::from_json(2 * r.n, 1, &dec.y)?);
    }
    if let Some(w) = &r.witness {
        ctx.value("witness_pairing", &w.pairing);
    }
    if let Some(pw) = &r.proof_witness {
        ctx.value("classical_witness_in_kernel", pw.in_kernel);
        ctx.value("classical_witness_pairing", &pw.pairing);
    }
    ctx.data("report", &r);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_parses() {
        let reg = Registry::builtin().unwrap();
        assert!(reg.cases().len() > 30);
        assert!(matches!(reg.get("no-such-case"), Err(Error::UnknownCase(_))));
    }

    #[test]
    fn schur_dims() {
        let d = BigInt::from(286);
        assert_eq!(schur_dim(&d, &[1, 1, 1, 1]), BigInt::from(286u64 * 285 * 284 * 283 / 24));
        assert_eq!(schur_dim(&BigInt::from(4), &[2, 2]), BigInt::from(20));
        assert_eq!(schur_dim(&BigInt::from(3), &[2, 1]), BigInt::from(8));
        assert_eq!(schur_dim(&BigInt::from(5), &[3]), BigInt::from(35));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let src = r#"
[[case]]
id = "a"
anchor = "x"
tier = "fast"
op = { kind = "hw_certify" }

[[case]]
id = "a"
anchor = "y"
tier = "fast"
op = { kind = "hw_certify" }
"#;
        assert!(matches!(Registry::parse(src), Err(Error::Registry(_))));
    }

    #[test]
    fn convention_mode_is_reported() {
        let src = r#"
[[case]]
id = "wedge"
anchor = "x"
tier = "fast"
system = "A{n-1}"
params = { n = 6 }
assert_from = { n = "6" }
op = { kind = "plethysm", rep = ["L2"], inner = [1, 1] }
expect = { terms = ["L1+L3"] }
"#;
        let reg = Registry::parse(src).unwrap();
        let case = reg.get("wedge").unwrap();
        let opts = RunOptions::default();
        let r = run_case(case, &Params::new(), &opts).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.to_text());
        let small: Params = [("n".to_string(), 4)].into_iter().collect();
        let r = run_case(case, &small, &opts).unwrap();
        assert_eq!(r.status, Status::Reported);
        let bad: Params = [("m".to_string(), 4)].into_iter().collect();
        assert!(run_case(case, &bad, &opts).is_err());
    }
}
