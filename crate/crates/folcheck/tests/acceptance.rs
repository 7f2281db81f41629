//! Acceptance run: one line per criterion, with indented sub-lines.
//!
//! Every comparison is exact. Runtime limits are per case unless stated.
//! The process exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use folcheck::expr::Params;
use folcheck::verify::{Registry, Report, RunOptions};
use num_bigint::BigInt;

struct Line {
    name: String,
    pass: bool,
    detail: String,
}

struct Criterion {
    title: &'static str,
    lines: Vec<Line>,
}

impl Criterion {
    fn new(title: &'static str) -> Self {
        Criterion { title, lines: Vec::new() }
    }

    fn line(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.lines.push(Line { name: name.into(), pass, detail: detail.into() });
    }

    fn pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }
}

struct Runner {
    reg: Registry,
    opts: RunOptions,
    reports: Vec<Report>,
}

impl Runner {
    /// Runs a case and returns the report with its wall time.
    fn run(&mut self, id: &str, params: &[(&str, i64)]) -> (Report, Duration) {
        let case = self.reg.get(id).unwrap_or_else(|e| panic!("{id}: {e}"));
        let overrides: Params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let t = Instant::now();
        let r = folcheck::verify::run_case(case, &overrides, &self.opts).unwrap_or_else(|e| panic!("{id}: {e}"));
        let el = t.elapsed();
        self.reports.push(r.clone());
        (r, el)
    }
}

/// All checks of the report hold, whether or not the case is asserted at
/// these parameters, and no error occurred.
fn checks_hold(r: &Report) -> bool {
    r.error.is_none() && r.checks.iter().all(|c| c.pass)
}

fn failed_checks(r: &Report) -> String {
    if let Some(e) = &r.error {
        return format!("error: {e}");
    }
    let bad: Vec<String> = r.checks.iter().filter(|c| !c.pass).map(|c| format!("{} ({})", c.name, c.detail)).collect();
    if bad.is_empty() {
        "all checks hold".into()
    } else {
        bad.join("; ")
    }
}

fn label(r: &Report) -> String {
    if r.params.is_empty() {
        r.id.clone()
    } else {
        let p: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{} ({})", r.id, p.join(", "))
    }
}

/// Records a whole-case line: all checks hold within `limit`.
fn case_line(c: &mut Criterion, run: &mut Runner, id: &str, params: &[(&str, i64)], limit: Duration) -> Report {
    let (r, el) = run.run(id, params);
    let ok = checks_hold(&r) && el <= limit;
    c.line(label(&r), ok, format!("{}; {} ms (limit {} s)", failed_checks(&r), el.as_millis(), limit.as_secs()));
    r
}

fn value_is(r: &Report, name: &str, want: &str) -> (bool, String) {
    let got = r.value(name).unwrap_or("missing");
    (got == want, format!("{name} = {got}, expected {want}"))
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn main() -> ExitCode {
    let mut run = Runner { reg: Registry::builtin().expect("built-in registry"), opts: RunOptions::default(), reports: Vec::new() };
    let minute = Duration::from_secs(60);
    let mut all = Vec::new();

    let mut c = Criterion::new("1 appendix coefficients, exact, each < 60 s");
    for (id, name, want) in [
        ("xi-psi-w6", "ratio", "1296"),
        ("xi-psi-w24", "ratio", "576"),
        ("xi-psi-w237", "coefficient_abs", "864"),
        ("xi-psi-w228", "coefficient_abs", "2592"),
        ("xi-psi-w147", "coefficient_abs", "12960"),
    ] {
        let (r, el) = run.run(id, &[]);
        let (ok, detail) = value_is(&r, name, want);
        c.line(id, ok && checks_hold(&r) && el <= minute, format!("{detail}; {} ms", el.as_millis()));
    }
    let (r, el) = run.run("xi-psi-w48", &[]);
    let got = r.value("coefficient_abs").unwrap_or("missing").to_string();
    c.line(
        "xi-psi-w48",
        checks_hold(&r) && (got == "768" || got == "4608") && el <= minute,
        format!("realized |coefficient| = {got}, allowed 768 or 4608; {} ms", el.as_millis()),
    );
    all.push(c);

    let mut c = Criterion::new("2 pair-product sub-sums for w6 ^ w6, exact");
    let (r, _) = run.run("xi-psi-w6", &[]);
    for (name, want) in [("part_1", "1440"), ("part_2", "72"), ("part_3", "-72")] {
        let (ok, detail) = value_is(&r, name, want);
        c.line(name, ok, detail);
    }
    let parts: Option<Vec<i64>> =
        ["part_1", "part_2", "part_3"].iter().map(|n| r.value(n).and_then(|v| v.parse().ok())).collect();
    let combined = parts.map(|p| p[0] - p[1] + p[2]);
    c.line("A - B + C", combined == Some(1296), format!("{combined:?}, expected 1296"));
    let recombine = r.check("parts combine as P1 - P2 + P3").is_some_and(|k| k.pass);
    c.line("full tensors recombine", recombine, "xi(P1) - xi(P2) + xi(P3) equals xi o Psi");
    all.push(c);

    let mut c = Criterion::new("3 fast decompositions, exact, each < 30 s");
    let half = Duration::from_secs(30);
    for n in 7..=13 {
        case_line(&mut c, &mut run, "g3-wedge2", &[("n", n)], half);
    }
    for n in 5..=8 {
        case_line(&mut c, &mut run, "g2-wedge2", &[("n", n)], half);
        case_line(&mut c, &mut run, "g2-wedge4", &[("n", n)], half);
    }
    for k in 2..=3 {
        for d in 0..=1 {
            case_line(&mut c, &mut run, "grass-forms1", &[("k", k), ("d", d)], half);
            case_line(&mut c, &mut run, "grass-forms3", &[("k", k), ("d", d)], half);
        }
    }
    all.push(c);

    let mut c = Criterion::new("4 slow decompositions at n = 13, exact, total < 30 min");
    let t = Instant::now();
    let limit = Duration::from_secs(1800);
    let r = case_line(&mut c, &mut run, "g3-wedge4", &[], limit);
    let want = binomial(286, 4);
    let dim = r.computed.as_ref().map(|d| d.dim.clone()).unwrap_or_default();
    c.line("g3-wedge4 dimension", dim == want.to_string(), format!("{dim} vs C(286,4) = {want}"));
    let r = case_line(&mut c, &mut run, "g3-sym2-sections", &[], limit);
    let twice = r.computed.as_ref().and_then(|d| d.terms.iter().find(|t| t.notation == "L2+L4+L6").map(|t| t.mult));
    c.line("g3-sym2-sections multiplicity of L2+L4+L6", twice == Some(2), format!("{twice:?}, expected Some(2)"));
    let r = case_line(&mut c, &mut run, "g3-sym2-wedge2", &[], limit);
    let want = binomial(40755 + 1, 2);
    let dim = r.computed.as_ref().map(|d| d.dim.clone()).unwrap_or_default();
    c.line("g3-sym2-wedge2 dimension", dim == want.to_string(), format!("{dim} vs dim S2 of C(286,2) = 40755: {want}"));
    let distinct = r.computed.as_ref().map_or(0, |d| d.distinct);
    c.line("g3-sym2-wedge2 has 22 summands", distinct == 22, format!("{distinct} distinct summands"));
    let el = t.elapsed();
    c.line("total runtime", el <= limit, format!("{} ms", el.as_millis()));
    all.push(c);

    let mut c = Criterion::new("5 cotangent bundles of cominuscule varieties, exact");
    for k in 1..=7 {
        case_line(&mut c, &mut run, "cotangent-a", &[("r", 7), ("k", k)], minute);
    }
    for id in ["cotangent-b", "cotangent-c", "cotangent-d1", "cotangent-dr", "cotangent-e6", "cotangent-e7"] {
        case_line(&mut c, &mut run, id, &[], minute);
    }
    all.push(c);

    let mut c = Criterion::new("6 spinor variety and Cayley plane, exact, each < 5 min");
    let five = Duration::from_secs(300);
    for id in ["spinor-wedge2", "spinor-wedge4", "spinor-forms1", "spinor-forms3"] {
        case_line(&mut c, &mut run, id, &[], five);
    }
    for (id, want) in [("e6-wedge2", "351"), ("e6-wedge4", "17550")] {
        let r = case_line(&mut c, &mut run, id, &[], five);
        let dim = r.computed.as_ref().map(|d| d.dim.clone()).unwrap_or_default();
        c.line(format!("{id} dimension"), dim == want, format!("{dim} vs {want}"));
    }
    for id in ["e6-forms1", "e6-forms3"] {
        case_line(&mut c, &mut run, id, &[], five);
    }
    all.push(c);

    let mut c = Criterion::new("7 contact forms on the third row of the magic square, exact");
    for id in ["legendrian-c3", "legendrian-a5", "legendrian-d6", "legendrian-e7"] {
        case_line(&mut c, &mut run, id, &[], minute);
    }
    let (r, _) = run.run("w6-facts", &[]);
    let (ok, detail) = value_is(&r, "skew_rank", "20");
    c.line("skew rank of w6", ok, detail);
    all.push(c);

    let mut c = Criterion::new("8 lines, Lagrangian strictness and products, exact");
    for r in 3..=5 {
        case_line(&mut c, &mut run, "sp-lines-wedge2", &[("r", r)], minute);
    }
    case_line(&mut c, &mut run, "lagrangian-strict", &[], minute);
    for id in ["og-lines-strict", "og-lines-strict-d", "og-lines-strict-b5"] {
        case_line(&mut c, &mut run, id, &[], Duration::from_secs(1800));
    }
    case_line(&mut c, &mut run, "prod-pp-wedge4", &[], minute);
    let r = case_line(&mut c, &mut run, "prod-pp-forms3", &[], minute);
    let kernel = r.computed.as_ref().is_some_and(|d| d.terms.iter().all(|t| t.notation != "2L2+2L5"));
    c.line("three-forms miss 2L2+2L5", kernel, "the summand of the fourth exterior power with no image");
    all.push(c);

    let mut c = Criterion::new("9 polynomial forms, exact, each < 10 s");
    let ten = Duration::from_secs(10);
    let r = case_line(&mut c, &mut run, "contact-form", &[], ten);
    let (ok, detail) = value_is(&r, "ratio_to_display", "2");
    c.line("omega ^ d omega is twice the display", ok, detail);
    case_line(&mut c, &mut run, "pencil-forms", &[], ten);
    case_line(&mut c, &mut run, "plucker-kernel", &[], ten);
    all.push(c);

    let mut c = Criterion::new("10 skew pencils, exact, < 2 min");
    let two = Duration::from_secs(120);
    let r = case_line(&mut c, &mut run, "pencil-trichotomy", &[], two);
    c.line("seed", r.seed.is_some(), format!("{:?}", r.seed));
    case_line(&mut c, &mut run, "pencil-agreement", &[], two);
    all.push(c);

    let mut c = Criterion::new("11 property suites, exact");
    for id in ["extalg-properties", "hw-certify", "form-properties"] {
        case_line(&mut c, &mut run, id, &[], minute);
    }
    let mut total = 0;
    let mut broken = Vec::new();
    for r in &run.reports {
        for k in &r.checks {
            if k.name == "decompose after recombine is the identity" || k.name == "recombination reproduces the character" {
                total += 1;
                if !k.pass {
                    broken.push(label(r));
                }
            }
        }
    }
    c.line(
        "round trip on every emitted decomposition",
        broken.is_empty() && total > 0,
        format!("{total} checks, failing: {}", if broken.is_empty() { "none".into() } else { broken.join(", ") }),
    );
    all.push(c);

    let mut failed = 0;
    for c in &all {
        let pass = c.pass();
        failed += !pass as usize;
        println!("[{}] criterion {}", if pass { "PASS" } else { "FAIL" }, c.title);
        for l in &c.lines {
            println!("    [{}] {}: {}", if l.pass { "ok" } else { "FAIL" }, l.name, l.detail);
        }
    }
    println!("acceptance: {} of {} criteria pass", all.len() - failed, all.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
