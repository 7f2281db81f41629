//! `folcheck`: run registry cases, decompose plethysms, inspect forms,
//! pencils and the three-form vectors.
//!
//! Exit codes: 0 when everything passes, 1 on a mathematical mismatch, 2 on
//! usage errors such as an unknown case id.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use folcheck::extalg::{self, HwTag, MixedTensor};
use folcheck::expr::Params;
use folcheck::linalg::Q;
use folcheck::pencil;
use folcheck::pforms::PolyForm;
use folcheck::verify::{self, Case, Expect, Op, Registry, Report, RunOptions, Tier};
use folcheck::Error;

/// `println!` that stops quietly when stdout is closed (e.g. piped to `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser)]
#[command(name = "folcheck", version, about = "Exact checks for foliations on homogeneous varieties")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Restrict `verify all` and `list` to one tier (default for `verify all`: fast).
    #[arg(long, global = true)]
    tier: Option<Tier>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized cases.
    #[arg(long, global = true, default_value_t = RunOptions::default().seed)]
    seed: u64,
    /// Record wall time in reports.
    #[arg(long, global = true)]
    timing: bool,
    /// Case registry to use instead of the built-in one.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decompose a plethysm of irreducible modules.
    Decompose {
        /// Root system such as `A7`, `E6` or `A3xA3`.
        system: String,
        /// Highest weights of the summands, e.g. `L3` or `L2+L4`.
        #[arg(required = true)]
        weights: Vec<String>,
        /// Partition of the inner Schur functor; `1,1` is the exterior square.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        schur: Vec<usize>,
        /// Partition of an outer Schur functor applied afterwards.
        #[arg(long, value_delimiter = ',')]
        outer: Option<Vec<usize>>,
    },
    /// Run registry cases: one id or `all`.
    Verify {
        /// Case id, or `all`.
        target: String,
        /// Shorthand for `--param n=N`.
        #[arg(long)]
        n: Option<i64>,
        /// Parameter override `name=value`; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, i64)>,
    },
    /// List registry cases matching an id substring, tag or tier.
    List { filter: Option<String> },
    /// Polynomial one-forms read from a JSON term list.
    Forms {
        #[command(subcommand)]
        cmd: FormsCmd,
    },
    /// Skew pencils in canonical form.
    Pencil {
        #[command(subcommand)]
        cmd: PencilCmd,
    },
    /// The named highest-weight vectors in the exterior algebra of three-forms.
    Extalg {
        #[command(subcommand)]
        cmd: ExtalgCmd,
    },
}

#[derive(Subcommand)]
enum FormsCmd {
    /// Radial closedness, LDS and integrability.
    Integrable {
        /// JSON term list of a polynomial form.
        #[arg(long)]
        input: PathBuf,
    },
    /// `omega ^ d omega`.
    Psi {
        /// JSON term list of a polynomial form.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum PencilCmd {
    /// Decide whether w divides v ^ v and produce a decomposition or witness.
    Verify {
        /// Block sizes, e.g. `2,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<usize>,
        /// Block values; rationals such as `1/2` are accepted.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

#[derive(Subcommand)]
enum ExtalgCmd {
    /// Print a named vector.
    Vector {
        /// Vector tag: w6, w24, w48, w228, w237 or w147.
        tag: String,
        /// Dimension of the underlying space (default: the smallest that fits).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Apply xi o Psi to a degree-four vector or a wedge of two bivectors.
    XiPsi {
        /// Vector tag: w6, w24, w48, w228, w237 or w147.
        tag: String,
        /// Second bivector tag; the input is then the wedge of the two.
        #[arg(long)]
        partner: Option<String>,
        /// Dimension of the underlying space (default: the smallest that fits).
        #[arg(long)]
        n: Option<usize>,
    },
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v = v.trim().parse().map_err(|_| format!("bad integer in {s:?}"))?;
    Ok((k.trim().to_string(), v))
}

/// Failure outcome: usage problems exit 2, mismatches exit 1.
enum Fail {
    Usage(String),
    Mismatch,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

type Outcome = Result<(), Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Mismatch) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let opts = RunOptions { seed: g.seed, timing: g.timing };
    match &cli.cmd {
        Cmd::Decompose { system, weights, schur, outer } => {
            let case = Case {
                id: "decompose".into(),
                anchor: "ad hoc plethysm".into(),
                tags: Vec::new(),
                tier: Tier::Fast,
                system: Some(system.clone()),
                params: Params::new(),
                assert_from: BTreeMap::new(),
                op: Op::Plethysm { rep: weights.clone(), inner: schur.clone(), outer: outer.clone() },
                expect: Expect::default(),
            };
            let report = verify::run_case(&case, &Params::new(), &opts)?;
            if let Some(e) = &report.error {
                return Err(Fail::Usage(e.clone()));
            }
            if g.json {
                say!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else if let Some(c) = &report.computed {
                say!("{} (dimension {}, {} summands)", c.rs, c.dim, c.count);
                for t in &c.terms {
                    say!("  {:>4} x {}", t.mult, t.notation);
                }
            }
            finish(&[report])
        }
        Cmd::Verify { target, n, params } => {
            let reg = registry(g)?;
            let mut overrides: Params = params.iter().cloned().collect();
            if let Some(n) = n {
                overrides.insert("n".into(), *n);
            }
            let cases: Vec<&Case> = if target == "all" {
                let tier = g.tier.unwrap_or(Tier::Fast);
                reg.cases().iter().filter(|c| c.tier == tier).collect()
            } else {
                let c = reg.get(target)?;
                if let Some(t) = g.tier {
                    if c.tier != t {
                        return Err(Fail::Usage(format!("case {target} is in tier {}", c.tier.name())));
                    }
                }
                vec![c]
            };
            let mut reports = verify::run_cases(&cases, &overrides, &opts)?;
            reports.sort_by(|a, b| a.id.cmp(&b.id));
            if g.json {
                say!("{}", verify::reports_to_json(&reports));
            } else {
                for r in &reports {
                    say!("{}", r.to_text().trim_end());
                }
                let failed = reports.iter().filter(|r| r.status.is_failure()).count();
                say!("{} cases, {} failed", reports.len(), failed);
            }
            finish(&reports)
        }
        Cmd::List { filter } => {
            let reg = registry(g)?;
            let cases: Vec<&Case> = reg
                .filter(filter.as_deref().unwrap_or(""))
                .into_iter()
                .filter(|c| g.tier.is_none_or(|t| c.tier == t))
                .collect();
            if g.json {
                let rows: Vec<serde_json::Value> = cases
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "id": c.id, "anchor": c.anchor, "tier": c.tier,
                            "tags": c.tags, "system": c.system, "params": c.params,
                        })
                    })
                    .collect();
                say!("{}", serde_json::to_string_pretty(&rows).expect("list serializes"));
            } else {
                for c in cases {
                    let p: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    say!("{:<20} {:<5} {:<12} {:<16} {}", c.id, c.tier.name(), c.system.as_deref().unwrap_or("-"), p.join(","), c.anchor);
                }
            }
            Ok(())
        }
        Cmd::Forms { cmd } => {
            let (path, psi) = match cmd {
                FormsCmd::Integrable { input } => (input, false),
                FormsCmd::Psi { input } => (input, true),
            };
            let src = std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
            let form = PolyForm::from_json(&src)?;
            if psi {
                let out = form.psi_wedge_d()?;
                if g.json {
                    say!("{}", out.to_json());
                } else {
                    say!("{out}");
                }
                return Ok(());
            }
            let closed = form.is_radially_closed()?;
            let (lds, integrable) = if closed { (Some(form.is_lds()?), Some(form.is_integrable()?)) } else { (None, None) };
            if g.json {
                let v = serde_json::json!({ "radially_closed": closed, "lds": lds, "integrable": integrable });
                say!("{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                say!("radially closed: {closed}");
                if let (Some(l), Some(i)) = (lds, integrable) {
                    say!("LDS: {l}\nintegrable: {i}");
                }
            }
            Ok(())
        }
        Cmd::Pencil { cmd: PencilCmd::Verify { partition, values } } => {
            let vals = values
                .iter()
                .map(|s| Q::from_str(s.trim()).map_err(|_| Fail::Usage(format!("bad value {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let r = pencil::verify_pencil(partition, &vals)?;
            if g.json {
                say!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
            } else {
                say!("partition {:?}, values {:?}", r.partition, r.values);
                say!("elementary divisors: {}", r.elementary_divisors.join(", "));
                say!("w divides v^v: {} (direct solve: {})", r.divisible, r.divisible_by_solving);
                say!("expected: {}", r.predicted_divisible);
                if let Some(d) = &r.decomposition {
                    say!("v = ({}) w + y, y = {}", d.a, d.y);
                }
                if let Some(w) = &r.witness {
                    say!("witness {} pairs with v^v to {}", w.phi, w.pairing);
                }
            }
            if r.verdict_matches && r.tests_agree {
                Ok(())
            } else {
                Err(Fail::Mismatch)
            }
        }
        Cmd::Extalg { cmd } => {
            match cmd {
                ExtalgCmd::Vector { tag, n } => {
                    let tag = HwTag::from_str(tag)?;
                    let v = extalg::build_hw_vector(tag, n.unwrap_or(tag.min_n()))?;
                    if g.json {
                        say!("{}", v.to_json());
                    } else {
                        say!("{v}");
                    }
                }
                ExtalgCmd::XiPsi { tag, partner, n } => {
                    let tag = HwTag::from_str(tag)?;
                    let partner = partner.as_deref().map(HwTag::from_str).transpose()?;
                    let n = n.unwrap_or(partner.map_or(tag.min_n(), |p| p.min_n().max(tag.min_n())));
                    let mut rep = extalg::build_hw_tensor(tag, n)?;
                    if let Some(p) = partner {
                        rep = rep.tensor(&extalg::build_hw_tensor(p, n)?)?;
                    }
                    let out = extalg::xi_psi(&rep.alternate())?;
                    print_mixed(&out, g.json);
                }
            }
            Ok(())
        }
    }
}

fn print_mixed(t: &MixedTensor, json: bool) {
    let rows = t.sorted_terms();
    if json {
        let v: Vec<serde_json::Value> = rows
            .iter()
            .map(|(six, a, b, c)| serde_json::json!({ "six": six, "a": a, "b": b, "coeff": c.to_string() }))
            .collect();
        say!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        for (six, a, b, c) in rows {
            say!("{c} e{six:?} (x) e{a:?} ^ e{b:?}");
        }
    }
}

fn registry(g: &Global) -> Result<Registry, Fail> {
    Ok(match &g.registry {
        Some(p) => Registry::load(p)?,
        None => Registry::builtin()?,
    })
}

fn finish(reports: &[Report]) -> Outcome {
    if reports.iter().any(|r| r.status.is_failure()) {
        Err(Fail::Mismatch)
    } else {
        Ok(())
    }
}
