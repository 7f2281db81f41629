//! Registry loading, case selection and report determinism.

use folcheck::expr::Params;
use folcheck::verify::{reports_to_json, run_case, run_cases, Registry, RunOptions, Status, Tier};
use folcheck::Error;

#[test]
fn builtin_ids_are_unique_and_selectable() {
    let reg = Registry::builtin().unwrap();
    let appendix = reg.filter("appendix");
    assert!(appendix.iter().all(|c| c.id.starts_with("xi-psi") || c.id == "hw-certify" || c.id == "w6-facts"));
    assert!(reg.filter("slow").iter().all(|c| c.tier == Tier::Slow));
    assert_eq!(reg.filter("").len(), reg.cases().len());
}

#[test]
fn unknown_case_and_parameter() {
    let reg = Registry::builtin().unwrap();
    assert!(matches!(reg.get("eq-none"), Err(Error::UnknownCase(_))));
    let case = reg.get("g3-wedge2").unwrap();
    let bad: Params = [("q".to_string(), 3)].into_iter().collect();
    assert!(run_case(case, &bad, &RunOptions::default()).is_err());
}

#[test]
fn malformed_registries_are_rejected() {
    for src in [
        "[[case]]\nid = \"x\"\n",
        "[[case]]\nid = \"x\"\nanchor = \"a\"\ntier = \"medium\"\nop = { kind = \"hw_certify\" }\n",
        "[[case]]\nid = \"x\"\nanchor = \"a\"\ntier = \"fast\"\nop = { kind = \"nope\" }\n",
        "[[case]]\nid = \"x\"\nanchor = \"a\"\ntier = \"fast\"\nsystem = \"A{n}\"\nop = { kind = \"hw_certify\" }\n",
        "[[case]]\nid = \"x\"\nanchor = \"a\"\ntier = \"fast\"\nop = { kind = \"hw_certify\" }\nexpect = { bogus = 1 }\n",
    ] {
        assert!(Registry::parse(src).is_err(), "{src}");
    }
}

#[test]
fn reports_are_deterministic() {
    let reg = Registry::builtin().unwrap();
    let cases = reg.filter("fast");
    let opts = RunOptions::default();
    let a = reports_to_json(&run_cases(&cases, &Params::new(), &opts).unwrap());
    let b = reports_to_json(&run_cases(&cases, &Params::new(), &opts).unwrap());
    assert_eq!(a, b);
    assert!(!a.contains("elapsed_ms"));
}

#[test]
fn fast_cases_run_without_errors() {
    let reg = Registry::builtin().unwrap();
    let reports = run_cases(&reg.filter("fast"), &Params::new(), &RunOptions::default()).unwrap();
    for r in &reports {
        assert_ne!(r.status, Status::Error, "{}", r.to_text());
    }
}

#[test]
fn seed_is_recorded_only_for_randomized_cases() {
    let reg = Registry::builtin().unwrap();
    let opts = RunOptions { seed: 5, timing: false };
    let r = run_case(reg.get("pencil-agreement").unwrap(), &Params::new(), &opts).unwrap();
    assert_eq!(r.seed, Some(5));
    let r = run_case(reg.get("e6-wedge2").unwrap(), &Params::new(), &opts).unwrap();
    assert_eq!(r.seed, None);
}

#[test]
fn empty_report_list_is_valid_json() {
    let doc: serde_json::Value = serde_json::from_str(&reports_to_json(&[])).unwrap();
    assert_eq!(doc["reports"].as_array().unwrap().len(), 0);
}
