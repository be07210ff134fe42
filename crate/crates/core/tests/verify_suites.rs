//! Every verification suite passes at the reference couplings, and every
//! tolerance row is exercised by some report.

use std::collections::BTreeSet;

use serde_json::Value;
use susy2d::verify::{run_suite, Report, Suite, SuiteConfig, TOLERANCES};
use susy2d::Error;

fn run(suite: Suite) -> Report {
    let report = run_suite(suite, &SuiteConfig::default()).expect("suite runs");
    let failed: Vec<String> = report.failures().map(|c| format!("{} = {:e}", c.id, c.measured)).collect();
    assert!(report.pass, "{} failed: {failed:?}", suite.name());
    report
}

#[test]
fn all_suites_pass_and_cover_the_table() {
    let mut used = BTreeSet::new();
    for suite in Suite::ALL {
        let report = run(suite);
        assert!(!report.checks.is_empty());
        for c in &report.checks {
            used.insert(c.id.split('[').next().unwrap().to_string());
            assert!(c.skipped.is_none(), "{} skipped at the reference point", c.id);
        }
        let json: Value = serde_json::to_value(&report).unwrap();
        assert_eq!(json["suite"], suite.name());
        for key in ["id", "anchor", "tag", "description", "measured", "target", "tol", "comparison", "pass"] {
            assert!(json["checks"][0].get(key).is_some(), "{}: missing {key}", suite.name());
        }
        if suite == Suite::Hierarchy {
            assert!(report.notes.iter().any(|n| n.starts_with("oracle matches")), "{:?}", report.notes);
        }
    }
    let missing: Vec<&str> = TOLERANCES.iter().map(|t| t.key).filter(|k| !used.contains(*k)).collect();
    assert!(missing.is_empty(), "tolerance rows never checked: {missing:?}");
}

#[test]
fn exact_suite_rejects_non_separable_a() {
    let cfg = SuiteConfig { a: Some(-1.0), ..SuiteConfig::default() };
    assert_eq!(run_suite(Suite::Exact, &cfg).unwrap_err(), Error::NotSeparable { a: -1.0 });
}

#[test]
fn zero_mode_suite_without_admissible_modes_skips() {
    // a = 1 lies outside the window where zero modes are normalizable
    let cfg = SuiteConfig { a: Some(1.0), ..SuiteConfig::default() };
    let report = run_suite(Suite::Zeromodes, &cfg).unwrap();
    assert!(report.checks.iter().all(|c| c.skipped.is_some()));
}

#[test]
fn reports_are_deterministic() {
    let cfg = SuiteConfig::default();
    let a = serde_json::to_string(&run_suite(Suite::Intertwining, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_suite(Suite::Intertwining, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}
