//! End-to-end runs of the `susy2d` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn susy2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_susy2d")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

/// One line, `error:` prefix.
fn assert_diagnostic(o: &Output, fragment: &str) {
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "stderr: {err}");
    assert!(err.starts_with("error:"), "stderr: {err}");
    assert!(err.contains(fragment), "stderr: {err}");
}

fn energies(v: &Value) -> Vec<f64> {
    v["levels"].as_array().unwrap().iter().map(|l| l["E"].as_f64().unwrap()).collect()
}

#[test]
fn qes_spectrum_json() {
    let o = susy2d(&["spectrum", "--branch", "qes", "--A", "30.25", "--alpha", "1", "--a", "-1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["branch"], "qes");
    assert_eq!(energies(&v), vec![-30.0, -16.0, -6.0]);
    for (i, l) in v["levels"].as_array().unwrap().iter().enumerate() {
        assert_eq!(l["k"], i);
        for key in ["degeneracy", "retained", "notes"] {
            assert!(l.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn exact_spectrum_csv() {
    let o = susy2d(&["spectrum", "--branch", "exact", "--A", "30.25", "--alpha", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,m,E,retained"));
    let retained: Vec<f64> =
        lines.filter(|l| l.ends_with(",true")).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(retained, vec![-34.0, -29.0, -26.0, -20.0, -17.0, -10.0]);
}

#[test]
fn exact_branch_rejects_other_a() {
    let o = susy2d(&["spectrum", "--branch", "exact", "--a", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_diagnostic(&o, "exact branch requires a = -0.5");
}

#[test]
fn hierarchy_branch_keeps_the_computed_rule() {
    let o = susy2d(&["spectrum", "--branch", "hierarchy:1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k"], 1);
    let kept: Vec<f64> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|l| l["retained"] == true)
        .map(|l| l["E"].as_f64().unwrap())
        .collect();
    assert_eq!(kept, vec![-29.0, -26.0, -17.0]);
}

#[test]
fn usage_errors_exit_2_with_one_line() {
    for (args, fragment) in [
        (vec!["spectrum", "--branch", "nosuch"], "unknown branch"),
        (vec!["spectrum", "--bogus"], "--bogus"),
        (vec!["spectrum", "--branch", "qes", "--A", "-3"], "error"),
        (vec!["oracle", "--hamiltonian", "h2"], "unknown hamiltonian"),
        (vec!["oracle", "--domain", "5,1"], "invalid domain"),
        (vec!["spectrum"], "requires --branch"),
        (vec!["verify", "--suite", "nosuch"], "nosuch"),
    ] {
        let o = susy2d(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_diagnostic(&o, fragment);
    }
}

#[test]
fn verify_shape_passes() {
    let o = susy2d(&["verify", "--suite", "shape", "--a", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suite"], "shape");
    assert_eq!(v["pass"], true);
    let c = &v["checks"][0];
    for key in ["id", "anchor", "tag", "measured", "target", "tol", "comparison", "pass"] {
        assert!(c.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn verify_failure_exits_1_and_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    // four nodes per unit length is far too coarse for the oracle checks
    let o = susy2d(&["verify", "--suite", "qes", "--nx", "40", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "stderr: {}", stderr(&o));
    assert_diagnostic(&o, "verification failed");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn verify_oracle_calibration_reports_five_levels() {
    let o = susy2d(&["verify", "--suite", "oracle-calibration"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let levels: Vec<&Value> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["id"].as_str().unwrap().starts_with("morse_levels"))
        .collect();
    assert_eq!(levels.len(), 5);
    let targets: Vec<f64> = levels.iter().map(|c| c["target"].as_f64().unwrap()).collect();
    assert_eq!(targets, vec![-25.0, -16.0, -9.0, -4.0, -1.0]);
}

fn read_rows(path: &Path) -> Vec<(f64, f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,psi"));
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect()
}

#[test]
fn wavefunction_is_normalized_and_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("psi.csv");
    let nx = "301";
    let o = susy2d(&[
        "wavefunction",
        "--branch",
        "exact",
        "--n",
        "0",
        "--m",
        "2",
        "--nx",
        nx,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let rows = read_rows(&out);
    let h = (16.0 - -2.0) / 300.0;
    assert!(rows.iter().all(|r| r.2.is_finite()));
    let norm: f64 = rows.iter().map(|r| r.2 * r.2).sum::<f64>() * h * h;
    assert!((norm - 1.0).abs() < 1e-4, "norm {norm}");

    let key = |x: f64| (x / h).round() as i64;
    let map: std::collections::HashMap<(i64, i64), f64> =
        rows.iter().map(|&(x1, x2, v)| ((key(x1), key(x2)), v)).collect();
    let scale = rows.iter().fold(0.0f64, |m, r| m.max(r.2.abs()));
    let worst = rows.iter().map(|&(x1, x2, v)| (v - map[&(key(x2), key(x1))]).abs() / scale).fold(0.0, f64::max);
    assert!(worst < 1e-3, "swap defect {worst}");
}

#[test]
fn vanishing_and_excluded_states_exit_2() {
    let o = susy2d(&["wavefunction", "--branch", "exact", "--n", "0", "--m", "1", "--nx", "201"]);
    assert_eq!(o.status.code(), Some(2));
    assert_diagnostic(&o, "state vanishes (r = 0)");
    let o = susy2d(&["wavefunction", "--branch", "exact", "--n", "2", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_diagnostic(&o, "excluded");
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = susy2d(&[
            "oracle",
            "--hamiltonian",
            "h0",
            "--a",
            "-0.5",
            "--k",
            "3",
            "--nx",
            "120",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# reference point\nbranch = qes\na = -1\nformat = csv\n").unwrap();
    let o = susy2d(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    assert_eq!(stdout(&o), "n,m,E,retained\n0,,-30,true\n1,,-16,true\n2,,-6,true\n");
    let o = susy2d(&["spectrum", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(energies(&v), vec![-30.0, -16.0, -6.0]);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let o = susy2d(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_diagnostic(&o, "unknown config key");
}

#[test]
fn oracle_h0_separable_point() {
    let o = susy2d(&["oracle", "--hamiltonian", "h0", "--a", "-0.5", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["predictions"], "exact");
    for (l, e) in v["levels"].as_array().unwrap().iter().zip([-34.0, -29.0, -26.0]) {
        assert!((l["E"].as_f64().unwrap() - e).abs() < 1e-2, "{l}");
        assert_eq!(l["analytic"].as_f64(), Some(e));
    }
}

#[test]
fn oracle_h1_separable_point() {
    let o = susy2d(&["oracle", "--hamiltonian", "h1", "--a", "-0.5", "--k", "6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let got: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (g, e) in got.iter().zip([-50.0, -41.0, -41.0, -34.0, -34.0, -32.0]) {
        assert!((g - e).abs() < 1e-2, "{g} vs {e}");
    }
}

#[test]
fn oracle_hierarchy_member_table() {
    let o = susy2d(&["oracle", "--hamiltonian", "h0", "--a", "-1", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["predictions"], "hierarchy:1");
    let localized: Vec<f64> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|l| l["localized"] == true)
        .map(|l| l["E"].as_f64().unwrap())
        .collect();
    assert_eq!(localized.len(), 2);
    assert!((localized[0] + 29.0).abs() < 1e-2 && (localized[1] + 26.0).abs() < 1e-2, "{localized:?}");
}
