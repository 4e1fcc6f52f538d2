use std::path::Path;
use std::process::{Command, Output};

use dynred_core::instances::{validate_tcstar, BitMatrix, OuMvInstance, TcStarInstance, VectorPair};
use dynred_core::reduction::matching::closed_form_insertions;
use serde_json::Value;

fn dynred(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynred")).args(args).current_dir(dir).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out))
}

#[test]
fn gen_tcstar_writes_valid_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynred(&["gen", "tcstar", "--n", "6", "--delta", "2", "--p", "2", "--seed", "1", "--out", "t.json"], dir.path());
    assert!(out.status.success());
    let inst = TcStarInstance::from_json(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!((inst.n, inst.delta, inst.p), (6, 2, 2));
    assert!(validate_tcstar(&inst).is_ok());
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = dynred(&["gen", "oumv", "--n", "8", "--density", "0.3", "--seed", "2", "--out", name], dir.path());
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
}

#[test]
fn gen_cnf_rejects_odd_vars() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynred(&["gen", "cnf", "--vars", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_matching_on_zero_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let inst = OuMvInstance::new(
        BitMatrix::zeros(3).unwrap(),
        vec![VectorPair { u: vec![true; 3], v: vec![true; 3] }; 3],
    )
    .unwrap();
    std::fs::write(dir.path().join("z.json"), inst.to_json()).unwrap();
    for extra in [None, Some("--decremental")] {
        let mut args = vec!["solve", "matching", "--instance", "z.json"];
        args.extend(extra);
        let out = dynred(&args, dir.path());
        assert_eq!(out.status.code(), Some(0));
        let report = json_stdout(&out);
        assert_eq!(report["agreement"], Value::Bool(true));
        assert_eq!(report["answers"]["reduction"], serde_json::json!([0, 0, 0]));
        assert_eq!(report["instance"]["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn solve_flow_on_contradiction() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.cnf"), "p cnf 2 2\n1 0\n-1 0\n").unwrap();
    for extra in [None, Some("--early-exit"), Some("--decremental")] {
        let mut args = vec!["solve", "flow", "--cnf", "c.cnf"];
        args.extend(extra);
        let out = dynred(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let report = json_stdout(&out);
        assert_eq!(report["agreement"], Value::Bool(true));
        assert_eq!(report["answers"]["reduction"], Value::Bool(false));
    }
}

#[test]
fn solve_diameter_node_add_has_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dynred(&["gen", "tcstar", "--n", "5", "--plant", "1,2,3", "--seed", "9", "--out", "p.json"], dir.path());
    assert!(gen.status.success());
    let report_path = dir.path().join("r.json");
    let out = dynred(
        &["--quiet", "solve", "diameter", "--instance", "p.json", "--mode", "node-add", "--report", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(report_path).unwrap()).unwrap();
    assert_eq!(report["agreement"], Value::Bool(true));
    assert_eq!(report["answers"]["reduction"], Value::Bool(true));
    assert!(report["credit_ledger"]["phases"].as_array().unwrap().len() == 5);

    for mode in ["static", "incremental"] {
        let out = dynred(&["solve", "diameter", "--instance", "p.json", "--mode", mode, "--subdivide", "2"], dir.path());
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json_stdout(&out)["details"]["original_pair_diameter"], 12);
    }
    let out = dynred(&["solve", "diameter", "--instance", "p.json", "--mode", "static", "--gamma", "0.5"], dir.path());
    assert_eq!(json_stdout(&out)["agreement"], Value::Bool(true));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    dynred(&["gen", "tcstar", "--n", "4", "--seed", "5", "--out", "t.json"], dir.path());
    let run = || {
        let mut v = json_stdout(&dynred(&["solve", "diameter", "--instance", "t.json", "--mode", "node-add"], dir.path()));
        v.as_object_mut().unwrap().remove("wall_time_ms");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn exit_codes_for_bad_input_and_guards() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{oops").unwrap();
    assert_eq!(dynred(&["solve", "matching", "--instance", "bad.json"], dir.path()).status.code(), Some(2));
    assert_eq!(dynred(&["solve", "matching", "--instance", "missing.json"], dir.path()).status.code(), Some(2));
    dynred(&["gen", "tcstar", "--n", "17", "--out", "big.json"], dir.path());
    assert_eq!(dynred(&["solve", "diameter", "--instance", "big.json"], dir.path()).status.code(), Some(3));
    dynred(&["gen", "cnf", "--vars", "22", "--out", "big.cnf"], dir.path());
    assert_eq!(dynred(&["solve", "flow", "--cnf", "big.cnf"], dir.path()).status.code(), Some(3));
}

#[test]
fn verify_sweeps_have_no_failures() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        ["verify", "matching", "--count", "200", "--n", "2..16"],
        ["verify", "flow", "--count", "100", "--vars", "4..14"],
        ["verify", "diameter", "--count", "50", "--n", "2..10"],
    ] {
        let out = dynred(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let summary = json_stdout(&out);
        assert!(summary["failures"].as_array().unwrap().is_empty());
        assert_eq!(summary["agreements"], summary["count"]);
    }
}

fn csv_rows(out: &Output) -> Vec<Vec<u64>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn bench_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynred(&["--seed", "3", "bench", "matching", "--sizes", "4,8,16,32"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.lines().last().unwrap().starts_with("# fit exponent="));
    for row in csv_rows(&out) {
        let inst = dynred_core::instances::gen_oumv(row[0] as usize, 0.5, 3).unwrap();
        assert_eq!(row[1], closed_form_insertions(&inst));
        assert_eq!(row[2], row[0]);
    }

    let out = dynred(&["bench", "flow", "--sizes", "4,6,8"], dir.path());
    for row in csv_rows(&out) {
        assert_eq!(row[2], 1 << (row[0] / 2));
    }

    let out = dynred(&["--format", "json", "bench", "diameter", "--sizes", "2,4,8"], dir.path());
    let bench = json_stdout(&out);
    for row in bench["rows"].as_array().unwrap() {
        assert_eq!(row["insertions"], row["expected_insertions"]);
        assert_eq!(row["queries"], 1);
    }
    assert!(bench["fit"]["exponent"].as_f64().unwrap() > 0.0);

    assert_eq!(dynred(&["bench", "matching", "--sizes", "8,4"], dir.path()).status.code(), Some(2));
}
