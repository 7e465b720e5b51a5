use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rigidlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_then_color_then_rigid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rigidlab(&["gen", "cross", "--d", "4", "--out", "c4.scx", "--coloring-out", "c4.col"], d));
    let scx = std::fs::read_to_string(d.join("c4.scx")).unwrap();
    assert!(scx.starts_with("dim 3\n"));
    assert_eq!(scx.lines().count(), 1 + 16);

    let col = ok(&rigidlab(&["color", "c4.scx", "--a", "2,2"], d));
    assert_eq!(col.lines().count(), 8);
    ok(&rigidlab(&["color", "c4.scx", "--a", "2,2", "--out", "c4-22.col"], d));

    ok(&rigidlab(&["rigid", "c4.scx", "--json", "generic.json"], d));
    let r = read_json(&d.join("generic.json"));
    assert_eq!(r["rigid"], true);
    assert_eq!(r["rank"], 4 * 8 - 10);

    ok(&rigidlab(&["rigid", "c4.scx", "--sparse", "c4-22.col", "--a", "2,2", "--json", "sparse.json"], d));
    let r = read_json(&d.join("sparse.json"));
    assert_eq!(r["rigid"], true);
    assert_eq!(r["target_rank"], 22);
}

#[test]
fn rigid_prints_a_verdict_without_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rigidlab(&["gen", "simplex", "--d", "3", "--out", "t.scx"], d));
    assert_eq!(ok(&rigidlab(&["rigid", "t.scx"], d)).trim(), "rigid");
    assert_eq!(ok(&rigidlab(&["rigid", "t.scx", "--d", "2"], d)).trim(), "rigid");
    std::fs::write(d.join("square.scx"), "dim 1\n0 1\n1 2\n2 3\n0 3\n").unwrap();
    assert_eq!(ok(&rigidlab(&["rigid", "square.scx"], d)).trim(), "not rigid");
}

#[test]
fn subdivided_stacked_is_flexible_under_its_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rigidlab(
        &["gen", "subdivided-stacked", "--d", "3", "--n", "6", "--out", "s.scx", "--coloring-out", "s.col"],
        d,
    ));
    ok(&rigidlab(&["rigid", "s.scx", "--sparse", "s.col", "--a", "2,1", "--trials", "2", "--json", "r.json"], d));
    let r = read_json(&d.join("r.json"));
    assert_eq!(r["rigid"], false);
    assert_eq!(r["trials"], 2);
    assert!(r["samples"][0]["stress_dim"].as_u64().unwrap() >= 3);
}

#[test]
fn srdims_matches_h_vector() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rigidlab(&["gen", "cross", "--d", "3", "--out", "o.scx", "--coloring-out", "o.col"], d));
    for extra in [&[][..], &["--coloring", "o.col", "--a", "1,1,1"][..]] {
        let mut args = vec!["srdims", "o.scx", "--seed", "4"];
        args.extend_from_slice(extra);
        let v: Value = serde_json::from_str(&ok(&rigidlab(&args, d))).unwrap();
        assert_eq!(v["dim1"], v["h1"]);
        assert_eq!(v["dim2"], v["h2"]);
        assert_eq!(v["dim1"], 3);
        assert_eq!(v["omega_injective"], true);
        assert_eq!(v["bookkeeping_consistent"], true);
    }
}

#[test]
fn verify_writes_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rigidlab(&["verify", "cor-4.3-equality", "--json", "a.json"], d));
    ok(&rigidlab(&["verify", "cor-4.3-equality", "--out", "b.json"], d));
    let (a, b) = (std::fs::read(d.join("a.json")).unwrap(), std::fs::read(d.join("b.json")).unwrap());
    assert_eq!(a, b);
    let r = read_json(&d.join("a.json"));
    assert_eq!(r["schema"], 1);
    assert_eq!(r["summary"]["pass"], 5);
}

#[test]
fn verify_respects_thread_cap_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = Command::new(env!("CARGO_BIN_EXE_rigidlab"))
        .args(["verify", "cor-4.3", "--seed", "7,8"])
        .env("RIGIDLAB_THREADS", "1")
        .current_dir(d)
        .output()
        .unwrap();
    let r: Value = serde_json::from_str(&ok(&out)).unwrap();
    assert_eq!(r["seeds"], serde_json::json!([7, 8]));
    assert_eq!(r["summary"]["total"], 20);
    assert_eq!(r["summary"]["fail"], 0);
}

#[test]
fn verify_with_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let spec = r#"{
        "name": "small",
        "claim": "example-7.4",
        "grid": [{"family": "subdivided-stacked", "d": 3, "n": 5, "a": [2, 1]}],
        "seeds": [3],
        "trials": 2
    }"#;
    std::fs::write(d.join("spec.json"), spec).unwrap();
    let r: Value = serde_json::from_str(&ok(&rigidlab(&["verify", "example-7.4", "--spec", "spec.json"], d))).unwrap();
    assert_eq!(r["name"], "small");
    assert_eq!(r["instances"][0]["outcome"], "pass");
    assert_eq!(r["instances"][0]["detail"]["stress_lower_bound"], 2);
}

#[test]
fn failing_exact_claim_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // a stacked-cross sphere needs n divisible by d; the instance errors and counts as a failure
    let spec = r#"{"name": "bad", "claim": "cor-4.3", "grid": [{"family": "stacked-cross", "d": 3, "n": 7}],
                   "seeds": [0], "trials": 1}"#;
    std::fs::write(d.join("spec.json"), spec).unwrap();
    let out = rigidlab(&["verify", "cor-4.3", "--spec", "spec.json"], d);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = rigidlab(&["verify", "thm-99"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown claim"));
    assert!(!rigidlab(&["gen", "torus", "--d", "3"], d).status.success());
    assert!(!rigidlab(&["rigid", "missing.scx"], d).status.success());
    std::fs::write(d.join("bad.scx"), "dim 2\n0 1\n").unwrap();
    assert_eq!(rigidlab(&["rigid", "bad.scx"], d).status.code(), Some(2));
}

#[test]
fn list_claims_has_registry() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&rigidlab(&["list-claims"], dir.path()));
    for id in ["thm-6.1", "prop-8.1", "prop-8.2", "lemma-2.3-equivalence", "example-7.4"] {
        assert!(text.contains(id), "{id} missing");
    }
    let v: Value = serde_json::from_str(&ok(&rigidlab(&["list-claims", "--json"], dir.path()))).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 14);
}
