use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn crn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = crn(&all);
    (serde_json::from_slice(&o.stdout).unwrap(), o.status.code().unwrap())
}

#[test]
fn analyze_strong_classes_example() {
    let o = crn(&["analyze", &data("strong_classes.net")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in [
        "complexes: 4",
        "linkage classes: 1",
        "strong linkage classes: 3",
        "terminal classes: 1",
        "rank: 3",
        "deficiency: 0",
        "weakly reversible: no",
        "t-minimal: yes",
        "terminality: TBD",
        "reactant diversity: SRD",
    ] {
        assert!(text.lines().any(|l| l == line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn msa_running_example_report() {
    let (doc, code) = json(&["msa", &data("running_example.net")]);
    assert_eq!(code, 0);
    assert_eq!(doc["format"], 1);
    assert_eq!(doc["verdict"], "multistationary");
    let w = &doc["witness"];
    assert_eq!(w["mu"], serde_json::json!(["1", "-1"]));
    assert_eq!(w["sigma"], serde_json::json!(["2", "-1"]));
    let c: Vec<f64> = w["c_star"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((c[0] - 3.163953).abs() < 1e-6 && (c[1] - 0.581977).abs() < 1e-6);
    assert_eq!(doc["original"]["verified"], true);
    let k = doc["original"]["kinetics"][0].as_str().unwrap();
    assert!(k.starts_with("K_r1 = 0.466582793 X^2 Y + 0.343292434 X Y^2"), "{k}");
}

#[test]
fn output_is_deterministic_and_out_flag_writes_file() {
    let file = data("running_example.net");
    let a = crn(&["msa", &file, "--seed", "7"]);
    let b = crn(&["msa", &file, "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let c = crn(&["msa", &file, "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn verify_accepts_genuine_and_rejects_tampered_witness() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let o = crn(&["--json", "msa", &data("running_example.net"), "--out", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = crn(&["verify", good.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(stdout(&v).contains("verified: yes"));

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    doc["witness"]["rates"]["R3"] = serde_json::json!(0.9);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let v = crn(&["verify", bad.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));
    let text = stdout(&v);
    assert!(text.contains("check: transformed_residual_star\n  passed: no"), "{text}");

    doc["witness"]["sigma"] = serde_json::json!(["2", "1"]);
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(crn(&["verify", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn monostationary_pair() {
    let (doc, code) = json(&["msa", &data("ab_mass_action.net")]);
    assert_eq!(code, 0);
    assert_eq!(doc["verdict"], "monostationary");
    assert!(doc.get("witness").is_none());
}

#[test]
fn pinned_orientation() {
    let (doc, code) = json(&["msa", &data("running_example.net"), "--orientation", "R1,R3,R6,R8"]);
    assert_eq!(code, 0);
    assert_eq!(doc["witness"]["orientation"], serde_json::json!(["R1", "R3", "R6", "R8"]));
    assert_eq!(doc["witness"]["w_basis"], serde_json::json!([["-1", "-1", "1", "1"]]));
}

#[test]
fn transform_reports_identities() {
    let (doc, code) = json(&["transform", &data("running_example.net")]);
    assert_eq!(code, 0);
    assert_eq!(doc["h"], 4);
    assert!(doc["identities"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(doc["dynamic_equivalence"]["passed"], true);
    assert!(doc["transformed"].as_str().unwrap().contains("R8: 19 X + 21 Y -> 23 X + 19 Y"));
}

#[test]
fn decompose_fundamental_and_given() {
    let (doc, code) = json(&["decompose", &data("strong_classes.net")]);
    assert_eq!(code, 0);
    assert_eq!(doc["source"], "fundamental");
    let (doc, _) = json(&["decompose", &data("strong_classes.net"), "--parts", "R1,R5;R2,R3,R4"]);
    assert_eq!(doc["parts"].as_array().unwrap().len(), 2);
    assert_eq!(doc["c_decomposition"], false);
    let o = crn(&["decompose", &data("strong_classes.net"), "--parts", "R1;R2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.net");
    std::fs::write(&broken, "species X\nX -> \n").unwrap();
    let o = crn(&["analyze", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column"));

    assert_eq!(crn(&["analyze", "/nonexistent/file.net"]).status.code(), Some(2));

    let o = crn(&["msa", &data("running_example.net"), "--budget", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));

    let o = crn(&["msa", &data("running_example.net"), "--orientation", "R1"]);
    assert_eq!(o.status.code(), Some(2));
}
