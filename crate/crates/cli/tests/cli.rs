use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use loopforge::exact::q;
use loopforge::forms::{extended_bracket, FormSpec};
use loopforge::loops::{GradedElement, LoopTag, LoopType};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopforge")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn build_dimension_tables() {
    let out = run(&["build", "--type", "C2", "--rank", "2", "--window", "2"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["schema"], "loopforge/1");
    for row in doc["degrees"].as_array().unwrap() {
        let k = row["degree"].as_i64().unwrap();
        // sp_4 in even degrees; 𝔰 (dim 5) plus the diagonal complement in odd ones
        let (core, comp) = if k % 2 == 0 { (10, 0) } else { (5, 1) };
        assert_eq!(row["core"], core, "degree {k}");
        assert_eq!(row["complement"], comp, "degree {k}");
    }

    let doc = json(&run(&["build", "--type", "A1", "--rank", "2", "--window", "1"]));
    let rows = doc["degrees"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row["core"], 3);
        let at_zero = u64::from(row["degree"] == 0);
        assert_eq!(row["central"], at_zero);
        assert_eq!(row["derivation"], at_zero);
    }
}

#[test]
fn unknown_type_is_a_usage_error() {
    assert_eq!(run(&["build", "--type", "X9"]).status.code(), Some(2));
}

#[test]
fn bracket_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let ty = LoopType::new(LoopTag::A1, 2, 3).unwrap();
    let x = GradedElement::unit(&ty, 1, 2, 1).add(&GradedElement::unit(&ty, 2, 1, 0).scale(&q(3)));
    let y = GradedElement::unit(&ty, 2, 1, -1);
    let want = extended_bracket(&FormSpec::default(), &ty, &x, &y).unwrap();
    assert_eq!(*want.central(), q(1));
    let xp = write(dir.path(), "x.json", &x.to_json());
    let yp = write(dir.path(), "y.json", &y.to_json());
    let out = run(&["bracket", "--type", "A1", "--rank", "2", &xp, &yp]);
    assert!(out.status.success());
    let got = GradedElement::from_json(&ty, &json(&out)["result"]).unwrap();
    assert_eq!(got, want);

    let zp = write(dir.path(), "zero.json", &serde_json::json!({}));
    let out = run(&["bracket", "--type", "A1", "--rank", "2", &xp, &zp]);
    assert!(GradedElement::from_json(&ty, &json(&out)["result"]).unwrap().is_zero());
}

#[test]
fn bracket_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let far = write(dir.path(), "far.json", &serde_json::json!({"2": {"matrix": [[1, 2, "1"]]}}));
    let near = write(dir.path(), "near.json", &serde_json::json!({"2": {"matrix": [[2, 1, "1"]]}}));
    // inputs in window, product of degree 4 is not
    let out = run(&["bracket", "--type", "A1", "--rank", "2", "--window", "4", &far, &near]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["bracket", "--type", "A1", "--rank", "2", "--window", "3", &far, &near]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let outside = write(dir.path(), "out.json", &serde_json::json!({"9": {"matrix": [[1, 2, "1"]]}}));
    let out = run(&["bracket", "--type", "A1", "--rank", "2", &outside, &near]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[9]"));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "not json").unwrap();
    let out = run(&["bracket", "--type", "A1", "--rank", "2", &near, bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let out = run(&["verify", "all", "--type", "BC2", "--rank", "2", "--window", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);

    let out = run(&["verify", "rootdatum"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["verify", "torus", "--type", "A1", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    let lt1 = doc["reports"][0]["checks"].as_array().unwrap().iter().find(|c| c["name"] == "LT1").unwrap().clone();
    assert_eq!(lt1["passed"], false);
    assert!(lt1["witness"]["pair"].is_array());
}

#[test]
fn derive_examples() {
    let doc = json(&run(&["derive", "--type", "A1", "--rank", "3", "--degree", "0"]));
    assert_eq!(doc["solution"]["solved_dim"], 3);
    assert_eq!(doc["solution"]["verdict"], "match");

    let out = run(&["derive", "--type", "C2", "--rank", "2", "--degree", "1", "--window", "5", "--extend"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["solution"]["verdict"], "match");
    assert_eq!(doc["extensions"].as_array().unwrap().len(), 1);

    let doc = json(&run(&["derive", "--type", "B2", "--rank", "2", "--degree", "-1"]));
    assert_eq!(doc["solution"]["solved_dim"], 1);

    assert_eq!(run(&["derive", "--type", "A1", "--degree", "3", "--margin", "2"]).status.code(), Some(2));
}

#[test]
fn spectrum_examples() {
    let doc = json(&run(&["spectrum", "--harmonic", "--rank", "4", "--target", "2,3,0", "--scan"]));
    assert_eq!(doc["eigenvalues"][0]["eigenvalue"], "1/6");
    assert_eq!(doc["obstruction"]["verdict"], "distinguishable");

    let doc = json(&run(&["spectrum", "--rank", "4"]));
    assert_eq!(doc["obstruction"]["verdict"], "inconclusive");

    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", &serde_json::json!({"finite": {"1": "1", "2": "2", "3": "3"}}));
    let doc = json(&run(&["spectrum", "--rank", "3", "--p-file", &p]));
    assert_eq!(doc["obstruction"]["verdict"], "inconclusive");

    let bad = write(dir.path(), "bad.json", &serde_json::json!({"finite": {"0": "1"}}));
    assert_eq!(run(&["spectrum", "--p-file", &bad]).status.code(), Some(2));
}

#[test]
fn table_format_and_guard() {
    let out = run(&["verify", "center", "--type", "A1", "--rank", "2", "--window", "2", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS") && text.contains("extended_center_is_c"));
    assert_eq!(run(&["build", "--type", "A1", "--rank", "7"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--type", "A1", "--rank", "7", "--window", "0", "--allow-large"]).status.code(), Some(0));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["verify", "forms", "--type", "B2", "--rank", "2", "--window", "3", "--seed", "11"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
