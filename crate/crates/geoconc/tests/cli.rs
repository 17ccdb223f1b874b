use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn geoconc(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_geoconc")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("utf-8"))
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, out) = geoconc(&all);
    (code, serde_json::from_str(&out).expect("json output"))
}

fn exported() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = geoconc(&["corpus", "--export", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    dir
}

fn at(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn validate_reports_a_clean_square() {
    let dir = exported();
    let (code, v) = json(&["validate", &at(dir.path(), "fig1_filled.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["clean"], true);
    assert_eq!(v["cells"], 9);
}

#[test]
fn validate_flags_a_broken_cube() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(
        &file,
        r#"{"cells":[{"id":"x","dim":0,"s":[],"t":[]},{"id":"y","dim":0,"s":[],"t":[]},
            {"id":"e","dim":1,"s":["x"],"t":["x"]}],"labels":{"e":"a"},"initial":["x"],"final":[]}"#,
    )
    .unwrap();
    let (code, v) = json(&["validate", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["acyclic"], false);
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("extra.json");
    std::fs::write(&file, r#"{"cells":[],"labels":{},"initial":[],"final":[],"colour":1}"#).unwrap();
    assert_eq!(geoconc(&["validate", file.to_str().unwrap()]).0, 2);
    assert_eq!(geoconc(&["validate", dir.path().join("missing.json").to_str().unwrap()]).0, 2);
    let square = exported();
    assert_eq!(geoconc(&["check", &at(square.path(), "fig2_E.json"), "{a}"]).0, 2);
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let dir = exported();
    let (code, out) = geoconc(&["check", &at(dir.path(), "fig2_E.json"), "{a}{b}true"]);
    assert_eq!((code, out.as_str()), (0, "sat: {a}{b}true at i\n"));
    assert_eq!(geoconc(&["check", &at(dir.path(), "fig2_F.json"), "{a}{b}true"]).0, 1);
    let (code, v) = json(&["check", &at(dir.path(), "parallel_switch_st.json"), "{a}<a>{c}true", "--at", "({},{})"]);
    assert_eq!((code, v["holds"].clone()), (0, Value::Bool(true)));
}

#[test]
fn equiv_prints_a_refutation_and_crosschecks() {
    let dir = exported();
    let (e, f) = (at(dir.path(), "fig2_E.json"), at(dir.path(), "fig2_F.json"));
    let (code, out) = geoconc(&["equiv", &e, &f]);
    assert_eq!(code, 1);
    assert!(out.starts_with("equivalent: no\nrefutation:\n"), "{out}");
    assert!(out.contains("condition 1 in the first model"), "{out}");

    let (code, v) = json(&["equiv", &e, &f, "--crosscheck"]);
    assert_eq!(code, 1);
    assert_eq!(v["crosscheck"]["st"]["agree"], true);
    assert_eq!(v["crosscheck"]["logic"]["formula"], "{a}{b}true");
    assert_eq!(v["crosscheck"]["logic"]["confirmed"], true);
    let links = v["refutation"].as_array().unwrap();
    assert_eq!(links.last().unwrap()["condition"], 1);

    let (code, v) = json(&["equiv", &e, &e, "--mode", "st"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"].as_array().unwrap().len(), 9);
    let (code, out) = geoconc(&["equiv", &e, &e, "--witness"]);
    assert_eq!(code, 0);
    assert!(out.contains("witness: 19 related path pairs\n  i ~ i\n"), "{out}");
}

#[test]
fn tiny_budgets_exit_with_three() {
    let dir = exported();
    let (e, f) = (at(dir.path(), "fig3_E.json"), at(dir.path(), "fig3_F.json"));
    assert_eq!(geoconc(&["equiv", &e, &f, "--budget", "10"]).0, 3);
}

#[test]
fn conversions_round_trip() {
    let dir = exported();
    let st = at(dir.path(), "e.st.json");
    let back = at(dir.path(), "back.json");
    assert_eq!(geoconc(&["convert", &at(dir.path(), "fig2_E.json"), &st, "--to", "st"]).0, 0);
    let text = std::fs::read_to_string(&st).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["configs"].as_array().unwrap().len(), 9);
    assert_eq!(geoconc(&["convert", &st, &back, "--to", "hda"]).0, 0);
    assert_eq!(geoconc(&["equiv", &back, &at(dir.path(), "fig2_E.json")]).0, 0);
    let cfg = at(dir.path(), "e.cfg.json");
    assert_eq!(geoconc(&["convert", &st, &cfg, "--to", "cfg"]).0, 0);
    let (_, v) = json(&["validate", &cfg]);
    assert_eq!(v["stable"], true);
}

#[test]
fn relations_show_concurrency() {
    let dir = exported();
    let (code, out) = geoconc(&["relations", &at(dir.path(), "fig2_E.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("a1 || b1"), "{out}");
    let (_, out) = geoconc(&["relations", &at(dir.path(), "fig2_F.json")]);
    assert!(out.contains("a1 - b1"), "{out}");
}

#[test]
fn corpus_runs_from_files() {
    let dir = exported();
    let (code, v) = json(&["corpus", "--load", dir.path().to_str().unwrap(), "--entry", "fig5"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"][0]["passed"], true);
    let (code, v) = json(&["corpus", "--run-all"]);
    assert_eq!(code, 1);
    assert_eq!(v["total"], 6);
    let failing: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["passed"] == false)
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["fig7"]);
}
