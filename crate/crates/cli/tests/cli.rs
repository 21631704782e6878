use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn trunclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trunclab")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn spectrum_dot_of_two_coordinates() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "a.json", r#"{"kind": "fin_vec", "dimension": 2}"#);
    let dot = dir.path().join("m.dot");
    let out = trunclab(&["spectrum", "--trunc", s(&t), "--dot", s(&dot), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["spectrum_elements"], 8);
    assert_eq!(r["classification"]["unital"], true);
    let text = fs::read_to_string(&dot).unwrap();
    assert_eq!(text.matches("[label=").count(), 8);
    assert_eq!(text.matches("xlabel=\"kernel\"").count(), 1);
}

#[test]
fn one_element_frame_is_a_single_node() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "empty.json", r#"{"labels": []}"#);
    let dot = dir.path().join("f.dot");
    let out = trunclab(&["frame", s(&p), "--dot", s(&dot)]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&dot).unwrap();
    assert_eq!(text.matches("[label=").count(), 1);
    assert!(!text.contains("->"));
}

#[test]
fn windowed_sequences_mark_the_cofinite_atom() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "s.json", r#"{"kind": "ev_seq", "window": 3}"#);
    let dot = dir.path().join("k.dot");
    let out = trunclab(&["kernel-frame", "--trunc", s(&t), "--dot", s(&dot), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["elements"], 16);
    let text = fs::read_to_string(&dot).unwrap();
    assert_eq!(text.matches("+cof").count(), 8);
}

#[test]
fn represent_emits_step_forms() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "a.json", r#"{"kind": "fin_vec", "unit": ["1", "1/2"], "generators": [["2", "-1/2"]]}"#);
    let out = trunclab(&["represent", "--trunc", s(&t), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let steps = r["elements"][0]["underline"].as_array().unwrap();
    let bps: Vec<&str> = steps.iter().map(|x| x["breakpoint"].as_str().unwrap()).collect();
    assert_eq!(bps, ["-1", "2"]);
    assert_eq!(steps[0]["value"], "{x1}");
    assert_eq!(r["elements"][0]["vanishes_at_point"], true);
}

#[test]
fn induce_g_for_the_coordinate_embedding() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"kind": "fin_vec", "dimension": 1}"#);
    let b = write(&dir, "b.json", r#"{"kind": "fin_vec", "dimension": 2, "generators": [["1", "0"]]}"#);
    let out = trunclab(&["induce-g", "--source", s(&a), "--target", s(&b), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["commuting_maps"], 1);
    assert_eq!(r["square_commutes"], true);
}

#[test]
fn broken_morphism_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"kind": "fin_vec", "dimension": 1}"#);
    // sending the unit to 2 breaks truncation
    let b = write(&dir, "b.json", r#"{"kind": "fin_vec", "dimension": 1, "generators": [["2"]]}"#);
    let out = trunclab(&["induce-g", "--source", s(&a), "--target", s(&b)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "bad.json", "{\"kind\":\n  \"fin_vec\",,}");
    let out = trunclab(&["spectrum", "--trunc", s(&t)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column"));
    let missing = trunclab(&["spectrum", "--trunc", s(&dir.path().join("nope.json"))]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(trunclab(&["suite", "--format", "yaml"]).status.code(), Some(2));
}

#[test]
fn mutated_truncation_fails_with_witness() {
    for m in ["zero", "identity"] {
        let out = trunclab(&["check-axioms", "--samples", "20", "--mutation", m]);
        assert_eq!(out.status.code(), Some(1), "{m}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("witness"));
    }
    assert_eq!(trunclab(&["check-axioms", "--samples", "20"]).status.code(), Some(0));
}

#[test]
fn axioms_on_a_file() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "s.json", r#"{"kind": "ev_seq", "generators": [["3", "1/2"], ["0", "5"]]}"#);
    let out = trunclab(&["check-axioms", "--trunc", s(&t), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["outcomes"].as_array().unwrap().len(), 4);
}

#[test]
fn demos() {
    let out = trunclab(&["demo", "ex1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("frame maps K A -> K B: 1"));
    assert!(text.contains("probe (1/2, 3/2)"));

    let out = trunclab(&["demo", "reflection", "--samples", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r[0]["isomorphism"], true);
    assert_eq!(r[1]["b0_adjoined"], true);
}

#[test]
fn reflect_a_file() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "s.json", r#"{"kind": "ev_seq", "window": 3}"#);
    let out = trunclab(&["reflect", "--trunc", s(&t), "--samples", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["rank_of_image"], 3);
    assert_eq!(r["b0_adjoined"], true);
}

#[test]
fn suite_report_is_deterministic_and_mutation_fails() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = trunclab(&["suite", "--samples", "8", "--seed", "3", "--format", "json", "--out", s(p)]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let bad = trunclab(&["suite", "--samples", "8", "--mutation", "identity"]);
    assert_eq!(bad.status.code(), Some(1));
}
