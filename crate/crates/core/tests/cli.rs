use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use diracbi::bundle::section;
use diracbi::cli::parse_instance;
use diracbi::zoo::{im_condition2_residual, ZooInstance};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diracbi"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn emit(dir: &Path, preset: &str) -> PathBuf {
    let path = dir.join(format!("{preset}.inst"));
    let o = run(&["zoo", preset, "--emit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

fn plane() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/instances/plane.inst").to_string()
}

#[test]
fn poisson_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "poisson-xy");
    let o = run(&["check", "all", f.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["seed"], 1);
    let names: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for prefix in [
        "T.la_dirac",
        "T.C.courant",
        "lie_bialgebroid.double",
        "pipeline.",
        "round_trip",
    ] {
        assert!(
            names.iter().any(|n| n.starts_with(prefix)),
            "{prefix} missing from {names:?}"
        );
    }
}

#[test]
fn nonclosed_form_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "nonclosed-zdxdy");
    let o = run(&["check", "im2form", f.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["status"], "fail");
    let c = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "im2form.condition2")
        .unwrap();
    assert_eq!(c["status"], "fail");
    let ws = c["witnesses"].as_array().unwrap();
    assert!(!ws.is_empty());

    // every witness reproduces standalone
    let text = std::fs::read_to_string(&f).unwrap();
    let inst = parse_instance("f", &text).unwrap();
    let families = inst.families();
    let [ZooInstance::Im2Form(im)] = families.as_slice() else {
        panic!("expected one IM-2-form")
    };
    let p = im.patch();
    for w in ws {
        let label = w["label"].as_str().unwrap();
        assert!(label.starts_with("IM condition (2), frame ("), "{label}");
        let idx: Vec<usize> = label
            .trim_start_matches("IM condition (2), frame (")
            .trim_end_matches(')')
            .split(',')
            .map(|s| s.parse::<usize>().unwrap() - 1)
            .collect();
        let r = im_condition2_residual(im, &section::basis(3, idx[0]), &section::basis(3, idx[1]));
        assert!(!section::is_zero(&r));
        let printed: Vec<String> = w["residual"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().to_string())
            .collect();
        assert_eq!(printed, p.show_all(&r));
    }
}

#[test]
fn ill_formed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "poisson-xy");
    let text = std::fs::read_to_string(&f).unwrap();
    let cut = text.find("row2 = ").unwrap() + "row2 = 0,".len();
    let t = dir.path().join("truncated.inst");
    std::fs::write(&t, &text[..cut]).unwrap();
    for suite in ["all", "courant", "bialgebroid"] {
        let o = run(&["check", suite, t.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&o.stderr).contains("truncated.inst:"));
    }

    let bad = dir.path().join("bad.inst");
    std::fs::write(&bad, "[patch]\ndim = 2\n[bundle.A]\nrank = 1\n[anchor.A]\nrow1 = x^\n").unwrap();
    let o = run(&["check", "all", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("bad.inst:6:") && err.contains("syntax error"), "{err}");

    let o = run(&["check", "all", dir.path().join("missing.inst").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["check", "nonsense", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["check", "iis", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "no IIS data in the file");
    let o = run(&["zoo", "no-such-preset"]);
    assert_eq!(o.status.code(), Some(2));
}

fn strip_timing(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timing_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["foliation-x", "nonclosed-zdxdy"] {
        let f = emit(dir.path(), preset);
        let a = run(&["check", "all", f.to_str().unwrap(), "--seed", "7", "--trials", "3"]);
        let b = run(&["check", "all", f.to_str().unwrap(), "--seed", "7", "--trials", "3"]);
        assert_eq!(strip_timing(&a.stdout), strip_timing(&b.stdout));
        assert!(json(&a)["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["trials"] == 3 && c["seed"] == 7));
    }
}

#[test]
fn out_flag_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["check", "dirac", &plane(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["suite"], "dirac");
    let names: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for d in ["graph_pi.", "graph_omega.", "foliation.", "pi.", "omega."] {
        assert!(names.iter().any(|n| n.starts_with(d)), "{d}");
    }

    let o = run(&["check", "bialgebroid", &plane(), "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().last().unwrap().starts_with("pass:"), "{text}");
    assert!(text.contains("PASS  cotangent.round_trip"));
}

#[test]
fn lemmas_verb() {
    let dir = tempfile::tempdir().unwrap();
    let good = emit(dir.path(), "presymplectic-dxdy");
    let o = run(&["lemmas", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["suite"], "lemmas");
    let bad = emit(dir.path(), "nonclosed-zdxdy");
    assert_eq!(run(&["lemmas", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["lemmas", &plane()]).status.code(), Some(2));
}

#[test]
fn build_manin_writes_the_courant_algebroid() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "poisson-xy");
    let out = dir.path().join("c.json");
    let o = run(&["build-manin", f.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rank = c["rank"].as_u64().unwrap() as usize;
    assert_eq!(rank, 4);
    assert_eq!(c["basis"].as_array().unwrap().len(), rank);
    assert_eq!(c["pairing"].as_array().unwrap().len(), rank);
    let bracket = c["bracket"].as_array().unwrap();
    assert_eq!(bracket.len(), rank);
    assert!(bracket.iter().all(|row| row
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v.as_array().is_some_and(|v| v.len() == rank))));
    assert!(c["admissible"].is_array() && c["graph"].is_array());

    let iis = emit(dir.path(), "foliation-x");
    let o = run(&["build-manin", iis.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c["source"], "iis");
}

#[test]
fn zoo_runs_and_lists_presets() {
    let o = run(&["zoo"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 6);
    assert_eq!(run(&["zoo", "aff1-bialgebra"]).status.code(), Some(0));
    assert_eq!(run(&["zoo", "iis-curved-negative"]).status.code(), Some(1));
}
