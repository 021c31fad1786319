//! The `nsplab` front end, driven in-process and through the binary.

use std::path::PathBuf;
use std::process::Command;

use nsplab::cli::run;
use nsplab::seqcode::SeqCode;
use nsplab::with_big_stack;
use serde_json::Value;

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name).to_string_lossy().into_owned()
}

/// Runs the CLI on a large stack and returns (exit code, stdout, stderr).
fn nsplab(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("nsplab").chain(args.iter().copied()).map(String::from).collect();
    with_big_stack(move || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    })
}

fn tmp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("nsplab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn eval_min5_prints_five() {
    let (code, out, _) = nsplab(&["eval", "--lang", "pcf", "--fuel", "100", &example("min5.term")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "5");
}

#[test]
fn eval_trace_is_json_lines() {
    let f = tmp("suc.term", "(suc ((lam (x nat) x) 2))");
    let (code, out, _) = nsplab(&["eval", "--lang", "b", "--trace", &f]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.last(), Some(&"3"));
    let steps: Vec<Value> = lines[..lines.len() - 1].iter().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!steps.is_empty());
    for (i, s) in steps.iter().enumerate() {
        assert_eq!(s["step"], i + 1);
        assert!(s["rule"].is_string() && s["term"].is_string());
    }
    assert_eq!(steps[0]["rule"], "beta");
}

#[test]
fn eval_without_value_exits_one() {
    let f = tmp("loop.term", "((Y nat) (lam (b nat) b))");
    let (code, out, _) = nsplab(&["eval", "--lang", "pcf", "--fuel", "50", &f]);
    assert_eq!(code, 1);
    assert!(out.contains("fuel exhausted"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(nsplab(&["eval", "--lang", "pcf"]).0, 2);
    assert_eq!(nsplab(&["eval", "--lang", "nope", &example("min5.term")]).0, 2);
    let bad = tmp("bad.term", "(lam (x nat)");
    assert_eq!(nsplab(&["eval", "--lang", "b", &bad]).0, 2);
    assert_eq!(nsplab(&["eval", "--lang", "pcf", "--fuel", "0", &example("min5.term")]).0, 2);
    assert_eq!(nsplab(&["--help"]).0, 0);
}

#[test]
fn language_membership_is_enforced() {
    let (code, _, err) = nsplab(&["eval", "--lang", "t", &example("min5.term")]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
}

#[test]
fn translate_to_pcf_runs() {
    let f = tmp("rec.term", "((rec nat) 1 (lam (x nat) (k nat) (times x 2)) 3)");
    let (code, out, _) = nsplab(&["translate", "--from", "t", "--to", "pcf-byval", &f]);
    assert_eq!(code, 0, "{out}");
    let g = tmp("rec_pcf.term", &out);
    let (code, out, _) = nsplab(&["eval", "--lang", "pcf-byval", &g]);
    assert_eq!((code, out.trim()), (0, "8"));
    let (code, _, _) = nsplab(&["translate", "--from", "t", "--to", "w", &f]);
    assert_eq!(code, 0);
    let (code, _, _) = nsplab(&["translate", "--from", "b", "--to", "t", &f]);
    assert_eq!(code, 1);
}

#[test]
fn nsp_json_and_lwf() {
    let (code, out, _) = nsplab(&["nsp", "--denote", &example("fplus0.term"), "--depth", "3", "--branches", "2", "--json"]);
    assert_eq!(code, 0);
    let j: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(j["kind"], "procedure");
    assert_eq!(j["body"]["kind"], "case");
    assert_eq!(j["body"]["default"], "elided");
    assert_eq!(j["body"]["branches"]["0"]["value"], 1);
    assert_eq!(j["body"]["branches"]["1"]["value"], 3);
    let (code, out, _) = nsplab(&["nsp", "--denote", &example("psi_trunc2.term"), "--lwf", "3"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(r["verdict"]["CertifiedUpTo"], 3);
    let (code, out, _) = nsplab(&["nsp", "--denote", &example("g0.term")]);
    assert_eq!(code, 0);
    assert!(out.starts_with('λ'));
}

#[test]
fn barrec_root_value_and_tree() {
    let (code, out, _) =
        nsplab(&["barrec", "--flavor", "kohlenbach", "--F", &example("fplus0.term"), "--G", &example("g0.term"), "--node", ""]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    let want = SeqCode::from_u64s(&[0]).into_code() * 4u32 + 2u32;
    assert_eq!(lines.next(), Some(want.to_string().as_str()));
    assert!(lines.next().unwrap().contains("well-founded"));
}

#[test]
fn barrec_conformance_reports_violations() {
    let f = example("fplus0.term");
    let g = example("g0.term");
    let (code, out, _) = nsplab(&["barrec", "--conformance", &example("psi_trunc2.term"), "--F", &f, "--G", &g]);
    assert_eq!(code, 0, "{out}");
    let r: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(r["schema"], "nsplab.conformance/1");
    assert_eq!(r["pass"], true);
    let wrong = tmp("wrong.term", "(lam (F (-> (-> nat nat) nat)) (G (-> (-> nat nat) nat)) (x nat) 7)");
    let (code, out, _) = nsplab(&["barrec", "--conformance", &wrong, "--F", &f, "--G", &g]);
    assert_eq!(code, 1);
    let r: Value = serde_json::from_str(out.trim()).unwrap();
    let v = &r["violations"][0];
    for key in ["node", "expected", "actual"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn separate_truncated_candidate() {
    let (code, out, _) = nsplab(&["separate", "--candidate", &example("psi_trunc2.term")]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["pass"], true);
    assert_ne!(r["c"], r["K"]);
    let path = tmp("report.json", "");
    let (code, out, _) = nsplab(&["separate", "--candidate", &example("psi_trunc2.term"), "--depth-cap", "4", "--out", &path]);
    assert_eq!(code, 0);
    assert!(out.contains("pass = true"));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved["schema"], "nsplab.separation/1");
}

#[test]
fn separate_rejects_wrong_type() {
    let (code, _, err) = nsplab(&["separate", "--candidate", &example("g0.term")]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
}

#[test]
fn corpus_is_deterministic_and_checked() {
    let a = nsplab(&["corpus", "--seed", "3", "--size", "4", "--lang", "t-min"]);
    let b = nsplab(&["corpus", "--seed", "3", "--size", "4", "--lang", "t-min"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.1.matches("; nsplab corpus: seed 3, lang t-min").count(), 4);
    let (code, out, _) = nsplab(&["corpus", "--seed", "3", "--size", "4", "--lang", "w", "--check", "--fuel", "50000"]);
    assert_eq!(code, 0, "{out}");
    let suites: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(suites.len(), 3);
    assert!(suites.iter().all(|s| s["failures"].as_array().unwrap().is_empty()));
}

#[test]
fn binary_matches_in_process_run() {
    let out = Command::new(env!("CARGO_BIN_EXE_nsplab"))
        .args(["eval", "--lang", "pcf", "--fuel", "100", &example("min5.term")])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "5");
    let out = Command::new(env!("CARGO_BIN_EXE_nsplab")).arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
