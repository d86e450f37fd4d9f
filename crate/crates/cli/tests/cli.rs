use std::process::Command;

use serde_json::Value;

fn kf(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kf")).args(args).output().expect("spawn kf");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout).unwrap_or_else(|e| panic!("bad report json ({e}): {stdout}"))
}

#[test]
fn sklyanin_passes_everything() {
    let (code, out, err) = kf(&[
        "analyze",
        "--catalog",
        "sklyanin3:p=1/2,q=2",
        "--check",
        "preregular,3regular,koszul,gorenstein",
        "--max-degree",
        "7",
        "--emit",
        "json",
    ]);
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    assert_eq!(r["schema"], "kf/1");
    assert_eq!(r["passed"], true);
    for c in ["preregular", "3regular", "koszul", "gorenstein"] {
        assert_eq!(r["checks"][c]["passed"], true, "{c}");
    }
    assert_eq!(r["checks"]["preregular"]["details"]["q_matches_catalog"], true);
}

#[test]
fn counterexample_reports_position_two() {
    let (code, out, _) = kf(&["analyze", "--catalog", "counterexample_d", "--check", "gorenstein", "--hypothesis", "D=3", "--emit", "json"]);
    assert_eq!(code, 1);
    let r = json(&out);
    let w = &r["checks"]["gorenstein"]["details"]["witness"];
    assert_eq!(w["position"], 2);
    assert!(w["vector"].as_array().is_some_and(|v| !v.is_empty()));
    let (code, _, _) = kf(&["analyze", "--catalog", "counterexample_d", "--check", "gorenstein", "--hypothesis", "D=3", "--report-only"]);
    assert_eq!(code, 0);
}

#[test]
fn degenerate_form_fails_with_slot_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("degenerate.json");
    std::fs::write(&path, r#"{"schema":"kf/1","g":2,"m":2,"entries":[[[1,1],"1"]]}"#).unwrap();
    let (code, out, _) = kf(&["analyze", "--input", path.to_str().unwrap(), "--check", "preregular", "--emit", "json"]);
    assert_eq!(code, 1);
    let r = json(&out);
    let d = &r["checks"]["preregular"]["details"];
    assert_eq!(d["condition"], "FirstSlot");
    assert_eq!(d["slot_witness"], serde_json::json!(["0", "1"]));
}

#[test]
fn parse_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"schema\": \"kf/1\",\n  \"g\": 2,,\n}").unwrap();
    let (code, _, err) = kf(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(kf(&["analyze", "--catalog", "no_such_entry"]).0, 2);
    assert_eq!(kf(&["analyze", "--catalog", "sklyanin3", "--check", "bogus"]).0, 2);
    assert_eq!(kf(&["analyze", "--catalog", "sklyanin3", "--field", "fp:12"]).0, 2);
    assert_eq!(kf(&["analyze"]).0, 2);
}

#[test]
fn gorenstein_needs_shape_hypotheses_for_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sk.json");
    let (_, exported, _) = kf(&["export", "--catalog", "sklyanin3"]);
    std::fs::write(&path, exported).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(kf(&["analyze", "--input", p, "--check", "gorenstein"]).0, 2);
    assert_eq!(kf(&["analyze", "--input", p, "--check", "gorenstein", "--hypothesis", "N=2,D=3"]).0, 0);
}

#[test]
fn budget_exhaustion_exits_three() {
    let (code, _, err) = kf(&["analyze", "--catalog", "yang_mills", "--check", "koszul", "--max-degree", "10", "--budget-mb", "1"]);
    assert_eq!(code, 3, "{err}");
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn reports_are_deterministic() {
    let args = ["analyze", "--catalog", "qdef3", "--check", "preregular,koszul,gorenstein,frobenius,orbit", "--emit", "json"];
    let a = without_timings(json(&kf(&args).1));
    let b = without_timings(json(&kf(&args).1));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn exported_files_reanalyze_identically() {
    let dir = tempfile::tempdir().unwrap();
    for (entry, extra) in [("yang_mills", vec![]), ("self_duality", vec![]), ("manin_plane:q=3", vec!["--presentation"])] {
        let path = dir.path().join("out.json");
        let mut args = vec!["export", "--catalog", entry, "--output", path.to_str().unwrap()];
        args.extend(extra);
        assert_eq!(kf(&args).0, 0);
        let (_, from_file, _) = kf(&["analyze", "--input", path.to_str().unwrap(), "--check", "koszul", "--emit", "json"]);
        let (_, from_catalog, _) = kf(&["analyze", "--catalog", entry, "--check", "koszul", "--emit", "json"]);
        let (a, b) = (json(&from_file), json(&from_catalog));
        assert_eq!(a["checks"], b["checks"], "{entry}");
    }
}

#[test]
fn hecke_flip_and_standard_solutions() {
    let (code, out, err) = kf(&["hecke", "--B", "0,1;-1,0", "--standard-q", "1", "--emit", "json"]);
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    assert_eq!(r["cases"][0]["report"]["is_flip"], true);

    let (code, out, _) = kf(&["hecke", "--B", "1,2;3,5", "--field", "fp:101", "--emit", "json"]);
    let r = json(&out);
    if code == 0 {
        assert!(r["cases"].as_array().unwrap().iter().all(|c| c["report"]["yang_baxter"] == true));
    } else {
        assert!(r["error"].is_string());
    }

    // tr(B⁻¹Bᵗ) = 4 = −3, and x² − 3x + 1 has no roots mod 7
    let (code, out, _) = kf(&["hecke", "--B", "1,1;3,1", "--field", "fp:7"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"), "{out}");
}

#[test]
fn catalog_listing() {
    let (code, out, _) = kf(&["catalog", "list", "--emit", "json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 14);
    let (code, text, _) = kf(&["catalog", "list"]);
    assert_eq!(code, 0);
    assert!(text.contains("typeE") && text.contains("fp:19"));
}

#[test]
fn all_checks_on_extended_sklyanin() {
    let (code, out, err) = kf(&["analyze", "--catalog", "extended_sklyanin", "--check", "preregular,koszul,volume-cycle,orbit", "--max-degree", "4", "--emit", "json"]);
    assert_eq!(code, 0, "{err}\n{out}");
}
