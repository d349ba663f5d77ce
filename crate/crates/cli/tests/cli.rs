//! End-to-end runs of the `twilled` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn twilled(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twilled"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn emit(id: &str, params: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["-o", ".", "catalog", "emit", id];
    args.extend_from_slice(params);
    let out = twilled(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn list_names_every_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = twilled(dir.path(), &["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let ids: Vec<String> = json(&out)["report"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap().to_string())
        .collect();
    let expected: Vec<String> = twilled::catalog::list().iter().map(|(id, _)| id.to_string()).collect();
    assert_eq!(ids, expected);
}

#[test]
fn manifest_claims_exit_as_recorded() {
    for id in ["trivial-extension", "q-twilled", "rmatrix-2dim", "reynolds"] {
        let dir = emit(id, &[]);
        let m = manifest(dir.path());
        let claims = m["claims"].as_array().unwrap();
        assert!(!claims.is_empty(), "{id}");
        for claim in claims {
            let args: Vec<&str> = claim["args"]
                .as_array()
                .unwrap()
                .iter()
                .map(|a| a.as_str().unwrap())
                .collect();
            let out = twilled(dir.path(), &args);
            let want = claim["expected_exit"].as_i64().unwrap() as i32;
            assert_eq!(
                out.status.code(),
                Some(want),
                "{id}: {args:?}\n{}",
                String::from_utf8_lossy(&out.stderr)
            );
            let report = json(&out);
            assert_eq!(report["kind"], "verify");
            assert_eq!(report["report"]["holds"], claim["expect"]);
        }
    }
}

#[test]
fn matrix_units_are_associative_and_pi_is_generalized_rb() {
    let dir = emit("rmatrix-2dim", &[]);
    let d = dir.path();
    let out = twilled(d, &["check-assoc", "algebra-matrix-units.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["holds"], true);

    let out = twilled(
        d,
        &[
            "verify",
            "grb",
            "--algebra",
            "algebra-matrix-units.json",
            "--bimodule",
            "module-dual.json",
            "--op",
            "op-pi.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn non_associative_product_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    // e0 e0 = e1, e0 e1 = e0: (e0 e0) e0 = 0 but e0 (e0 e0) = e0.
    std::fs::write(
        dir.path().join("alg.json"),
        r#"{"dim": 2, "products": [[0, 0, 1, "1"], [0, 1, 0, "1"]]}"#,
    )
    .unwrap();
    let out = twilled(dir.path(), &["check-assoc", "alg.json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["report"]["holds"], false);
    assert!(!report["report"]["witness"].is_null());
}

#[test]
fn zero_twist_returns_the_input() {
    let dir = emit("q-twilled", &[]);
    let d = dir.path();
    let out = twilled(d, &["decompose", "--algebra", "algebra-T.json"]);
    assert_eq!(out.status.code(), Some(0));
    let before = json(&out)["report"].clone();

    let out = twilled(d, &["twist", "--algebra", "algebra-T.json", "--map", "op-zero.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let after = json(&out)["report"]["result"].clone();
    for part in ["mu1", "mu2", "phi1", "phi2"] {
        assert_eq!(after[part], before[part], "{part}");
    }
}

#[test]
fn bracket_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let f = twilled::Cochain::from_fn(2, 2, |o, i| {
        twilled::rational::int((o + 2 * i[0] + i[1]) as i64 % 3 - 1)
    })
    .unwrap();
    let g = twilled::Cochain::from_fn(2, 1, |o, i| twilled::rational::int(o as i64 - i[0] as i64)).unwrap();
    std::fs::write(d.join("f.json"), twilled::io::cochain_to_json(&f).to_string()).unwrap();
    std::fs::write(d.join("g.json"), twilled::io::cochain_to_json(&g).to_string()).unwrap();
    let out = twilled(d, &["bracket", "f.json", "g.json", "--split", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let got = twilled::io::cochain_from_json(&json(&out)["report"]["result"]).unwrap();
    assert_eq!(got, twilled::cochain::g_bracket(&f, &g).unwrap());
    assert!(json(&out)["report"].get("bidegree").is_some());
}

#[test]
fn malformed_input_exits_two_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.json"), r#"{"dim": 2, "products": [[0, 0, 5, "1"]]}"#).unwrap();
    let out = twilled(d, &["check-assoc", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("$.products[0][2]"), "{err}");

    std::fs::write(d.join("extra.json"), r#"{"dim": 1, "products": [], "colour": 1}"#).unwrap();
    let out = twilled(d, &["check-assoc", "extra.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.colour"));

    let out = twilled(d, &["check-assoc", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = twilled(d, &["catalog", "emit", "poly-integral", "N=99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_format_and_report_file() {
    let dir = emit("rmatrix-2dim", &[]);
    let d = dir.path();
    let out = twilled(d, &["--format", "text", "check-assoc", "algebra-matrix-units.json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("kind: check-assoc"), "{text}");
    assert!(text.contains("holds: true"), "{text}");

    let out = twilled(d, &["-o", "report.json", "check-assoc", "algebra-matrix-units.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["inputs"][0]["path"], "algebra-matrix-units.json");
    assert_eq!(report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}
