//! Golden JSON outputs and exit codes of the `drwitt` binary.
//!
//! `DRWITT_BLESS=1 cargo test -p drwitt-cli` rewrites the golden files.

use std::path::{Path, PathBuf};
use std::process::Command;

use drwitt_cli::{RunManifest, SCHEMA_VERSION};
use serde_json::Value;

fn here() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn drwitt(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_drwitt"))
        .args(args)
        .current_dir(here().join("fixtures"))
        .env_remove("DRWITT_PRECISION_GUARD")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn golden(name: &str, args: &[&str], code: i32) -> Value {
    let (got, stdout, stderr) = drwitt(args);
    assert_eq!(got, code, "{args:?}: {stderr}");
    let path = here().join(format!("golden/v{SCHEMA_VERSION}/{name}.json"));
    if std::env::var("DRWITT_BLESS").is_ok() {
        std::fs::write(&path, &stdout).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(stdout, want, "{name} drifted from its golden file");
    serde_json::from_str(&stdout).unwrap()
}

#[test]
fn kpredict_for_f_p() {
    let v = golden("kpredict_fp", &["kpredict", "--ring", "fp.ring", "--range", "0..5", "--modp", "2", "--json"], 0);
    assert_eq!(v["schema_version"], 1);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0]["text"], "Z/3^2");
    assert!(rows[2..].iter().all(|r| r["text"] == "0" || r["modulus"] == "Z_p" && r["degree"] == 0));
    assert!(rows.iter().all(|r| r["stable"] == true));
    assert_eq!(v["result"]["log_forms_agree"], true);
}

#[test]
fn kpredict_perfection_and_caveats() {
    let v = golden("kpredict_perf", &["kpredict", "--ring", "perf_f2x.ring", "--range", "0..2", "--modp", "2", "--json"], 0);
    assert_eq!(v["result"]["hiller"], true);
    let (code, out, _) = drwitt(&["kpredict", "--ring", "f2x.ring", "--range", "0..1", "--modp", "1", "--markdown"]);
    assert_eq!(code, 0);
    assert!(out.contains("not local"));
    let (code, _, err) = drwitt(&["kpredict", "--ring", "dual_numbers.ring", "--range", "0..1", "--modp", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("not of local type"));
}

#[test]
fn fundamental_sequence_check() {
    let v = golden(
        "fundamental_fp",
        &["check", "fundamental-seq", "--ring", "fp.ring", "--twist", "1", "--modp", "2", "--json"],
        0,
    );
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["result"]["verdict"], "equal");
}

#[test]
fn syntomic_weight_zero_of_f_p() {
    let v = golden("syntomic_fp", &["syntomic", "--ring", "fp.ring", "--twist", "0", "--modp", "2", "--json"], 0);
    let h = v["result"]["cohomology"].as_array().unwrap();
    assert_eq!(h[0]["text"], "Z/3^2");
    assert_eq!(h[1]["text"], "Z/3^2");
}

#[test]
fn two_column_report() {
    let v = golden("specseq_two_column", &["specseq", "run", "--input", "two_column.json", "--json"], 0);
    let s = &v["result"]["short_exact"][0];
    assert_eq!(s["left"], "Z/2");
    assert_eq!(s["middle"], "Z/2^2");
    assert_eq!(s["orders_match"], true);
}

#[test]
fn three_rows_are_reported_not_extracted() {
    let v = golden("specseq_three_rows", &["specseq", "run", "--input", "three_rows.json", "--json"], 0);
    assert!(v["result"]["short_exact"].is_null());
}

#[test]
fn logforms_of_the_torus() {
    let v = golden("logforms_laurent", &["logforms", "--ring", "f2x_laurent.ring", "--deg", "1", "--modp", "2", "--json"], 0);
    assert_eq!(v["result"]["log_forms"]["text"], "Z/2^2");
}

#[test]
fn drw_and_derham_tables() {
    let v = golden(
        "drw_f2x",
        &["drw", "table", "--ring", "f2x.ring", "--level", "2", "--weight-cap", "2", "--json"],
        0,
    );
    assert!(v["result"]["rows"].as_array().unwrap().iter().all(|r| r["stable"] == true));
    golden("derham_f2x", &["derham", "table", "--ring", "f2x.ring", "--weight-cap", "4", "--json"], 0);
    let (code, out, _) = drwitt(&["drw", "table", "--ring", "f2x.ring", "--level", "1", "--weight-cap", "1", "--operators", "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(!v["result"]["operators"].as_array().unwrap().is_empty());
}

#[test]
fn witt_verbs() {
    let v = golden("witt_mul", &["witt", "mul", "--p", "2", "--len", "3", "--ring", "f2x.ring", "x,1,0", "x,0,1", "--json"], 0);
    assert_eq!(v["result"]["components"][0], "x^2");
    let (_, out, _) = drwitt(&["witt", "ghost", "--p", "3", "--len", "3", "1,2,3"]);
    assert_eq!(out.trim(), "[1, 7, 52]");
    let (code, out, _) = drwitt(&["witt", "ghost", "--p", "5", "--len", "3", "--check", "50", "--seed", "11"]);
    assert_eq!(code, 0);
    assert!(out.contains("0 mismatches"));
    let (code, _, err) = drwitt(&["witt", "add", "--p", "3", "--len", "2", "1,0", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("expected 2 components"));
}

#[test]
fn check_failures_exit_with_two() {
    let v = golden("cartier_dual_numbers", &["cartier-check", "--ring", "dual_numbers.ring", "--weight-cap", "4", "--json"], 2);
    assert_eq!(v["result"]["passed"], false);
    assert!(!v["result"]["witnesses"].as_array().unwrap().is_empty());
    let (code, _, _) = drwitt(&["cartier-check", "--ring", "f2x.ring"]);
    assert_eq!(code, 0);
}

#[test]
fn errors_exit_with_one() {
    let (code, _, err) = drwitt(&["syntomic", "--ring", "missing.ring", "--twist", "0", "--modp", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"));
    let (code, _, _) = drwitt(&["no-such-verb"]);
    assert_eq!(code, 1);
    let out = Command::new(env!("CARGO_BIN_EXE_drwitt"))
        .args(["syntomic", "--ring", "fp.ring", "--twist", "0", "--modp", "1"])
        .current_dir(here().join("fixtures"))
        .env("DRWITT_PRECISION_GUARD", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn nygaard_checks() {
    let (code, out, _) = drwitt(&["check", "nygaard-graded", "--ring", "f2x.ring", "--twist", "1", "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["passed"], true);
    let (code, _, _) = drwitt(&["check", "nygaard-complete", "--ring", "f2x.ring", "--twist", "3", "--weight-cap", "4"]);
    assert_eq!(code, 0);
}

#[test]
fn guard_band_reaches_the_computation() {
    let out = Command::new(env!("CARGO_BIN_EXE_drwitt"))
        .args(["syntomic", "--ring", "fp.ring", "--twist", "0", "--modp", "1", "--json"])
        .current_dir(here().join("fixtures"))
        .env("DRWITT_PRECISION_GUARD", "5")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["precision"], 6);
}

#[test]
fn manifests_replay_byte_for_byte() {
    let dir = std::env::temp_dir().join(format!("drwitt-manifest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.json");
    let p = path.to_str().unwrap();
    let (code, first, _) = drwitt(&["kpredict", "--ring", "f4.ring", "--range", "0..3", "--modp", "2", "--json", "--manifest", p]);
    assert_eq!(code, 0);
    let m = RunManifest::read(&path).unwrap();
    assert!(m.matches(&first));
    assert_eq!(m.precision_guard, 2);
    assert!(m.ring_spec_sha256.is_some());
    assert!(!m.command.iter().any(|a| a.contains("manifest")));
    let args: Vec<&str> = m.command.iter().map(|s| s.as_str()).collect();
    let (_, again, _) = drwitt(&args);
    assert!(m.matches(&again));
    std::fs::remove_dir_all(&dir).ok();
}
