//! End-to-end smoke tests of the command-line interface.

use std::process::Command;

fn menger() -> Command {
    Command::new(env!("CARGO_BIN_EXE_menger"))
}

#[test]
fn energy_subcommand_reports_converged_estimate() {
    let out = menger()
        .args([
            "energy", "--set", "E", "--family", "u", "--p", "0.5", "--budget", "low",
            "--config", "max_depth=12", "--config", "base_order=6",
        ])
        .output()
        .expect("spawn");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json output");
    let value = doc["estimate"]["value"].as_f64().expect("value");
    // U_{1/2} of the three-arm set is 6 sqrt(2)
    assert!((value - 6.0 * 2f64.sqrt()).abs() < 0.2, "value {value}");
    assert_eq!(doc["estimate"]["diverged"], serde_json::json!(false));
}

#[test]
fn energy_subcommand_rejects_bad_input() {
    let out = menger()
        .args(["energy", "--set", "nonsuch.json", "--family", "m", "--p", "2"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(1));
    let out = menger()
        .args(["energy", "--set", "E", "--family", "m", "--p=-1"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tangent_subcommand_classifies_builtin_sets() {
    // the block set at the origin takes the exact dyadic ladder: weak tangent
    let out = menger()
        .args(["tangent", "--set", "F:4"])
        .output()
        .expect("spawn");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json output");
    assert!(doc["report"]["verdict"]["Weak"].is_object(), "{doc}");

    // CSV rendering has the documented header
    let out = menger()
        .args(["tangent", "--set", "S:10", "--format", "csv"])
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("r_exp2,r_mantissa,measure_ratio,"), "{text}");
}

#[test]
fn verify_subcommand_runs_selected_claims() {
    let out = menger()
        .args([
            "verify-paper", "--only", "1,3,8", "--budget", "low", "--format", "csv",
        ])
        .env("MENGER_THREADS", "2")
        .output()
        .expect("spawn");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("id,description,"), "{text}");
    assert!(text.contains("circumradius-forms"));
    assert!(text.contains("line-distance-bound"));
    assert!(text.contains("block-separation"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("PASS: circumradius-forms"));
    assert!(!stderr.contains("FAIL"));
}

#[test]
fn table_subcommand_prints_bounds() {
    let out = menger()
        .args(["table", "--format", "csv"])
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("family,p,bound,exact"));
    assert!(text.lines().count() > 20);
}

#[test]
fn energy_subcommand_reads_json_set_files() {
    let dir = std::env::temp_dir().join("menger-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("square.json");
    let set = menger::segset::regular_polygon(4).unwrap();
    std::fs::write(&path, serde_json::to_string(&set).unwrap()).unwrap();
    let out = menger()
        .args([
            "energy", "--set", path.to_str().unwrap(), "--family", "m", "--p", "2",
            "--config", "max_depth=10", "--config", "base_order=5",
        ])
        .output()
        .expect("spawn");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json output");
    assert!(doc["estimate"]["value"].as_f64().unwrap() > 0.0);
}
