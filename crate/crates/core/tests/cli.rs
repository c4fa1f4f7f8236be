//! End-to-end CLI flow: generate an eval set, run the oracle agent over it,
//! score the responses, and check the written report.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spatialgen"))
}

fn run(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_run_score_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.jsonl");
    let responses = dir.path().join("responses.jsonl");
    let report = dir.path().join("report.json");

    run(bin()
        .args(["gen-eval", "--task", "tsp", "--count", "10", "--objects", "5", "--seed", "9"])
        .arg("--out")
        .arg(dir.path()));
    assert!(manifest.exists());

    run(bin()
        .args(["run-agent", "--agent", "oracle", "--seed", "1", "--manifest"])
        .arg(&manifest)
        .arg("--out")
        .arg(&responses));

    let stdout = run(bin()
        .args(["score", "--mode", "strict", "--manifest"])
        .arg(&manifest)
        .arg("--responses")
        .arg(&responses)
        .arg("--report")
        .arg(&report));
    assert!(stdout.contains("100.0%"), "expected perfect accuracy, got:\n{stdout}");

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["correct"], 10);
    assert_eq!(rows[0]["accuracy"], 1.0);
    assert!(report.with_extension("txt").exists());
}

#[test]
fn stats_and_verify_commands() {
    let dir = tempfile::tempdir().unwrap();
    run(bin()
        .args(["gen-train", "--scenes", "3", "--seed", "5", "--no-images"])
        .arg("--out")
        .arg(dir.path()));
    let stdout = run(bin().args(["stats", "--manifest"]).arg(dir.path().join("manifest.jsonl")));
    assert!(stdout.contains("\"record_count\": 51"), "unexpected stats output:\n{stdout}");

    let verify = run(&mut bin().arg("verify"));
    assert!(verify.lines().all(|l| !l.starts_with("FAIL")), "{verify}");
}
