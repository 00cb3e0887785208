//! End-to-end tests of the command line: byte determinism of the emitted
//! reports (the last acceptance criterion), the documented exit-code
//! contract, and file round-trips.

use std::path::Path;
use std::process::{Command, Output};

use oapcert_core::partition::PartitionSet;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oapcert"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Criterion 11: two identical certification invocations produce
/// byte-identical JSON and CSV report files.
#[test]
fn criterion_11_reports_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let prefix = dir.path().join(format!("run-{tag}"));
        let out = run(&[
            "verify",
            "--n-max",
            "6",
            "--strategy",
            "greedy",
            "--seed",
            "7",
            "--format",
            "none",
            "--out",
            prefix.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
        outputs.push((
            read(&prefix.with_extension("json")),
            read(&prefix.with_extension("csv")),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "JSON reports differ");
    assert_eq!(outputs[0].1, outputs[1].1, "CSV reports differ");

    // The JSON is well-formed, versioned, and records a passing run.
    let report: serde_json::Value = serde_json::from_slice(&outputs[0].0).unwrap();
    assert_eq!(report["format"], "certification-report/v1");
    assert_eq!(report["passed"], true);
    assert!(report["tool_version"].as_str().is_some_and(|v| !v.is_empty()));
    println!(
        "ACCEPTANCE 11: PASS — two identical runs emitted byte-identical \
         reports ({} bytes JSON, {} bytes CSV)",
        outputs[0].0.len(),
        outputs[0].1.len()
    );
}

#[test]
fn generated_partition_files_are_deterministic_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = dir.path().join("p1.txt");
    let f2 = dir.path().join("p2.txt");
    for f in [&f1, &f2] {
        let out = run(&[
            "gen-partitions",
            "--n-max",
            "9",
            "--strategy",
            "greedy",
            "--seed",
            "3",
            "--out",
            f.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read(&f1), read(&f2), "partition files differ");

    // A 9-level file carries enough look-ahead to certify through level 6.
    let out = run(&[
        "verify",
        "--n-max",
        "6",
        "--partitions",
        f1.to_str().unwrap(),
        "--format",
        "none",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn tampered_partition_file_fails_certification() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    let out = run(&[
        "gen-partitions",
        "--n-max",
        "9",
        "--strategy",
        "greedy",
        "--seed",
        "0",
        "--out",
        good.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    // Parse-preserving corruption: merge the first two grouping blocks of
    // level 4. The file still loads; certification must reject it.
    let mut parts = PartitionSet::load(&good).unwrap();
    let lvl = parts.levels.iter_mut().find(|p| p.n == 4).unwrap();
    let moved = lvl.nabla.remove(1);
    lvl.nabla[0].extend(moved);
    lvl.nabla[0].sort_unstable();
    let bad = dir.path().join("bad.txt");
    parts.save(&bad).unwrap();

    let out = run(&[
        "verify",
        "--n-max",
        "6",
        "--partitions",
        bad.to_str().unwrap(),
        "--format",
        "none",
    ]);
    assert_eq!(code(&out), 1, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("certification FAILED"), "stderr: {err}");
    assert!(err.contains("partition.level(4)"), "stderr: {err}");
}

#[test]
fn invalid_strategy_is_a_usage_error() {
    let out = run(&["verify", "--strategy", "bogus"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn singleton_generation_stops_at_the_growth_floor() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.txt");
    let out = run(&[
        "gen-partitions",
        "--n-max",
        "17",
        "--strategy",
        "singleton",
        "--out",
        f.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(!f.exists(), "no file should be written on failure");
}

#[test]
fn sampling_reports_ratios_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("samples.json");
    let out = run(&[
        "sample",
        "--strategy",
        "greedy",
        "--seed",
        "1",
        "--level",
        "9",
        "--max-blocks",
        "3",
        "--samples",
        "50",
        "--dim",
        "3",
        "--format",
        "json",
        "--out",
        f.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&read(&f)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row["within_bound"], true);
        assert_eq!(row["bound"], "1.80000000000000e1");
        assert!(row["max_ratio"].as_str().is_some());
    }
}

#[test]
fn explicit_non_block_is_an_input_error() {
    let out = run(&["sample", "--level", "5", "--block", "40,41", "--samples", "5"]);
    assert_eq!(code(&out), 2, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn explicit_real_block_samples_cleanly() {
    let out = run(&["sample", "--level", "5", "--block", "40", "--samples", "20", "--dim", "2"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
}
