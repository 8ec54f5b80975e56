use std::path::Path;
use std::process::Command;

fn rirl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rirl"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn identify_run_writes_outputs_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "identify.json",
        r#"{"schema_version": 1, "kind": "identify", "d": 6, "epsilon": 0.001, "seeds": [0]}"#,
    );
    let out = dir.path().join("out");
    let status = rirl()
        .args(["identify", "--config"])
        .arg(&cfg)
        .args(["--seed-range", "0..4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("seed,d,epsilon,mistakes,bound,bound_satisfied,final_center_error\n"));
    let rounds = std::fs::read_to_string(out.join("rounds/seed_3.jsonl")).unwrap();
    assert_eq!(rounds.lines().count(), 11);
    let status = rirl().arg("check").arg("--report").arg(out.join("report.json")).status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn same_config_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "mistakes.json",
        r#"{"schema_version": 1, "kind": "mistakes", "d": 4, "epsilon": 0.1, "seeds": [1, 2, 3], "stream": "random", "rounds": 200}"#,
    );
    let mut csvs = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        let status = rirl()
            .env("RIRL_THREADS", threads)
            .args(["mistakes", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        csvs.push(std::fs::read(out.join("summary.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"schema_version": 1, "kind": "identify", "d": 6, "epsilon": 2.0, "seeds": [0]}"#,
    );
    let status = rirl().args(["identify", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
    // kind mismatch
    let cfg = write(
        dir.path(),
        "other.json",
        r#"{"schema_version": 1, "kind": "identify", "d": 6, "epsilon": 0.1, "seeds": [0]}"#,
    );
    let status = rirl().args(["mistakes", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn violated_report_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "identify.json",
        r#"{"schema_version": 1, "kind": "identify", "d": 3, "epsilon": 0.01, "seeds": [0]}"#,
    );
    let out = dir.path().join("out");
    let status = rirl().args(["identify", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let report_path = out.join("report.json");
    let mut report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    report["runs"][0]["bound_satisfied"] = serde_json::Value::Bool(false);
    std::fs::write(&report_path, report.to_string()).unwrap();
    let status = rirl().arg("check").arg("--report").arg(&report_path).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn spread_prints_the_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "spread.json",
        r#"{"schema_version": 1, "kind": "spread", "d": 2, "epsilon": 0.1, "seeds": [0],
            "features": [[0.5, 0.0], [0.0, 0.5], [-0.5, 0.0], [0.0, -0.5]]}"#,
    );
    let out = rirl().args(["spread", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.trim().strip_prefix("spread = ").unwrap().parse().unwrap();
    assert!((value - 0.5f64.sqrt()).abs() < 1e-12);
}
