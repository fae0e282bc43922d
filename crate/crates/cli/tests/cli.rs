use std::path::Path;
use std::process::{Command, Output};

fn suprand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_suprand"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("cfg.json");
    std::fs::write(
        &path,
        r#"{"data_source": {"kind": "synthetic", "n": 2000}, "folds": 2, "draws_per_fold": 1, "forest": {"trees": 10}}"#,
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

fn treated_fraction(csv: &Path) -> f64 {
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "__treatment").unwrap();
    let d: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    d.iter().sum::<f64>() / d.len() as f64
}

#[test]
fn report_writes_all_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("out");
    let o = suprand(&["report", "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "table2.csv",
        "table3.csv",
        "table4.csv",
        "table5.csv",
        "ate_estimates.csv",
        "report.json",
        "config.json",
        "run_log.json",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let t2 = std::fs::read_to_string(out.join("table2.csv")).unwrap();
    assert!(t2.starts_with("scheme,targeted_fraction,conversion_rate\n"));
}

#[test]
fn simulate_assign_estimate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let truth = dir.path().join("truth.csv");
    let o = suprand(&["simulate", "--config", &cfg, "--seed", "4", "--out", truth.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let schema = dir.path().join("truth.schema.json");
    assert!(schema.is_file());

    // A larger table keeps the treated share tight around 0.5.
    let big = dir.path().join("big.json");
    std::fs::write(&big, r#"{"data_source": {"kind": "synthetic", "n": 40000}}"#).unwrap();
    let big_truth = dir.path().join("big.csv");
    assert!(suprand(&["simulate", "--config", big.to_str().unwrap(), "--out", big_truth.to_str().unwrap()])
        .status
        .success());
    let assigned = dir.path().join("assigned.csv");
    let o = suprand(&[
        "assign",
        "--data",
        big_truth.to_str().unwrap(),
        "--scheme",
        "full:0.5",
        "--seed",
        "1",
        "--out",
        assigned.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let share = treated_fraction(&assigned);
    assert!((share - 0.5).abs() <= 0.01, "{share}");

    let sup = dir.path().join("sup.csv");
    let o = suprand(&[
        "assign",
        "--data",
        truth.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--scheme",
        "supervised:10",
        "--out",
        sup.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let est = dir.path().join("est.json");
    let o = suprand(&[
        "estimate",
        "--data",
        sup.to_str().unwrap(),
        "--trees",
        "20",
        "--out",
        est.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&est).unwrap()).unwrap();
    assert_eq!(v["ate"].as_array().unwrap().len(), 3);
    assert_eq!(v["models"].as_array().unwrap().len(), 2);
    assert!(v["models"][0]["mae"].as_f64().is_some());
}

#[test]
fn selftest_passes() {
    let o = suprand(&["selftest"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn exit_codes_follow_error_class() {
    assert_eq!(suprand(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(suprand(&["assign", "--data", "x.csv", "--scheme", "lottery", "--out", "y.csv"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let o = suprand(&["estimate", "--data", missing.to_str().unwrap(), "--out", "e.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"folds": 1}"#).unwrap();
    let o = suprand(&["report", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
