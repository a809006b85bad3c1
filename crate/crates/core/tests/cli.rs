use std::process::{Command, Output};

fn cellseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellseq"))
        .args(args)
        .env_remove("CELLSEQ_JOBS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn dumped_example_validates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rule.json");
    let p = path.to_str().unwrap();
    assert!(cellseq(&["example", "torus2", "--dump", p]).status.success());
    let out = cellseq(&["validate", p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["validation"]["ok"], true);
}

#[test]
fn broken_rule_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rule.json");
    let p = path.to_str().unwrap();
    assert!(cellseq(&["example", "pillow", "--dump", p]).status.success());
    let mut rule: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    rule["parent"]["f(0+,0+)"] = serde_json::Value::from("f(0+,1+)");
    std::fs::write(&path, rule.to_string()).unwrap();
    let out = cellseq(&["validate", p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("f(0+,0+)"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cellseq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cellseq(&["diagnose", "torus2", "--suite", "nope"]).status.code(), Some(2));
    let out = cellseq(&["visual", "torus2", "--lambda", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qv_suite_reports_separation_constant() {
    let out = cellseq(&["diagnose", "--suite", "qv", "torus2", "--max-level", "3"]);
    assert!(out.status.success());
    let v = json(&out)["qv"]["lambda_sep"].as_f64().unwrap();
    assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn visual_reports_finite_constant_and_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let scatter = dir.path().join("scatter.csv");
    let out = cellseq(&["visual", "torus2", "--depth", "4", "--scatter", scatter.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(json(&out)["visual"]["c_meas"].as_f64().unwrap().is_finite());
    let rows = std::fs::read_to_string(&scatter).unwrap().lines().count();
    assert_eq!(rows, 64 * 63 / 2);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (p, jobs) in [(&a, "1"), (&b, "2")] {
        let out = cellseq(&["--jobs", jobs, "--out", p.to_str().unwrap(), "diagnose", "pillow", "--suite", "bqs", "--max-level", "3"]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn export_writes_csv_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cells.csv");
    let dot = dir.path().join("graph.dot");
    assert!(cellseq(&["export", "pillow", "--level", "2", "--to", csv.to_str().unwrap()]).status.success());
    assert!(cellseq(&["export", "pillow", "--level", "1", "--format", "dot", "--to", dot.to_str().unwrap()]).status.success());
    let cells = std::fs::read_to_string(&csv).unwrap();
    assert!(cells.starts_with("index,address,dim,parent,image"));
    assert_eq!(cells.lines().count(), 1 + 130);
    assert!(std::fs::read_to_string(&dot).unwrap().contains(" -- "));
}

#[test]
fn iterate_counts_cells() {
    let out = cellseq(&["iterate", "torus2", "--level", "2"]);
    assert!(out.status.success());
    let counts = &json(&out)["counts_by_dim"];
    assert_eq!(counts[2], serde_json::json!([64, 128, 64]));
}
