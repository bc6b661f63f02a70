use std::path::Path;
use std::process::{Command, Output};

fn wcmm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcmm")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gen_then_sketch() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).display().to_string();
    let report = json(&wcmm(&[
        "gen", "--rows", "8", "--inner", "40", "--cols", "6", "--blocks", "10", "--seed", "3",
        "--out-a", &p("a.crmm"), "--out-b", &p("b.csv"),
    ]));
    assert_eq!(report["tau"], 4);
    assert!(Path::new(&p("b.csv")).exists());

    let summary = json(&wcmm(&[
        "sketch", "--a", &p("a.crmm"), "--b", &p("b.csv"), "--blocks", "10", "--tasks", "4",
        "--out-c", &p("c.csv"), "--plan", &p("plan.json"),
    ]));
    assert_eq!(summary["distinct"], 4);
    let c = wcmm::io::read_matrix(Path::new(&p("c.csv"))).unwrap();
    assert_eq!(c.shape(), (8, 16));
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["distinct"].as_array().unwrap().len(), 4);
}

#[test]
fn variance_exp_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    let status = wcmm(&[
        "variance-exp", "--rows", "8", "--inner", "64", "--cols", "8", "--blocks", "16",
        "--rho", "2,4", "--trials", "3", "--output", out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "rho,tasks,mean_err_weighted,var_weighted,mean_err_uniform,var_uniform"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"workers": 12, "stragglers": 2, "blocks": 12, "inner": 24, "rhos": [3]}"#).unwrap();
    let rows = json(&wcmm(&["straggler-exp", "--config", cfg.to_str().unwrap(), "--seed", "4"]));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["tolerated"], 8);
    assert_eq!(rows[1]["recovery_threshold"], 4);
}

#[test]
fn simulate_with_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let body: String = (0..10).map(|i| format!("{}\n", 10 - i)).collect();
    std::fs::write(&trace, format!("duration\n{body}")).unwrap();
    let out = json(&wcmm(&[
        "simulate", "--workers", "10", "--stragglers", "1", "--blocks", "10", "--inner", "20",
        "--rho", "2", "--trace", trace.to_str().unwrap(),
    ]));
    // 2(s+1)-1 = 3 stragglers tolerated; the 7 fastest are workers 9..3
    assert_eq!(out["outcome"]["recovery_threshold"], 7);
    assert_eq!(out["outcome"]["completion_time"], 7.0);
    assert_eq!(out["outcome"]["responders"][0], 9);
    assert_eq!(out["trace"]["kind"], "csv");
}

#[test]
fn failures_exit_nonzero_with_error_json() {
    let out = wcmm(&["variance-exp", "--blocks", "7"]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");

    let out = wcmm(&["simulate", "--trace", "/nonexistent/trace.csv"]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
}
