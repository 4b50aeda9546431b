use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_field-planner"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn gen_tiny(dir: &Path, name: &str, seed: &str) {
    ok(&run(
        &["gen", "--n", "3", "--pmin", "1", "--pmax", "2", "--horizon", "5", "--seed", seed, "--out", name],
        dir,
    ));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    gen_tiny(dir.path(), "a.json", "9");
    gen_tiny(dir.path(), "b.json", "9");
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    let stdout = ok(&run(&["gen", "--n", "3", "--pmin", "1", "--pmax", "2", "--horizon", "5", "--seed", "9"], dir.path()));
    assert_eq!(stdout.as_bytes(), &a[..]);
}

#[test]
fn solve_and_oracle_agree_on_bounds() {
    let dir = tempfile::tempdir().unwrap();
    gen_tiny(dir.path(), "i.json", "3");
    let solve: serde_json::Value =
        serde_json::from_str(&ok(&run(&["solve", "--instance", "i.json", "--out", "sol.json"], dir.path()))).unwrap();
    assert_eq!(solve["feasible"], true);
    assert!(dir.path().join("sol.json").exists());
    let oracle: serde_json::Value =
        serde_json::from_str(&ok(&run(&["oracle", "--instance", "i.json"], dir.path()))).unwrap();
    let a = solve["objective"].as_f64().unwrap();
    let opt = oracle["objective"].as_f64().unwrap();
    assert!(a <= opt + 1e-9, "{a} > {opt}");
    let fixed: serde_json::Value =
        serde_json::from_str(&ok(&run(&["oracle", "--instance", "i.json", "--fixed"], dir.path()))).unwrap();
    assert!(a <= fixed["objective"].as_f64().unwrap() + 1e-9);
}

#[test]
fn export_writes_lp_and_runs_solver_hook() {
    let dir = tempfile::tempdir().unwrap();
    gen_tiny(dir.path(), "i.json", "4");
    ok(&run(&["export", "--instance", "i.json", "--variant", "full", "full.lp"], dir.path()));
    let text = std::fs::read_to_string(dir.path().join("full.lp")).unwrap();
    assert!(text.starts_with("Maximize\n") && text.contains("budget:") && text.ends_with("End\n"));

    let out = ok(&run(
        &[
            "export", "--instance", "i.json", "--variant", "fixed", "fixed.lp",
            "--solver-cmd", "echo Objective: 42; echo Bound 43",
            "--bound-prefix", "Bound",
        ],
        dir.path(),
    ));
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["objective"], 42.0);
    assert_eq!(report["upper_bound"], 43.0);
    let text = std::fs::read_to_string(dir.path().join("fixed.lp")).unwrap();
    assert!(!text.contains("budget:"));
}

#[test]
fn bench_prints_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    gen_tiny(dir.path(), "i.json", "5");
    std::fs::write(
        dir.path().join("bench.json"),
        r#"{"instances": [{"file": "i.json"}, {"name": "g", "generate": {"n": 2, "p_max": 2, "horizon": 4, "seed": 1}}]}"#,
    )
    .unwrap();
    let table = ok(&run(&["bench", "bench.json", "--csv", "out.csv"], dir.path()));
    assert!(table.lines().any(|l| l.starts_with("i ")));
    assert!(table.lines().any(|l| l.starts_with("g ")));
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert!(csv.starts_with("instance,clusters,projects,obj_a,"));
    assert_eq!(csv.lines().count(), 3);

    std::fs::write(dir.path().join("empty.json"), "{}").unwrap();
    let table = ok(&run(&["bench", "empty.json"], dir.path()));
    assert_eq!(table.lines().count(), 1);
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--instance", "missing.json"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    std::fs::write(dir.path().join("bad.json"), r#"{"horizon": 2, "budget": 1, "cap": [1], "clusters": []}"#).unwrap();
    let out = run(&["solve", "--instance", "bad.json"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap length 1 != horizon 2"));

    let out = run(&["gen", "--n", "0"], dir.path());
    assert!(!out.status.success());
    let out = run(&["oracle", "--instance", "bad.json", "--rho", "2"], dir.path());
    assert!(!out.status.success());
}
