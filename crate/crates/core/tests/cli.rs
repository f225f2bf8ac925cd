mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_qubo-arena");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("QUBO_ARENA_WORKERS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_writes_instance_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.qubo");
    let o = run(&["gen", "nae3sat", "--n", "8192", "--m", "17285", "--seed", "7", "--out", p(&a)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("seed=7"), "{stderr}");
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.qubo.meta.json")).unwrap()).unwrap();
    let ratio = meta["params"]["m"].as_f64().unwrap() / meta["n"].as_f64().unwrap();
    assert!((ratio - 2.11).abs() < 1e-3, "{ratio}");

    let b = dir.path().join("b.qubo");
    run(&["gen", "nae3sat", "--n", "8192", "--m", "17285", "--seed", "7", "--out", p(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn gen_sk_to_stdout() {
    let o = run(&["gen", "sk", "--n", "2", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let (q, _) = qubo_arena::instances::parse_mqlib(&text).unwrap();
    assert_eq!(q.to_ising().couplings().len(), 1);
    assert_eq!(code(&run(&["gen", "sk", "--n", "1", "--seed", "1"])), 1);
    assert_eq!(code(&run(&["gen", "nae3sat", "--n", "2", "--m", "1", "--seed", "1"])), 1);
}

#[test]
fn solve_contract() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.qubo");
    std::fs::write(&one, "1 1\n1 1 2.5\n").unwrap();
    let o = run(&["solve", "--solver", "sa", "--input", p(&one), "--sweeps", "10", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["best_energy"], 0.0);

    let nae = dir.path().join("nae.qubo");
    run(&["gen", "nae3sat", "--n", "12", "--m", "14", "--seed", "3", "--out", p(&nae)]);
    let ex = stdout_json(&run(&["solve", "--solver", "exact", "--input", p(&nae)]));
    assert_eq!(ex["best_energy"], 0.0);
    let traj = dir.path().join("t.csv");
    let args = ["solve", "--solver", "sa", "--input", p(&nae), "--sweeps", "500", "--seed", "5", "--trajectory-out", p(&traj)];
    let mut a = stdout_json(&run(&args));
    let mut b = stdout_json(&run(&args));
    assert_eq!(a["best_energy"], 0.0);
    a.as_object_mut().unwrap().remove("elapsed");
    b.as_object_mut().unwrap().remove("elapsed");
    assert_eq!(a, b);
    let csv = std::fs::read_to_string(&traj).unwrap();
    assert!(csv.starts_with("elapsed,best_energy\n"));

    let big = dir.path().join("big.qubo");
    run(&["gen", "sk", "--n", "25", "--seed", "1", "--out", p(&big)]);
    assert_eq!(code(&run(&["solve", "--solver", "exact", "--input", p(&big)])), 2);
    assert_eq!(code(&run(&["solve", "--solver", "hss", "--input", p(&big), "--sweeps", "5"])), 1);
    assert_eq!(code(&run(&["solve", "--solver", "sa", "--input", p(&big)])), 1);
    assert_eq!(code(&run(&["solve", "--solver", "sa", "--input", p(&big), "--sweeps", "5", "--time-limit", "1"])), 1);
    assert_eq!(code(&run(&["solve", "--solver", "sa", "--input", "/nonexistent", "--sweeps", "5"])), 2);
    assert_eq!(code(&run(&["solve", "--solver", "sa", "--input", p(&big), "--sweeps", "5", "--param", "nope=1"])), 1);
}

#[test]
fn bench_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{"instances":[{"generator":"nae3sat","n":16,"m":30,"seed":1}],
            "solvers":[{"id":"sa"},{"id":"sb"}],
            "time_budgets":[],"sweep_budgets":[100],"runs_per_point":2,"base_seed":3}"#,
    )
    .unwrap();
    let o = run(&["bench", "--plan", p(&plan)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("base_seed=3"));
    let records = dir.path().join("plan.records.ndjson");
    assert_eq!(stdout_json(&o)["new_records"], 4);
    assert_eq!(stdout_json(&run(&["bench", "--plan", p(&plan), "--workers", "2"]))["new_records"], 0);

    let o = run(&["report", "curves", "--records", p(&records), "--normalize", "clauses"]);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("solver,budget,mean,std,n"));
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(code(&run(&["report", "wins", "--records", p(&records)])), 0);
    assert_eq!(code(&run(&["report", "wins", "--records", p(&dir.path().join("missing"))])), 1);

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"instances":[],"solvers":[],"time_budgets":[],"runs_per_point":1,"base_seed":0}"#).unwrap();
    let out = dir.path().join("empty.ndjson");
    assert_eq!(code(&run(&["bench", "--plan", p(&empty), "--out", p(&out)])), 1);
    assert!(!out.exists());
}

fn write_records(path: &Path, recs: &[qubo_arena::harness::ResultRecord]) {
    let lines: Vec<String> = recs.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
    std::fs::write(path, lines.join("\n") + "\n").unwrap();
}

#[test]
fn report_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.ndjson");
    write_records(&r, &[
        common::record("g000989", "sa", 0, -2319.0, 2319, 0.00086),
        common::record("g000989", "best", 0, -2322.0, 2319, 0.00086),
    ]);
    let o = run(&["report", "ratios", "--records", p(&r)]);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains(",1.0,") && out.contains(",0.998708,"), "{out}");

    let w = dir.path().join("w.ndjson");
    write_records(&w, &common::win_fixture());
    let o = run(&["report", "wins", "--records", p(&w)]);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<u32>> = text
        .lines()
        .filter(|l| ["Sparse", "Medium", "Dense", "Total"].iter().any(|k| l.starts_with(k)))
        .map(|l| l.split(|c: char| !c.is_ascii_digit()).filter(|t| !t.is_empty()).map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for col in 0..12 {
        let sum: u32 = rows[..3].iter().map(|r| r[col]).sum();
        assert_eq!(sum, rows[3][col], "column {col}\n{text}");
    }
    assert_eq!(&rows[3][9..], &common::WIN_TOTALS);
}

#[test]
fn help_and_usage() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["solve", "--help"])), 0);
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["gen", "sk", "--n", "x", "--seed", "1"])), 1);
}
