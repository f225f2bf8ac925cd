mod common;

use std::collections::BTreeMap;

use common::*;
use qubo_arena::harness::{
    aggregate_curves, cell_seed, count_wins, curves_csv, ratio_table, ratios_csv, read_records,
    run_benchmark, BenchmarkPlan, Budget, CellKey, GeneratorSpec, InstanceSpec, Normalization,
    RatioValue, RecordStatus, ResultRecord, RunOptions, SolverSpec,
};
use qubo_arena::instances::write_mqlib;
use qubo_arena::RngSeed;

fn plan() -> BenchmarkPlan {
    BenchmarkPlan {
        instances: vec![
            InstanceSpec::Generated(GeneratorSpec::Sk { n: 24, seed: 1, name: None }),
            InstanceSpec::Generated(GeneratorSpec::Nae3sat { n: 24, m: 50, seed: 2, name: None }),
        ],
        solvers: vec![SolverSpec::new("sa"), SolverSpec::new("pt").with_param("replicas", 4)],
        time_budgets: vec![],
        sweep_budgets: vec![50, 200, 400],
        runs_per_point: 1,
        base_seed: 42,
    }
}

/// Records keyed by cell with the timing fields blanked.
fn canonical(records: &[ResultRecord]) -> BTreeMap<CellKey, ResultRecord> {
    records
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.elapsed = 0.0;
            r.timestamp = 0;
            (r.key(), r)
        })
        .collect()
}

#[test]
fn cardinality_and_idempotent_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.ndjson");
    let new = run_benchmark(&plan(), &out, RunOptions::default()).unwrap();
    assert_eq!(new.len(), 12);
    assert!(new.iter().all(|r| r.status == RecordStatus::Ok));
    assert_eq!(read_records(&out).unwrap().len(), 12);
    assert!(run_benchmark(&plan(), &out, RunOptions::default()).unwrap().is_empty());
    assert_eq!(read_records(&out).unwrap().len(), 12);
    let nae = new.iter().find(|r| r.instance.starts_with("nae3sat")).unwrap();
    assert_eq!(nae.clauses, Some(50));
    for r in &new {
        assert_eq!(r.seed, cell_seed(42, &r.instance, &r.solver_id, r.budget_index, r.run));
    }
}

#[test]
fn records_deterministic_across_executions() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_benchmark(&plan(), dir.path().join("a.ndjson"), RunOptions::default()).unwrap();
    let b = run_benchmark(&plan(), dir.path().join("b.ndjson"), RunOptions::default()).unwrap();
    assert_eq!(canonical(&a), canonical(&b));
}

#[test]
fn permutation_and_parallelism_invariance() {
    let dir = tempfile::tempdir().unwrap();
    let base = run_benchmark(&plan(), dir.path().join("a.ndjson"), RunOptions::default()).unwrap();
    let mut shuffled = plan();
    shuffled.instances.reverse();
    shuffled.solvers.reverse();
    let perm = run_benchmark(&shuffled, dir.path().join("b.ndjson"), RunOptions { workers: 3 }).unwrap();
    assert_eq!(canonical(&base), canonical(&perm));
    let points = |r: &[ResultRecord]| curves_csv(&aggregate_curves(r, Normalization::PerVariable).unwrap());
    let strip = |csv: String| -> Vec<String> {
        csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    assert_eq!(strip(points(&base)), strip(points(&perm)));
}

#[test]
fn resume_after_interruption() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.ndjson");
    run_benchmark(&plan(), &out, RunOptions::default()).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let kept: Vec<&str> = text.lines().take(5).collect();
    std::fs::write(&out, kept.join("\n") + "\n").unwrap();
    let new = run_benchmark(&plan(), &out, RunOptions::default()).unwrap();
    assert_eq!(new.len(), 7);
    let all = read_records(&out).unwrap();
    assert_eq!(canonical(&all).len(), 12);
}

#[test]
fn file_instances_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let sk = qubo_arena::instances::gen_sk(12, RngSeed(3)).unwrap().to_qubo();
    std::fs::write(dir.path().join("sk12.qubo"), write_mqlib(&sk, "sk12")).unwrap();
    std::fs::write(dir.path().join("broken.qubo"), "3 1\n1 9 1.0\n").unwrap();
    let plan_json = serde_json::json!({
        "instances": ["sk12.qubo", {"path": "broken.qubo"}],
        "solvers": [{"id": "sa"}, {"id": "exact"}],
        "time_budgets": [0.05],
        "runs_per_point": 1,
        "base_seed": 0
    });
    let plan_path = dir.path().join("plan.json");
    std::fs::write(&plan_path, plan_json.to_string()).unwrap();
    let plan = BenchmarkPlan::load(&plan_path).unwrap();
    let recs = run_benchmark(&plan, dir.path().join("r.ndjson"), RunOptions::default()).unwrap();
    assert_eq!(recs.len(), 4);
    for r in &recs {
        if r.instance == "broken" {
            assert_eq!(r.status, RecordStatus::Failed);
            assert!(r.error.is_some());
        } else {
            assert_eq!(r.status, RecordStatus::Ok, "{r:?}");
            assert_eq!(r.budget, Budget::Time(0.05));
        }
    }
    let ex = recs.iter().find(|r| r.instance == "sk12" && r.solver_id == "exact").unwrap();
    let sa = recs.iter().find(|r| r.instance == "sk12" && r.solver_id == "sa").unwrap();
    assert!(ex.best_energy.unwrap() <= sa.best_energy.unwrap() + 1e-9);
}

#[test]
fn invalid_plans_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.ndjson");
    let mut p = plan();
    p.instances.clear();
    assert!(run_benchmark(&p, &out, RunOptions::default()).is_err());
    let mut p = plan();
    p.solvers.push(SolverSpec::new("sa"));
    assert!(run_benchmark(&p, &out, RunOptions::default()).is_err());
    let mut p = plan();
    p.solvers = vec![SolverSpec::new("hss")];
    assert!(run_benchmark(&p, &out, RunOptions::default()).is_err());
    assert!(!out.exists());
}

#[test]
fn win_fixture_grid() {
    let table = count_wins(&win_fixture(), None).unwrap();
    assert_eq!(table.solvers, ["a", "b", "c"]);
    for s in 0..3 {
        for d in 0..3 {
            assert_eq!(table.cells[s][d], WIN_GRID[s][d].to_vec(), "cell ({s},{d})");
        }
    }
    for k in 0..3 {
        assert_eq!(table.total(k), WIN_TOTALS[k]);
        let by_rows: u32 = (0..3).map(|d| table.density_total(d, k)).sum();
        let by_cols: u32 = (0..3).map(|s| table.size_total(s, k)).sum();
        assert_eq!(by_rows, WIN_TOTALS[k]);
        assert_eq!(by_cols, WIN_TOTALS[k]);
    }
    let text = table.render();
    let total_line = text.lines().find(|l| l.starts_with("Total")).unwrap();
    assert!(total_line.trim_end().ends_with("5   4   3"), "{total_line}");
}

#[test]
fn ratio_and_curves() {
    let recs = vec![
        record("g000989", "sa", 0, -2319.0, 2319, 0.00086),
        record("g000989", "hss", 0, -2322.0, 2319, 0.00086),
    ];
    let csv = ratios_csv(&ratio_table(&recs, None));
    assert!(csv.contains("g000989,hss,1.0,true"), "{csv}");
    assert!(csv.contains("g000989,sa,0.998708,false"), "{csv}");

    let zero = vec![record("z", "a", 0, 0.0, 10, 0.5), record("z", "b", 0, 3.0, 10, 0.5)];
    let t = ratio_table(&zero, None);
    let b = t.iter().find(|e| e.solver == "b").unwrap();
    assert!(matches!(b.value, RatioValue::Gap(g) if g == 3.0));

    let mut c = vec![record("x", "sa", 0, 10.0, 100, 0.1), record("y", "sa", 0, 14.0, 100, 0.1)];
    c[1].run = 1;
    let pts = aggregate_curves(&c, Normalization::PerVariable).unwrap();
    assert!((pts[0].mean - 0.12).abs() < 1e-12 && (pts[0].std - 0.02).abs() < 1e-12);
    assert!(aggregate_curves(&c, Normalization::PerClause).is_err());
}
