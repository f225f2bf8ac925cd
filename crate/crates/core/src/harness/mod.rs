//! Benchmark orchestration and reports.
//!
//! [`run_benchmark`] executes every `(instance, solver, budget, run)` cell of a
//! [`BenchmarkPlan`] as an independent seeded run and appends one
//! [`ResultRecord`] per cell to an NDJSON file. Cells already present in the
//! file are skipped, so an interrupted plan can simply be re-run.

mod plan;
mod report;

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{DensityClass, SizeClass};
use crate::solvers::{solve, SolverBudget};

pub use plan::{
    cell_seed, BenchmarkPlan, Budget, GeneratorSpec, InstanceSpec, LoadedInstance, SolverSpec,
};
pub use report::{
    aggregate_curves, count_wins, curves_csv, ratio_table, ratios_csv, render_ratio_table,
    CurvePoint, Normalization, RatioEntry, RatioValue, WinTable, TIE_TOLERANCE,
};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Ok,
    /// The solver stopped early; `best_energy` is the best found before that.
    Aborted,
    /// No result: instance load or solver setup failed.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub instance: String,
    pub solver_id: String,
    pub budget: Budget,
    pub budget_index: usize,
    pub run: usize,
    pub seed: u64,
    pub status: RecordStatus,
    pub best_energy: Option<f64>,
    pub elapsed: f64,
    pub sweeps_done: u64,
    pub n_vars: usize,
    pub density: f64,
    pub size_class: SizeClass,
    pub density_class: DensityClass,
    #[serde(default)]
    pub clauses: Option<usize>,
    #[serde(default)]
    pub error: Option<String>,
    #[serde(default)]
    pub warning: Option<String>,
    /// Milliseconds since the Unix epoch at completion.
    pub timestamp: u64,
}

impl ResultRecord {
    pub fn key(&self) -> CellKey {
        CellKey {
            instance: self.instance.clone(),
            solver: self.solver_id.clone(),
            budget_index: self.budget_index,
            run: self.run,
        }
    }

    /// Energy usable for reports (completed or aborted-with-result runs).
    pub fn energy(&self) -> Option<f64> {
        match self.status {
            RecordStatus::Failed => None,
            _ => self.best_energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub instance: String,
    pub solver: String,
    pub budget_index: usize,
    pub run: usize,
}

/// Reads an NDJSON record file; blank lines are ignored.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ResultRecord>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1 }
    }
}

struct Cell<'a> {
    instance: usize,
    solver: &'a SolverSpec,
    budget_index: usize,
    budget: Budget,
    run: usize,
}

fn now_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

/// Runs all cells missing from `records_path` and returns the new records in
/// completion order. Records are appended and flushed one at a time.
pub fn run_benchmark(
    plan: &BenchmarkPlan,
    records_path: impl AsRef<Path>,
    options: RunOptions,
) -> Result<Vec<ResultRecord>> {
    plan.validate()?;
    let records_path = records_path.as_ref();
    let done: HashSet<CellKey> = if records_path.exists() {
        read_records(records_path)?.iter().map(ResultRecord::key).collect()
    } else {
        HashSet::new()
    };

    let names: Vec<String> = plan.instances.iter().map(InstanceSpec::name).collect();
    let budgets = plan.budgets();
    let mut cells = Vec::new();
    for (ii, name) in names.iter().enumerate() {
        for solver in &plan.solvers {
            for (bi, &budget) in budgets.iter().enumerate() {
                for run in 0..plan.runs_per_point {
                    let key = CellKey {
                        instance: name.clone(),
                        solver: solver.label().to_string(),
                        budget_index: bi,
                        run,
                    };
                    if !done.contains(&key) {
                        cells.push(Cell { instance: ii, solver, budget_index: bi, budget, run });
                    }
                }
            }
        }
    }
    if cells.is_empty() {
        return Ok(Vec::new());
    }

    // Load only instances that still have pending cells.
    let needed: HashSet<usize> = cells.iter().map(|c| c.instance).collect();
    let loaded: Vec<Option<std::result::Result<LoadedInstance, String>>> = plan
        .instances
        .iter()
        .enumerate()
        .map(|(i, spec)| needed.contains(&i).then(|| spec.load().map_err(|e| e.to_string())))
        .collect();

    let mut file = OpenOptions::new().create(true).append(true).open(records_path)?;
    let next = AtomicUsize::new(0);
    let workers = options.workers.max(1).min(cells.len());
    let (tx, rx) = mpsc::channel::<ResultRecord>();
    let mut written = Vec::with_capacity(cells.len());

    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (cells, loaded, names, next) = (&cells, &loaded, &names, &next);
            scope.spawn(move || loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                let Some(cell) = cells.get(idx) else { break };
                let instance = loaded[cell.instance].as_ref().expect("loaded");
                let record = execute_cell(plan, cell, &names[cell.instance], instance);
                if tx.send(record).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for record in rx {
            let mut line = serde_json::to_string(&record)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.flush()?;
            written.push(record);
        }
        Ok(())
    })?;
    Ok(written)
}

fn execute_cell(
    plan: &BenchmarkPlan,
    cell: &Cell<'_>,
    name: &str,
    instance: &std::result::Result<LoadedInstance, String>,
) -> ResultRecord {
    let label = cell.solver.label();
    let seed = cell_seed(plan.base_seed, name, label, cell.budget_index, cell.run);
    let mut record = ResultRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        instance: name.to_string(),
        solver_id: label.to_string(),
        budget: cell.budget,
        budget_index: cell.budget_index,
        run: cell.run,
        seed,
        status: RecordStatus::Failed,
        best_energy: None,
        elapsed: 0.0,
        sweeps_done: 0,
        n_vars: 0,
        density: 0.0,
        size_class: SizeClass::OutOfRange,
        density_class: DensityClass::Sparse,
        clauses: None,
        error: None,
        warning: None,
        timestamp: 0,
    };
    let inst = match instance {
        Ok(inst) => inst,
        Err(e) => {
            record.error = Some(format!("instance load failed: {e}"));
            record.timestamp = now_millis();
            return record;
        }
    };
    record.n_vars = inst.meta.n;
    record.density = inst.meta.density;
    record.size_class = inst.meta.size_class;
    record.density_class = inst.meta.density_class;
    record.clauses = inst.clauses;

    let budget = match cell.budget {
        Budget::Time(s) => SolverBudget::seconds(s, seed),
        Budget::Sweeps(k) => SolverBudget::sweeps(k, seed),
    };
    let outcome = cell
        .solver
        .kind()
        .and_then(|kind| Ok((kind, cell.solver.param_map()?)))
        .and_then(|(kind, params)| solve(kind, &params, &inst.problem, &budget));
    match outcome {
        Ok(run) => {
            record.status = if run.aborted { RecordStatus::Aborted } else { RecordStatus::Ok };
            record.best_energy = Some(run.best_energy);
            record.elapsed = run.elapsed;
            record.sweeps_done = run.sweeps_done;
            record.warning = run.warning;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record.timestamp = now_millis();
    record
}

/// Resolves the worker count: explicit value, then `QUBO_ARENA_WORKERS`, then 1.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var("QUBO_ARENA_WORKERS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1)
        .max(1)
}
