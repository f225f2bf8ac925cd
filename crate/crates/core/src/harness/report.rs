//! Reports computed from a record set. All of them are pure functions of the
//! records and do not depend on record order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::{Budget, ResultRecord};
use crate::error::{Error, Result};
use crate::instances::{DensityClass, SizeClass};

/// Relative tie tolerance: `|E_a - E_b| <= TIE_TOLERANCE * max(1, |E_best|)`.
pub const TIE_TOLERANCE: f64 = 1e-6;

fn ties(a: f64, best: f64) -> bool {
    (a - best).abs() <= TIE_TOLERANCE * best.abs().max(1.0)
}

/// Per-instance, per-solver best energy at one budget index.
struct Bests {
    solvers: Vec<String>,
    /// instance -> (classes, solver -> best)
    per_instance: BTreeMap<String, ((SizeClass, DensityClass), BTreeMap<String, f64>)>,
}

fn collect_bests(records: &[ResultRecord], budget_index: usize) -> Bests {
    let solvers: BTreeSet<String> = records.iter().map(|r| r.solver_id.clone()).collect();
    let mut per_instance: BTreeMap<String, ((SizeClass, DensityClass), BTreeMap<String, f64>)> =
        BTreeMap::new();
    for r in records.iter().filter(|r| r.budget_index == budget_index) {
        let entry = per_instance
            .entry(r.instance.clone())
            .or_insert_with(|| ((r.size_class, r.density_class), BTreeMap::new()));
        if let Some(e) = r.energy() {
            let slot = entry.1.entry(r.solver_id.clone()).or_insert(f64::INFINITY);
            *slot = slot.min(e);
        }
    }
    per_instance.retain(|_, (_, m)| !m.is_empty());
    Bests { solvers: solvers.into_iter().collect(), per_instance }
}

fn default_budget_index(records: &[ResultRecord]) -> Option<usize> {
    records.iter().map(|r| r.budget_index).max()
}

/// Win counts on the size × density grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinTable {
    pub solvers: Vec<String>,
    pub budget_index: usize,
    /// `cells[size][density][solver]`.
    pub cells: [[Vec<u32>; 3]; 3],
    /// Wins on instances whose size falls outside the three classes.
    pub unclassified: Vec<u32>,
    pub instances: usize,
    pub notes: Vec<String>,
}

impl WinTable {
    pub fn size_total(&self, size: usize, solver: usize) -> u32 {
        (0..3).map(|d| self.cells[size][d][solver]).sum()
    }

    pub fn density_total(&self, density: usize, solver: usize) -> u32 {
        (0..3).map(|s| self.cells[s][density][solver]).sum()
    }

    /// Grid total for a solver (unclassified instances excluded).
    pub fn total(&self, solver: usize) -> u32 {
        (0..3).map(|s| self.size_total(s, solver)).sum()
    }

    pub fn solver_index(&self, id: &str) -> Option<usize> {
        self.solvers.iter().position(|s| s == id)
    }

    /// Text grid: density classes as rows, size classes (then Total) as
    /// column groups with one column per solver.
    pub fn render(&self) -> String {
        let k = self.solvers.len();
        let w = self.solvers.iter().map(String::len).max().unwrap_or(1).max(3);
        let group_w = k * (w + 1) - 1;
        let mut out = String::new();
        let _ = write!(out, "{:<8} |", "");
        for g in ["Small", "Medium", "Large"] {
            let _ = write!(out, " {g:^group_w$} |");
        }
        let _ = writeln!(out, "| {:^group_w$}", "Total");
        let _ = write!(out, "{:<8} |", "");
        let header: Vec<String> = self.solvers.iter().map(|s| format!("{s:>w$}")).collect();
        for _ in 0..3 {
            let _ = write!(out, " {} |", header.join(" "));
        }
        let _ = writeln!(out, "| {}", header.join(" "));
        let line_len = out.lines().next().map_or(0, str::len);
        let _ = writeln!(out, "{}", "-".repeat(line_len));

        let row = |out: &mut String, label: &str, f: &dyn Fn(usize, usize) -> u32, total: &dyn Fn(usize) -> u32| {
            let _ = write!(out, "{label:<8} |");
            for size in 0..3 {
                let vals: Vec<String> = (0..k).map(|s| format!("{:>w$}", f(size, s))).collect();
                let _ = write!(out, " {} |", vals.join(" "));
            }
            let vals: Vec<String> = (0..k).map(|s| format!("{:>w$}", total(s))).collect();
            let _ = writeln!(out, "| {}", vals.join(" "));
        };
        for (d, label) in ["Sparse", "Medium", "Dense"].iter().enumerate() {
            row(&mut out, label, &|size, s| self.cells[size][d][s], &|s| self.density_total(d, s));
        }
        let _ = writeln!(out, "{}", "=".repeat(line_len));
        row(&mut out, "Total", &|size, s| self.size_total(size, s), &|s| self.total(s));
        if self.unclassified.iter().any(|&c| c > 0) {
            let vals: Vec<String> = self
                .solvers
                .iter()
                .zip(&self.unclassified)
                .map(|(s, c)| format!("{s}={c}"))
                .collect();
            let _ = writeln!(out, "outside size classes: {}", vals.join(" "));
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}

/// Counts, per instance, every solver whose best energy ties the overall best.
/// `budget_index` defaults to the largest index present.
pub fn count_wins(records: &[ResultRecord], budget_index: Option<usize>) -> Result<WinTable> {
    let bi = budget_index
        .or_else(|| default_budget_index(records))
        .ok_or_else(|| Error::InvalidParameter("no records".into()))?;
    let bests = collect_bests(records, bi);
    let k = bests.solvers.len();
    let mut cells: [[Vec<u32>; 3]; 3] = Default::default();
    for row in cells.iter_mut() {
        for c in row.iter_mut() {
            *c = vec![0; k];
        }
    }
    let mut unclassified = vec![0; k];
    let mut notes = Vec::new();
    for (name, ((size, density), per_solver)) in &bests.per_instance {
        let best = per_solver.values().copied().fold(f64::INFINITY, f64::min);
        for (si, solver) in bests.solvers.iter().enumerate() {
            match per_solver.get(solver) {
                Some(&e) if ties(e, best) => match size.index() {
                    Some(s) => cells[s][density.index()][si] += 1,
                    None => unclassified[si] += 1,
                },
                Some(_) => {}
                None => notes.push(format!("{solver} has no result on {name}")),
            }
        }
    }
    Ok(WinTable {
        solvers: bests.solvers,
        budget_index: bi,
        cells,
        unclassified,
        instances: bests.per_instance.len(),
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RatioValue {
    /// `solver_best / overall_best` (or its reciprocal for positive optima).
    Ratio(f64),
    /// `solver_best - overall_best`, used when the overall best is zero.
    Gap(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEntry {
    pub instance: String,
    pub solver: String,
    pub energy: f64,
    pub value: RatioValue,
    pub is_best: bool,
}

impl RatioEntry {
    /// Six decimals; best entries print as `1.0`.
    pub fn render_value(&self) -> String {
        match self.value {
            RatioValue::Ratio(_) if self.is_best => "1.0".to_string(),
            RatioValue::Ratio(r) => format!("{r:.6}"),
            RatioValue::Gap(g) => format!("gap:{g}"),
        }
    }
}

/// Ratio-to-best per `(instance, solver)`. For a negative overall best the
/// ratio is `solver / best`, so worse solvers fall below 1. A positive best
/// uses `best / solver`; a zero best reports absolute gaps instead.
pub fn ratio_table(records: &[ResultRecord], budget_index: Option<usize>) -> Vec<RatioEntry> {
    let Some(bi) = budget_index.or_else(|| default_budget_index(records)) else {
        return Vec::new();
    };
    let bests = collect_bests(records, bi);
    let mut out = Vec::new();
    for (name, (_, per_solver)) in &bests.per_instance {
        let best = per_solver.values().copied().fold(f64::INFINITY, f64::min);
        for (solver, &e) in per_solver {
            let value = if best < 0.0 {
                RatioValue::Ratio(e / best)
            } else if best > 0.0 {
                RatioValue::Ratio(best / e)
            } else {
                RatioValue::Gap(e - best)
            };
            out.push(RatioEntry {
                instance: name.clone(),
                solver: solver.clone(),
                energy: e,
                value,
                is_best: ties(e, best),
            });
        }
    }
    out
}

pub fn ratios_csv(entries: &[RatioEntry]) -> String {
    let mut out = String::from("instance,solver,ratio,is_best\n");
    for e in entries {
        let _ = writeln!(out, "{},{},{},{}", e.instance, e.solver, e.render_value(), e.is_best);
    }
    out
}

/// One row per instance, one column per solver; best entries marked `*`.
pub fn render_ratio_table(entries: &[RatioEntry]) -> String {
    let solvers: BTreeSet<&str> = entries.iter().map(|e| e.solver.as_str()).collect();
    let mut rows: BTreeMap<&str, BTreeMap<&str, String>> = BTreeMap::new();
    for e in entries {
        let mut v = e.render_value();
        if e.is_best {
            v.push('*');
        }
        rows.entry(&e.instance).or_default().insert(&e.solver, v);
    }
    let w = rows.keys().map(|k| k.len()).max().unwrap_or(0).max(5);
    let mut out = format!("{:<w$}", "input");
    for s in &solvers {
        let _ = write!(out, " {s:>10}");
    }
    out.push('\n');
    for (inst, vals) in rows {
        let _ = write!(out, "{inst:<w$}");
        for s in &solvers {
            let _ = write!(out, " {:>10}", vals.get(s).map_or("", String::as_str));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    PerClause,
    PerVariable,
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clauses" | "per_clause" => Ok(Normalization::PerClause),
            "variables" | "per_variable" => Ok(Normalization::PerVariable),
            _ => Err(Error::InvalidParameter(format!("unknown normalization `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub solver: String,
    pub budget_index: usize,
    pub budget: Budget,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub n: usize,
    pub mean_elapsed: f64,
}

/// Order-independent mean and population standard deviation.
fn mean_std(mut values: Vec<f64>) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(f64::total_cmp);
    (mean, (dev.iter().sum::<f64>() / n).sqrt())
}

/// Mean and spread of normalised best energies per `(solver, budget)` over
/// all instances and runs.
pub fn aggregate_curves(records: &[ResultRecord], norm: Normalization) -> Result<Vec<CurvePoint>> {
    let mut groups: BTreeMap<(String, usize), (Budget, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let key = (r.solver_id.clone(), r.budget_index);
        let entry = groups.entry(key).or_insert_with(|| (r.budget, Vec::new(), Vec::new()));
        let Some(e) = r.energy() else { continue };
        let scale = match norm {
            Normalization::PerClause => r.clauses.ok_or_else(|| {
                Error::InvalidParameter(format!("record for `{}` has no clause count", r.instance))
            })?,
            Normalization::PerVariable => r.n_vars,
        };
        if scale == 0 {
            return Err(Error::InvalidParameter(format!(
                "zero normalisation constant for `{}`",
                r.instance
            )));
        }
        entry.1.push(e / scale as f64);
        entry.2.push(r.elapsed);
    }
    let mut out = Vec::new();
    for ((solver, budget_index), (budget, values, elapsed)) in groups {
        if values.is_empty() {
            log::warn!("no usable records for {solver} at budget {budget}; omitted");
            continue;
        }
        let n = values.len();
        let (mean, std) = mean_std(values);
        let (mean_elapsed, _) = mean_std(elapsed);
        out.push(CurvePoint { solver, budget_index, budget, mean, std, n, mean_elapsed });
    }
    Ok(out)
}

pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("solver,budget,mean,std,n,mean_elapsed\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.solver,
            p.budget.value(),
            p.mean,
            p.std,
            p.n,
            p.mean_elapsed
        );
    }
    out
}
