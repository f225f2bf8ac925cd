//! Heuristic solvers and the exhaustive oracle.
//!
//! Every solver minimises a [`QuboProblem`] under a [`SolverBudget`] and
//! returns a [`SolveRun`]. Runs are single-threaded and fully determined by the
//! problem, parameters and seed when only a sweep limit is set.

mod chain;
mod exact;
mod params;
mod pt;
mod sa;
mod sb;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BinaryAssignment, QuboProblem};
use crate::rng::RngSeed;

pub use chain::{mean_abs_delta, MetropolisChain};
pub use exact::{solve_exact, EXACT_MAX_VARS};
pub use params::ParamMap;
pub use pt::{solve_pt, PtParams};
pub use sa::{beta_schedule, solve_sa, SaParams, Schedule, DEFAULT_ANNEAL_SWEEPS};
pub use sb::{solve_sb, SbParams, DEFAULT_RAMP_STEPS};

/// Stopping rule for a run. At least one of the limits must be set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverBudget {
    /// Wall-clock limit in seconds, measured from solver entry.
    pub time_limit: Option<f64>,
    /// Sweeps (SA), exchange rounds (PT) or integration steps (SB).
    pub sweep_limit: Option<u64>,
    pub record_trajectory: bool,
    pub seed: RngSeed,
    /// Stop as soon as the best energy is at or below this value.
    #[serde(default)]
    pub target_energy: Option<f64>,
}

impl SolverBudget {
    pub fn sweeps(limit: u64, seed: u64) -> Self {
        SolverBudget {
            time_limit: None,
            sweep_limit: Some(limit),
            record_trajectory: false,
            seed: RngSeed(seed),
            target_energy: None,
        }
    }

    pub fn seconds(limit: f64, seed: u64) -> Self {
        SolverBudget {
            time_limit: Some(limit),
            sweep_limit: None,
            record_trajectory: false,
            seed: RngSeed(seed),
            target_energy: None,
        }
    }

    pub fn with_trajectory(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target_energy = Some(target);
        self
    }

    pub fn validate(&self) -> Result<()> {
        match (self.time_limit, self.sweep_limit) {
            (None, None) => Err(Error::InvalidParameter(
                "budget needs a time limit or a sweep limit".into(),
            )),
            (Some(t), _) if !(t.is_finite() && t > 0.0) => Err(Error::InvalidParameter(format!(
                "time limit must be positive, got {t}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub elapsed: f64,
    pub best_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRun {
    pub solver_id: String,
    pub best_assignment: BinaryAssignment,
    pub best_energy: f64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub sweeps_done: u64,
    pub elapsed: f64,
    /// Resolved parameters, including auto-scaled defaults.
    pub params: BTreeMap<String, String>,
    /// Solver-specific counters (e.g. replica exchange acceptance).
    #[serde(default)]
    pub stats: BTreeMap<String, f64>,
    #[serde(default)]
    pub warning: Option<String>,
    #[serde(default)]
    pub aborted: bool,
}

/// Best-so-far bookkeeping shared by the heuristics.
///
/// Candidate energies from incremental updates are only trusted as a filter;
/// accepted improvements are re-evaluated exactly so that the trajectory and
/// the final energy always match `qubo_energy(best_assignment)`.
pub(crate) struct Tracker<'a> {
    problem: &'a QuboProblem,
    budget: SolverBudget,
    start: Instant,
    best: Vec<u8>,
    best_energy: f64,
    trajectory: Vec<TrajectoryPoint>,
}

impl<'a> Tracker<'a> {
    pub fn new(problem: &'a QuboProblem, budget: SolverBudget, start: Instant) -> Self {
        Tracker {
            problem,
            budget,
            start,
            best: Vec::new(),
            best_energy: f64::INFINITY,
            trajectory: Vec::new(),
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    /// Offers a state with an approximate energy. Returns the exact energy
    /// when the state became the new best.
    pub fn offer(&mut self, x: &[u8], approx: f64) -> Option<f64> {
        let tol = 1e-9 * self.best_energy.abs().max(1.0);
        if !(approx < self.best_energy - tol) && self.best_energy.is_finite() {
            return None;
        }
        let exact = self.problem.energy_unchecked(x);
        if exact < self.best_energy {
            self.best_energy = exact;
            self.best.clear();
            self.best.extend_from_slice(x);
            if self.budget.record_trajectory {
                let elapsed = self.elapsed();
                self.trajectory.push(TrajectoryPoint { elapsed, best_energy: exact });
            }
            Some(exact)
        } else {
            None
        }
    }

    pub fn out_of_time(&self) -> bool {
        self.budget.time_limit.is_some_and(|t| self.elapsed() >= t)
    }

    pub fn target_reached(&self) -> bool {
        self.budget.target_energy.is_some_and(|t| self.best_energy <= t)
    }

    pub fn finish(
        mut self,
        solver_id: &str,
        sweeps_done: u64,
        params: BTreeMap<String, String>,
    ) -> SolveRun {
        let elapsed = self.elapsed();
        self.trajectory.push(TrajectoryPoint { elapsed, best_energy: self.best_energy });
        SolveRun {
            solver_id: solver_id.to_string(),
            best_assignment: BinaryAssignment(self.best),
            best_energy: self.best_energy,
            trajectory: self.trajectory,
            sweeps_done,
            elapsed,
            params,
            stats: BTreeMap::new(),
            warning: None,
            aborted: false,
        }
    }
}

/// Length of the next restart pass: `per_run` sweeps, cut to what is left of
/// the sweep limit. Time limits are enforced inside the pass.
pub(crate) struct PassPlanner {
    per_run: u64,
    sweep_limit: Option<u64>,
    time_limit: Option<f64>,
}

impl PassPlanner {
    pub fn new(per_run: u64, budget: &SolverBudget) -> Self {
        PassPlanner { per_run: per_run.max(1), sweep_limit: budget.sweep_limit, time_limit: budget.time_limit }
    }

    /// `None` when the budget is spent.
    pub fn next(&self, done: u64, elapsed: f64) -> Option<u64> {
        if self.time_limit.is_some_and(|t| elapsed >= t) {
            return None;
        }
        match self.sweep_limit {
            Some(l) if done >= l => None,
            Some(l) => Some(self.per_run.min(l - done)),
            None => Some(self.per_run),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Sa,
    Pt,
    Sb,
    Exact,
}

impl SolverKind {
    pub fn id(self) -> &'static str {
        match self {
            SolverKind::Sa => "sa",
            SolverKind::Pt => "pt",
            SolverKind::Sb => "sb",
            SolverKind::Exact => "exact",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sa" => Ok(SolverKind::Sa),
            "pt" => Ok(SolverKind::Pt),
            "sb" => Ok(SolverKind::Sb),
            "exact" => Ok(SolverKind::Exact),
            other => Err(Error::UnknownSolver(other.to_string())),
        }
    }
}

/// Runs solver `kind` with parameters from a flat key/value map.
pub fn solve(
    kind: SolverKind,
    params: &ParamMap,
    problem: &QuboProblem,
    budget: &SolverBudget,
) -> Result<SolveRun> {
    match kind {
        SolverKind::Sa => solve_sa(problem, &SaParams::from_map(params)?, budget),
        SolverKind::Pt => solve_pt(problem, &PtParams::from_map(params)?, budget),
        SolverKind::Sb => solve_sb(problem, &SbParams::from_map(params)?, budget),
        SolverKind::Exact => {
            params.reject_unknown(&[])?;
            solve_exact(problem)
        }
    }
}

/// Shared pre-flight for the heuristics.
pub(crate) fn check_inputs(problem: &QuboProblem, budget: &SolverBudget) -> Result<()> {
    budget.validate()?;
    if problem.num_vars() == 0 {
        return Err(Error::InvalidParameter("problem has no variables".into()));
    }
    Ok(())
}

pub(crate) const EXHAUSTED_WARNING: &str = "budget exhausted before the first sweep";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_validation() {
        let mut b = SolverBudget::sweeps(10, 0);
        assert!(b.validate().is_ok());
        b.sweep_limit = None;
        assert!(b.validate().is_err());
        b.time_limit = Some(0.0);
        assert!(b.validate().is_err());
        b.time_limit = Some(0.5);
        assert!(b.validate().is_ok());
    }

    #[test]
    fn planner_passes() {
        let p = PassPlanner::new(30, &SolverBudget::sweeps(100, 0));
        assert_eq!(p.next(0, 0.0), Some(30));
        assert_eq!(p.next(90, 0.0), Some(10));
        assert_eq!(p.next(100, 0.0), None);
        let p = PassPlanner::new(30, &SolverBudget::seconds(1.0, 0));
        assert_eq!(p.next(10_000, 0.5), Some(30));
        assert_eq!(p.next(0, 1.0), None);
    }

    #[test]
    fn solver_kind_parsing() {
        assert_eq!("pt".parse::<SolverKind>().unwrap(), SolverKind::Pt);
        assert!(matches!("hss".parse::<SolverKind>(), Err(Error::UnknownSolver(_))));
    }
}
