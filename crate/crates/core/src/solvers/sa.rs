//! Single-flip Metropolis simulated annealing with restarts.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::chain::{mean_abs_delta, MetropolisChain};
use super::params::ParamMap;
use super::{check_inputs, PassPlanner, SolveRun, SolverBudget, Tracker, EXHAUSTED_WARNING};
use crate::error::{Error, Result};
use crate::model::QuboProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Geometric,
    Linear,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(Schedule::Geometric),
            "linear" => Ok(Schedule::Linear),
            _ => Err(Error::InvalidParameter(format!("unknown schedule `{s}`"))),
        }
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Schedule::Geometric => "geometric",
            Schedule::Linear => "linear",
        })
    }
}

/// Unset inverse temperatures are scaled from the mean `|Δ|` of a random
/// state: `beta_start = ln 2 / ⟨|Δ|⟩` (typical uphill move accepted half the
/// time) and `beta_end = 100 / ⟨|Δ|⟩`. Each anneal is `sweeps` long; the run
/// restarts from a fresh random state until the budget is spent.
#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    pub beta_start: Option<f64>,
    pub beta_end: Option<f64>,
    pub schedule: Schedule,
    pub sweeps: u64,
}

pub const DEFAULT_ANNEAL_SWEEPS: u64 = 1000;

impl Default for SaParams {
    fn default() -> Self {
        SaParams { beta_start: None, beta_end: None, schedule: Schedule::Geometric, sweeps: DEFAULT_ANNEAL_SWEEPS }
    }
}

impl SaParams {
    pub fn from_map(map: &ParamMap) -> Result<Self> {
        map.reject_unknown(&["beta_start", "beta_end", "schedule", "sweeps"])?;
        let p = SaParams {
            beta_start: map.get("beta_start")?,
            beta_end: map.get("beta_end")?,
            schedule: map.get("schedule")?.unwrap_or(Schedule::Geometric),
            sweeps: map.get("sweeps")?.unwrap_or(DEFAULT_ANNEAL_SWEEPS),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for b in [self.beta_start, self.beta_end].into_iter().flatten() {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::InvalidParameter(format!("beta must be positive, got {b}")));
            }
        }
        if let (Some(s), Some(e)) = (self.beta_start, self.beta_end) {
            if e < s {
                return Err(Error::InvalidParameter(format!(
                    "beta_end ({e}) must be >= beta_start ({s})"
                )));
            }
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidParameter("sweeps must be positive".into()));
        }
        Ok(())
    }

    /// Fills unset temperatures from the problem's delta scale.
    pub(crate) fn resolve_betas(&self, mean_delta: f64) -> (f64, f64) {
        let start = self.beta_start.unwrap_or(std::f64::consts::LN_2 / mean_delta);
        let end = self.beta_end.unwrap_or(100.0 / mean_delta).max(start);
        (start, end)
    }
}

/// Inverse temperature for sweep `k` of `len`.
pub fn beta_schedule(schedule: Schedule, start: f64, end: f64, k: u64, len: u64) -> f64 {
    if len <= 1 {
        return end;
    }
    let t = k as f64 / (len - 1) as f64;
    match schedule {
        Schedule::Geometric => start * (end / start).powf(t),
        Schedule::Linear => start + (end - start) * t,
    }
}

/// Anneals from uniform random states, restarting until the budget is spent.
pub fn solve_sa(problem: &QuboProblem, params: &SaParams, budget: &SolverBudget) -> Result<SolveRun> {
    check_inputs(problem, budget)?;
    params.validate()?;
    let start = Instant::now();
    let mut rng = budget.seed.rng();
    let mean_delta = mean_abs_delta(problem, &mut rng);
    let (beta_start, beta_end) = params.resolve_betas(mean_delta);

    let mut tracker = Tracker::new(problem, *budget, start);
    let mut chain = MetropolisChain::random(problem, &mut rng);
    tracker.offer(chain.state(), chain.energy());

    let planner = PassPlanner::new(params.sweeps, budget);
    let mut done = 0u64;
    let mut passes = 0u64;
    let mut stopped = tracker.target_reached();
    while !stopped {
        let Some(len) = planner.next(done, tracker.elapsed()) else { break };
        if passes > 0 {
            chain.randomize(&mut rng);
            if let Some(e) = tracker.offer(chain.state(), chain.energy()) {
                chain.resync_energy(e);
            }
        }
        passes += 1;
        for k in 0..len {
            let beta = beta_schedule(params.schedule, beta_start, beta_end, k, len);
            chain.sweep(beta, &mut rng);
            done += 1;
            if let Some(e) = tracker.offer(chain.state(), chain.energy()) {
                chain.resync_energy(e);
            }
            if tracker.target_reached() || tracker.out_of_time() {
                stopped = true;
                break;
            }
        }
    }

    let mut resolved = BTreeMap::new();
    resolved.insert("beta_start".into(), beta_start.to_string());
    resolved.insert("beta_end".into(), beta_end.to_string());
    resolved.insert("schedule".into(), params.schedule.to_string());
    resolved.insert("sweeps".into(), params.sweeps.to_string());
    let mut run = tracker.finish("sa", done, resolved);
    run.stats.insert("restarts".into(), passes.saturating_sub(1) as f64);
    if done == 0 {
        run.warning = Some(EXHAUSTED_WARNING.into());
    }
    Ok(run)
}
