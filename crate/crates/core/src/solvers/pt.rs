//! Parallel tempering (replica exchange Monte Carlo).

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;

use super::chain::{mean_abs_delta, MetropolisChain};
use super::params::ParamMap;
use super::{check_inputs, SolveRun, SolverBudget, Tracker, EXHAUSTED_WARNING};
use crate::error::{Error, Result};
use crate::model::QuboProblem;

pub const DEFAULT_REPLICAS: usize = 128;

/// Geometric inverse-temperature ladder between `beta_min` and `beta_max`.
/// Unset ends scale from the mean `|Δ|`: `ln 2 / ⟨|Δ|⟩` and `20 / ⟨|Δ|⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PtParams {
    pub replicas: usize,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    /// Rounds (one sweep of every replica) between exchange attempts.
    pub exchange_interval: u64,
}

impl Default for PtParams {
    fn default() -> Self {
        PtParams { replicas: DEFAULT_REPLICAS, beta_min: None, beta_max: None, exchange_interval: 1 }
    }
}

impl PtParams {
    pub fn from_map(map: &ParamMap) -> Result<Self> {
        map.reject_unknown(&["replicas", "beta_min", "beta_max", "exchange_interval"])?;
        let d = PtParams::default();
        let p = PtParams {
            replicas: map.get("replicas")?.unwrap_or(d.replicas),
            beta_min: map.get("beta_min")?,
            beta_max: map.get("beta_max")?,
            exchange_interval: map.get("exchange_interval")?.unwrap_or(d.exchange_interval),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < 2 {
            return Err(Error::InvalidParameter(format!(
                "parallel tempering needs >= 2 replicas, got {}",
                self.replicas
            )));
        }
        if self.exchange_interval == 0 {
            return Err(Error::InvalidParameter("exchange_interval must be positive".into()));
        }
        for b in [self.beta_min, self.beta_max].into_iter().flatten() {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::InvalidParameter(format!("beta must be positive, got {b}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.beta_min, self.beta_max) {
            if hi < lo {
                return Err(Error::InvalidParameter(format!(
                    "beta_max ({hi}) must be >= beta_min ({lo})"
                )));
            }
        }
        Ok(())
    }

    /// The ladder, coldest last. Equal ends give a flat ladder.
    pub fn ladder(&self, mean_delta: f64) -> Vec<f64> {
        let lo = self.beta_min.unwrap_or(std::f64::consts::LN_2 / mean_delta);
        let hi = self.beta_max.unwrap_or(20.0 / mean_delta).max(lo);
        let r = self.replicas;
        (0..r)
            .map(|k| lo * (hi / lo).powf(k as f64 / (r - 1) as f64))
            .collect()
    }
}

/// Replicas sweep in ladder order each round; every `exchange_interval`
/// rounds, adjacent pairs of alternating parity swap configurations with
/// probability `min(1, exp((β_k - β_{k+1})(E_k - E_{k+1})))`.
///
/// The sweep limit counts rounds, so `sweeps_done` is rounds and the total
/// Metropolis work is `rounds × replicas` sweeps.
pub fn solve_pt(problem: &QuboProblem, params: &PtParams, budget: &SolverBudget) -> Result<SolveRun> {
    check_inputs(problem, budget)?;
    params.validate()?;
    let start = Instant::now();
    let mut rng = budget.seed.rng();
    let mean_delta = mean_abs_delta(problem, &mut rng);
    let betas = params.ladder(mean_delta);

    let mut tracker = Tracker::new(problem, *budget, start);
    let mut replicas: Vec<MetropolisChain> =
        (0..params.replicas).map(|_| MetropolisChain::random(problem, &mut rng)).collect();
    for r in replicas.iter_mut() {
        if let Some(e) = tracker.offer(r.state(), r.energy()) {
            r.resync_energy(e);
        }
    }

    let mut rounds = 0u64;
    let mut attempts = 0u64;
    let mut accepted = 0u64;
    let mut parity = 0usize;
    let limit = budget.sweep_limit.unwrap_or(u64::MAX);
    let mut stopped = tracker.target_reached() || tracker.out_of_time();
    while !stopped && rounds < limit {
        for (chain, &beta) in replicas.iter_mut().zip(&betas) {
            chain.sweep(beta, &mut rng);
            if let Some(e) = tracker.offer(chain.state(), chain.energy()) {
                chain.resync_energy(e);
            }
            if tracker.target_reached() || tracker.out_of_time() {
                stopped = true;
                break;
            }
        }
        if stopped {
            // The interrupted round still counts as work done.
            rounds += 1;
            break;
        }
        rounds += 1;
        if rounds % params.exchange_interval == 0 {
            let mut k = parity;
            while k + 1 < replicas.len() {
                let arg = (betas[k] - betas[k + 1]) * (replicas[k].energy() - replicas[k + 1].energy());
                attempts += 1;
                if arg >= 0.0 || rng.random::<f64>() < arg.exp() {
                    replicas.swap(k, k + 1);
                    accepted += 1;
                }
                k += 2;
            }
            parity ^= 1;
        }
    }

    let mut resolved = BTreeMap::new();
    resolved.insert("replicas".into(), params.replicas.to_string());
    resolved.insert("beta_min".into(), betas[0].to_string());
    resolved.insert("beta_max".into(), betas[betas.len() - 1].to_string());
    resolved.insert("exchange_interval".into(), params.exchange_interval.to_string());
    let mut run = tracker.finish("pt", rounds, resolved);
    run.stats.insert("exchange_attempts".into(), attempts as f64);
    run.stats.insert("exchange_accepted".into(), accepted as f64);
    if attempts > 0 {
        run.stats.insert("exchange_acceptance".into(), accepted as f64 / attempts as f64);
    }
    run.stats.insert("replica_sweeps".into(), (rounds * params.replicas as u64) as f64);
    if rounds == 0 {
        run.warning = Some(EXHAUSTED_WARNING.into());
    }
    Ok(run)
}
