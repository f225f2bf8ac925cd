//! Exhaustive minimisation by Gray-code enumeration.

use std::collections::BTreeMap;
use std::time::Instant;

use super::chain::MetropolisChain;
use super::SolveRun;
use super::{SolverBudget, Tracker};
use crate::error::{Error, Result};
use crate::model::QuboProblem;

pub const EXACT_MAX_VARS: usize = 24;

/// Global minimum over all `2^n` assignments. Ties are resolved toward the
/// lexicographically smallest assignment (variable 0 most significant).
pub fn solve_exact(problem: &QuboProblem) -> Result<SolveRun> {
    let n = problem.num_vars();
    if n > EXACT_MAX_VARS {
        return Err(Error::Capacity(format!(
            "exhaustive search is limited to {EXACT_MAX_VARS} variables, got {n}"
        )));
    }
    let start = Instant::now();
    let mut chain = MetropolisChain::new(problem, vec![0; n]);
    let mut best = chain.state().to_vec();
    let mut best_exact = chain.energy();

    for k in 1u64..(1u64 << n) {
        chain.flip(k.trailing_zeros() as usize);
        let e = chain.energy();
        let tol = 1e-9 * best_exact.abs().max(1.0);
        if e < best_exact - tol {
            best.copy_from_slice(chain.state());
            best_exact = problem.energy_unchecked(&best);
        } else if e <= best_exact + tol {
            let exact = problem.energy_unchecked(chain.state());
            if exact < best_exact || (exact == best_exact && chain.state() < &best[..]) {
                best.copy_from_slice(chain.state());
                best_exact = exact;
            }
        }
        if k & 0xffff == 0 {
            chain.resync();
        }
    }

    let mut tracker = Tracker::new(problem, SolverBudget::sweeps(1, 0), start);
    tracker.offer(&best, f64::NEG_INFINITY);
    Ok(tracker.finish("exact", 1u64 << n, BTreeMap::new()))
}
