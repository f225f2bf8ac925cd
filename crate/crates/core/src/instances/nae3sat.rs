//! Random not-all-equal 3-SAT and its Ising cost.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coupling, IsingProblem, SpinAssignment};
use crate::rng::RngSeed;

/// Clause-to-variable ratio at the NAE 3-SAT satisfiability threshold.
pub const CRITICAL_RATIO: f64 = 2.11;

/// A literal: variable index and sign (`-1` is negation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub sign: i8,
}

pub type Clause = [Literal; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nae3SatFormula {
    n: usize,
    clauses: Vec<Clause>,
}

impl Nae3SatFormula {
    /// Each clause needs three distinct in-range variables and `±1` signs.
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        for (m, c) in clauses.iter().enumerate() {
            for l in c {
                if l.var >= n {
                    return Err(Error::IndexOutOfRange { index: l.var, n });
                }
                if l.sign != 1 && l.sign != -1 {
                    return Err(Error::Validation(format!("clause {m}: sign {} not ±1", l.sign)));
                }
            }
            if c[0].var == c[1].var || c[1].var == c[2].var || c[0].var == c[2].var {
                return Err(Error::Validation(format!("clause {m} repeats a variable")));
            }
        }
        Ok(Nae3SatFormula { n, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clauses whose three effective literals `ζσ` are all equal.
    pub fn count_violated(&self, s: &SpinAssignment) -> Result<usize> {
        if s.len() != self.n {
            return Err(Error::Dimension { expected: self.n, actual: s.len() });
        }
        Ok(self
            .clauses
            .iter()
            .filter(|c| {
                let v = c.map(|l| l.sign * s.0[l.var]);
                v[0] == v[1] && v[1] == v[2]
            })
            .count())
    }

    /// Ising form whose energy equals the violated-clause count.
    pub fn to_ising(&self) -> IsingProblem {
        nae3sat_to_ising(self)
    }
}

/// `m` clauses over `n >= 3` variables, each with three distinct variables
/// drawn uniformly and independent uniform signs.
pub fn gen_nae3sat(n: usize, m: usize, seed: RngSeed) -> Result<Nae3SatFormula> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("NAE 3-SAT needs n >= 3, got {n}")));
    }
    let mut rng = seed.rng();
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        // Partial Fisher-Yates over the identity permutation; at most three
        // positions are ever displaced so they are tracked explicitly.
        let mut displaced: [(usize, usize); 3] = [(usize::MAX, 0); 3];
        let lookup = |d: &[(usize, usize); 3], k: usize| {
            d.iter().rev().find(|(pos, _)| *pos == k).map_or(k, |&(_, v)| v)
        };
        let mut clause = [Literal { var: 0, sign: 1 }; 3];
        for (k, lit) in clause.iter_mut().enumerate() {
            let r = rng.random_range(k..n);
            let picked = lookup(&displaced, r);
            let at_k = lookup(&displaced, k);
            displaced[k] = (r, at_k);
            lit.var = picked;
            lit.sign = if rng.random::<bool>() { 1 } else { -1 };
        }
        clauses.push(clause);
    }
    Ok(Nae3SatFormula { n, clauses })
}

/// `E = ¼ Σ_m (ζ₁ζ₂σσ + ζ₂ζ₃σσ + ζ₃ζ₁σσ + 1)`, pair terms merged across clauses.
pub fn nae3sat_to_ising(f: &Nae3SatFormula) -> IsingProblem {
    let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for c in &f.clauses {
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let (la, lb) = (c[a], c[b]);
            let key = (la.var.min(lb.var), la.var.max(lb.var));
            *acc.entry(key).or_insert(0.0) += f64::from(la.sign * lb.sign) / 4.0;
        }
    }
    let couplings = acc
        .into_iter()
        .map(|((i, j), value)| Coupling { i, j, value })
        .collect();
    IsingProblem::from_couplings(f.n, couplings, f.clauses.len() as f64 / 4.0)
        .expect("formula invariants give a valid Ising problem")
}
