//! Sherrington-Kirkpatrick spin glass with Gaussian couplings.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{Coupling, IsingProblem};
use crate::rng::RngSeed;

/// Number of couplings of a fully connected instance on `n` spins.
pub fn sk_num_couplings(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// The raw standard-normal draws behind [`gen_sk`], in `(i, j)` order with `i < j`.
pub fn sk_gaussians(n: usize, seed: RngSeed) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("SK model needs n >= 2, got {n}")));
    }
    let mut rng = seed.rng();
    Ok((0..sk_num_couplings(n)).map(|_| StandardNormal.sample(&mut rng)).collect())
}

/// Fully connected instance with stored couplings `g / √n`, `g ~ N(0, 1)`,
/// no fields and no offset.
pub fn gen_sk(n: usize, seed: RngSeed) -> Result<IsingProblem> {
    let g = sk_gaussians(n, seed)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut couplings = Vec::with_capacity(g.len());
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            couplings.push(Coupling { i, j, value: g[k] * scale });
            k += 1;
        }
    }
    IsingProblem::from_couplings(n, couplings, 0.0)
}
