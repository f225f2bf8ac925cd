use rand::Rng;

use crate::model::QuboProblem;

/// Single-flip Metropolis state over a QUBO with cached local fields.
///
/// `field[i] = Q_ii + Σ_j Q_ij x_j`, so flipping bit `i` changes the energy by
/// `field[i]` when `x_i = 0` and by `-field[i]` when `x_i = 1`.
#[derive(Debug, Clone)]
pub struct MetropolisChain<'a> {
    problem: &'a QuboProblem,
    x: Vec<u8>,
    field: Vec<f64>,
    energy: f64,
}

impl<'a> MetropolisChain<'a> {
    pub fn new(problem: &'a QuboProblem, x: Vec<u8>) -> Self {
        assert_eq!(x.len(), problem.num_vars());
        let mut chain = MetropolisChain {
            problem,
            field: vec![0.0; x.len()],
            x,
            energy: 0.0,
        };
        chain.resync();
        chain
    }

    pub fn random(problem: &'a QuboProblem, rng: &mut impl Rng) -> Self {
        let x = (0..problem.num_vars()).map(|_| u8::from(rng.random::<bool>())).collect();
        Self::new(problem, x)
    }

    /// Recomputes fields and energy from scratch.
    pub fn resync(&mut self) {
        let p = self.problem;
        for i in 0..self.x.len() {
            let mut f = p.diagonal()[i];
            for (j, w) in p.adjacency().row(i) {
                if self.x[j] == 1 {
                    f += w;
                }
            }
            self.field[i] = f;
        }
        self.energy = p.energy_unchecked(&self.x);
    }

    /// Overwrites the running energy with an exactly evaluated value.
    pub fn resync_energy(&mut self, exact: f64) {
        self.energy = exact;
    }

    pub fn state(&self) -> &[u8] {
        &self.x
    }

    /// Running energy, accumulated from flip deltas.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    #[inline]
    pub fn delta(&self, i: usize) -> f64 {
        if self.x[i] == 1 {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        let d = self.delta(i);
        self.x[i] ^= 1;
        let (nbr, w) = self.problem.adjacency().row_slices(i);
        if self.x[i] == 1 {
            for (&j, &wj) in nbr.iter().zip(w) {
                self.field[j] += wj;
            }
        } else {
            for (&j, &wj) in nbr.iter().zip(w) {
                self.field[j] -= wj;
            }
        }
        self.energy += d;
    }

    /// One pass of `n` Metropolis proposals in index order at inverse
    /// temperature `beta`. Returns the number of accepted flips.
    pub fn sweep(&mut self, beta: f64, rng: &mut impl Rng) -> usize {
        let mut accepted = 0;
        for i in 0..self.x.len() {
            let d = self.delta(i);
            if d <= 0.0 || rng.random::<f64>() < (-beta * d).exp() {
                self.flip(i);
                accepted += 1;
            }
        }
        accepted
    }

    /// Replaces the state with a fresh uniform random assignment.
    pub fn randomize(&mut self, rng: &mut impl Rng) {
        for b in self.x.iter_mut() {
            *b = u8::from(rng.random::<bool>());
        }
        self.resync();
    }
}

/// Mean non-zero `|Δ|` over all single flips of one random assignment; `1.0`
/// for a problem with no non-zero deltas.
pub fn mean_abs_delta(problem: &QuboProblem, rng: &mut impl Rng) -> f64 {
    let chain = MetropolisChain::random(problem, rng);
    let (sum, count) = (0..problem.num_vars())
        .map(|i| chain.delta(i).abs())
        .filter(|d| *d > 0.0)
        .fold((0.0, 0usize), |(s, c), d| (s + d, c + 1));
    if count == 0 {
        1.0
    } else {
        sum / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BinaryAssignment;
    use crate::rng::RngSeed;

    #[test]
    fn running_energy_tracks_full_evaluation() {
        let p = QuboProblem::from_dense(
            &[vec![1.0, -2.0, 0.5], vec![0.0, -1.0, 3.0], vec![0.0, 0.0, 0.25]],
            0.75,
        )
        .unwrap();
        let mut rng = RngSeed(4).rng();
        let mut chain = MetropolisChain::random(&p, &mut rng);
        for _ in 0..200 {
            chain.sweep(0.7, &mut rng);
            let x = BinaryAssignment(chain.state().to_vec());
            assert!((chain.energy() - p.energy(&x).unwrap()).abs() < 1e-12);
            for i in 0..3 {
                assert!((chain.delta(i) - p.flip_delta(&x, i).unwrap()).abs() < 1e-12);
            }
        }
    }
}
