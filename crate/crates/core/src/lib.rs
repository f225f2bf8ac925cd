//! QUBO and Ising optimisation toolkit.
//!
//! - [`model`]: problem types, energies, flip deltas and QUBO/Ising conversion.
//! - [`instances`]: NAE 3-SAT and SK generators, instance files, classifier.
//! - [`solvers`]: simulated annealing, parallel tempering, simulated
//!   bifurcation and an exhaustive oracle.
//! - [`harness`]: seeded benchmark runs and win/ratio/curve reports.

pub mod error;
pub mod harness;
pub mod instances;
pub mod model;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{
    ising_to_qubo, qubo_to_ising, BinaryAssignment, Coupling, IsingProblem, QuboBuilder,
    QuboEntry, QuboProblem, SpinAssignment,
};
pub use rng::RngSeed;
