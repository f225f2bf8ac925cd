//! Instance generators, file ingestion and the size/density classifier.

mod mqlib;
mod nae3sat;
mod sk;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::QuboProblem;

pub use mqlib::{load_mqlib, parse_mqlib, write_mqlib};
pub use nae3sat::{gen_nae3sat, nae3sat_to_ising, Clause, Literal, Nae3SatFormula, CRITICAL_RATIO};
pub use sk::{gen_sk, sk_gaussians, sk_num_couplings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SizeClass {
    Small,
    Medium,
    Large,
    OutOfRange,
}

impl SizeClass {
    /// Small `[1000, 2500]`, Medium `(2500, 5000]`, Large `(5000, 10000]`.
    pub fn of(n: usize) -> Self {
        match n {
            1000..=2500 => SizeClass::Small,
            2501..=5000 => SizeClass::Medium,
            5001..=10000 => SizeClass::Large,
            _ => SizeClass::OutOfRange,
        }
    }

    /// Position in the 3×3 grid; `None` for out-of-range sizes.
    pub fn index(self) -> Option<usize> {
        match self {
            SizeClass::Small => Some(0),
            SizeClass::Medium => Some(1),
            SizeClass::Large => Some(2),
            SizeClass::OutOfRange => None,
        }
    }

    pub const GRID: [SizeClass; 3] = [SizeClass::Small, SizeClass::Medium, SizeClass::Large];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DensityClass {
    Sparse,
    Medium,
    Dense,
}

impl DensityClass {
    /// Sparse `d <= 0.1`, Medium `0.1 < d <= 0.5`, Dense `d > 0.5`.
    pub fn of(d: f64) -> Self {
        if d <= 0.1 {
            DensityClass::Sparse
        } else if d <= 0.5 {
            DensityClass::Medium
        } else {
            DensityClass::Dense
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub const GRID: [DensityClass; 3] =
        [DensityClass::Sparse, DensityClass::Medium, DensityClass::Dense];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub name: String,
    pub n: usize,
    pub density: f64,
    pub size_class: SizeClass,
    pub density_class: DensityClass,
}

/// Coupled off-diagonal pairs over `n(n-1)/2`; zero below two variables.
pub fn edge_density(n: usize, pairs: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    pairs as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
}

pub fn classify(p: &QuboProblem, name: &str) -> InstanceMetadata {
    let n = p.num_vars();
    let density = edge_density(n, p.num_couplings());
    InstanceMetadata {
        name: name.to_string(),
        n,
        density,
        size_class: SizeClass::of(n),
        density_class: DensityClass::of(density),
    }
}

/// JSON sidecar written next to generated instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSidecar {
    pub name: String,
    pub n: usize,
    pub density: f64,
    pub size_class: SizeClass,
    pub density_class: DensityClass,
    pub generator: String,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl InstanceSidecar {
    pub fn new(
        meta: InstanceMetadata,
        generator: &str,
        seed: Option<u64>,
        params: BTreeMap<String, serde_json::Value>,
    ) -> Self {
        InstanceSidecar {
            name: meta.name,
            n: meta.n,
            density: meta.density,
            size_class: meta.size_class,
            density_class: meta.density_class,
            generator: generator.to_string(),
            seed,
            params,
        }
    }

    /// Clause count for NAE 3-SAT instances.
    pub fn clauses(&self) -> Option<usize> {
        self.params.get("m").and_then(|v| v.as_u64()).map(|m| m as usize)
    }

    /// `<instance path>.meta.json`.
    pub fn path_for(instance: &std::path::Path) -> std::path::PathBuf {
        let mut s = instance.as_os_str().to_owned();
        s.push(".meta.json");
        s.into()
    }
}
