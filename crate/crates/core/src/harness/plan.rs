use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instances::{
    classify, gen_nae3sat, gen_sk, load_mqlib, InstanceMetadata, InstanceSidecar,
};
use crate::model::QuboProblem;
use crate::rng::RngSeed;
use crate::solvers::{ParamMap, SolverKind};

/// Benchmark definition, usually read from a JSON plan file.
///
/// ```json
/// {
///   "instances": ["a.qubo", {"generator": "sk", "n": 128, "seed": 1}],
///   "solvers": [{"id": "sa", "params": {"sweeps": 1000}}],
///   "time_budgets": [1.0, 5.0],
///   "runs_per_point": 2,
///   "base_seed": 7
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPlan {
    pub instances: Vec<InstanceSpec>,
    pub solvers: Vec<SolverSpec>,
    #[serde(default)]
    pub time_budgets: Vec<f64>,
    /// Sweep-limited budgets, run after the time budgets. Reproducible bit for bit.
    #[serde(default)]
    pub sweep_budgets: Vec<u64>,
    pub runs_per_point: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    Generated(GeneratorSpec),
    File { path: PathBuf },
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Nae3sat {
        n: usize,
        m: usize,
        seed: u64,
        #[serde(default)]
        name: Option<String>,
    },
    Sk {
        n: usize,
        seed: u64,
        #[serde(default)]
        name: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub id: String,
    /// Distinguishes several configurations of one solver; defaults to `id`.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl SolverSpec {
    pub fn new(id: &str) -> Self {
        SolverSpec { id: id.to_string(), label: None, params: Default::default() }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }

    pub fn kind(&self) -> Result<SolverKind> {
        self.id.parse()
    }

    pub fn param_map(&self) -> Result<ParamMap> {
        ParamMap::from_json(&self.params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Time(f64),
    Sweeps(u64),
}

impl Budget {
    pub fn value(&self) -> f64 {
        match *self {
            Budget::Time(s) => s,
            Budget::Sweeps(k) => k as f64,
        }
    }
}

impl std::fmt::Display for Budget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Budget::Time(s) => write!(f, "{s}s"),
            Budget::Sweeps(k) => write!(f, "{k}sw"),
        }
    }
}

impl GeneratorSpec {
    pub fn name(&self) -> String {
        match self {
            GeneratorSpec::Nae3sat { n, m, seed, name } => {
                name.clone().unwrap_or_else(|| format!("nae3sat-n{n}-m{m}-s{seed}"))
            }
            GeneratorSpec::Sk { n, seed, name } => {
                name.clone().unwrap_or_else(|| format!("sk-n{n}-s{seed}"))
            }
        }
    }
}

impl InstanceSpec {
    fn path(&self) -> Option<&Path> {
        match self {
            InstanceSpec::File { path } | InstanceSpec::Path(path) => Some(path),
            InstanceSpec::Generated(_) => None,
        }
    }

    /// Name used in records. Files use the sidecar name, else the file stem.
    pub fn name(&self) -> String {
        match self {
            InstanceSpec::Generated(g) => g.name(),
            InstanceSpec::File { path } | InstanceSpec::Path(path) => {
                read_sidecar(path).map(|s| s.name).filter(|n| !n.is_empty()).unwrap_or_else(|| {
                    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
                })
            }
        }
    }

    pub fn load(&self) -> Result<LoadedInstance> {
        match self {
            InstanceSpec::Generated(g) => Ok(g.generate()?),
            InstanceSpec::File { path } | InstanceSpec::Path(path) => {
                let (problem, mut meta) = load_mqlib(path)?;
                let sidecar = read_sidecar(path);
                meta.name = self.name();
                let clauses = sidecar.as_ref().and_then(|s| s.clauses());
                Ok(LoadedInstance { problem, meta, clauses })
            }
        }
    }
}

fn read_sidecar(path: &Path) -> Option<InstanceSidecar> {
    let text = std::fs::read_to_string(InstanceSidecar::path_for(path)).ok()?;
    serde_json::from_str(&text).ok()
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<LoadedInstance> {
        let name = self.name();
        let (problem, clauses) = match *self {
            GeneratorSpec::Nae3sat { n, m, seed, .. } => {
                let f = gen_nae3sat(n, m, RngSeed(seed))?;
                (f.to_ising().to_qubo(), Some(m))
            }
            GeneratorSpec::Sk { n, seed, .. } => (gen_sk(n, RngSeed(seed))?.to_qubo(), None),
        };
        let meta = classify(&problem, &name);
        Ok(LoadedInstance { problem, meta, clauses })
    }
}

#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub problem: QuboProblem,
    pub meta: InstanceMetadata,
    /// Clause count for NAE 3-SAT instances (per-clause normalisation).
    pub clauses: Option<usize>,
}

impl BenchmarkPlan {
    /// Reads a plan; relative instance paths resolve against the plan's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut plan: BenchmarkPlan = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for spec in plan.instances.iter_mut() {
            if let InstanceSpec::File { path: p } | InstanceSpec::Path(p) = spec {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        plan.validate()?;
        Ok(plan)
    }

    pub fn budgets(&self) -> Vec<Budget> {
        self.time_budgets
            .iter()
            .map(|&s| Budget::Time(s))
            .chain(self.sweep_budgets.iter().map(|&k| Budget::Sweeps(k)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.instances.is_empty() {
            return invalid("plan has no instances");
        }
        if self.solvers.is_empty() {
            return invalid("plan has no solvers");
        }
        if self.budgets().is_empty() {
            return invalid("plan has no budgets");
        }
        if self.runs_per_point == 0 {
            return invalid("runs_per_point must be positive");
        }
        if self.time_budgets.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return invalid("time budgets must be positive");
        }
        let mut labels = HashSet::new();
        for s in &self.solvers {
            s.kind()?;
            s.param_map()?;
            if !labels.insert(s.label().to_string()) {
                return Err(Error::InvalidParameter(format!(
                    "solver label `{}` appears twice; set `label`",
                    s.label()
                )));
            }
        }
        let mut names = HashSet::new();
        for i in &self.instances {
            if !names.insert(i.name()) {
                return Err(Error::InvalidParameter(format!("instance name `{}` appears twice", i.name())));
            }
        }
        Ok(())
    }

    /// Instance paths referenced by the plan.
    pub fn instance_paths(&self) -> Vec<&Path> {
        self.instances.iter().filter_map(InstanceSpec::path).collect()
    }

    /// Parameters echoed into reproducibility headers.
    pub fn summary(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("base_seed", self.base_seed.to_string());
        m.insert("instances", self.instances.len().to_string());
        m.insert(
            "solvers",
            self.solvers.iter().map(|s| s.label().to_string()).collect::<Vec<_>>().join(","),
        );
        m.insert(
            "budgets",
            self.budgets().iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
        );
        m.insert("runs_per_point", self.runs_per_point.to_string());
        m
    }
}

/// Seed for one cell: the first 8 bytes (little endian) of
/// `SHA-256(base_seed ‖ instance ‖ 0 ‖ solver ‖ 0 ‖ budget_index ‖ run)`,
/// integers as little-endian `u64`.
pub fn cell_seed(base_seed: u64, instance: &str, solver: &str, budget_index: usize, run: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    h.update(instance.as_bytes());
    h.update([0]);
    h.update(solver.as_bytes());
    h.update([0]);
    h.update((budget_index as u64).to_le_bytes());
    h.update((run as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}
