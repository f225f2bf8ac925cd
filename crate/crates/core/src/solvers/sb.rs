//! Ballistic simulated bifurcation.
//!
//! Each variable becomes an oscillator with position `x` and momentum `y`.
//! With the pump `a(t)` ramped linearly from 0 to `a0`, one symplectic-Euler
//! step is
//!
//! ```text
//! y_i += Δt · (-(a0 - a(t)) x_i - c0 (Σ_j J_ij x_j + h_i))
//! x_i += Δt · a0 · y_i
//! |x_i| > 1  =>  x_i = sign(x_i), y_i = 0
//! ```
//!
//! where `J, h` are the Ising form of the problem (`E = Σ_{i<j} J s s + Σ h s`,
//! minimised). Fields are carried by an extra oscillator pinned at `x = +1`.
//! Spins are read out as `sign(x_i)` after every step.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;

use super::params::ParamMap;
use super::{check_inputs, PassPlanner, SolveRun, SolverBudget, Tracker, EXHAUSTED_WARNING};
use crate::error::{Error, Result};
use crate::model::{IsingProblem, QuboProblem};

/// Unset `c0` defaults to `0.5 / (√N σ_J)` with `σ_J` the RMS coupling over
/// all ordered oscillator pairs. Each pump ramp is `steps` long; the run
/// restarts from fresh small random amplitudes until the budget is spent.
#[derive(Debug, Clone, PartialEq)]
pub struct SbParams {
    pub dt: f64,
    pub steps: u64,
    pub a0: f64,
    pub c0: Option<f64>,
}

pub const DEFAULT_RAMP_STEPS: u64 = 250;

impl Default for SbParams {
    fn default() -> Self {
        SbParams { dt: 0.5, steps: DEFAULT_RAMP_STEPS, a0: 1.0, c0: None }
    }
}

impl SbParams {
    pub fn from_map(map: &ParamMap) -> Result<Self> {
        map.reject_unknown(&["dt", "steps", "a0", "c0"])?;
        let d = SbParams::default();
        let p = SbParams {
            dt: map.get("dt")?.unwrap_or(d.dt),
            steps: map.get("steps")?.unwrap_or(d.steps),
            a0: map.get("a0")?.unwrap_or(d.a0),
            c0: map.get("c0")?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("dt", Some(self.dt)), ("a0", Some(self.a0)), ("c0", self.c0)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be positive".into()));
        }
        Ok(())
    }
}

/// Symmetric coupling rows of the oscillator network.
struct Network {
    n: usize,
    oscillators: usize,
    start: Vec<usize>,
    nbr: Vec<usize>,
    weight: Vec<f64>,
}

impl Network {
    fn from_ising(p: &IsingProblem) -> Self {
        let n = p.num_spins();
        let has_fields = p.fields().iter().any(|&h| h != 0.0);
        let oscillators = if has_fields { n + 1 } else { n };
        let mut pairs: Vec<(usize, usize, f64)> =
            p.couplings().iter().map(|c| (c.i, c.j, c.value)).collect();
        if has_fields {
            pairs.extend(p.fields().iter().enumerate().filter(|(_, &h)| h != 0.0).map(|(i, &h)| (i, n, h)));
        }
        let mut degree = vec![0usize; oscillators];
        for &(i, j, _) in &pairs {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut start = vec![0usize; oscillators + 1];
        for i in 0..oscillators {
            start[i + 1] = start[i] + degree[i];
        }
        let mut fill = start.clone();
        let mut nbr = vec![0usize; start[oscillators]];
        let mut weight = vec![0.0; start[oscillators]];
        for &(i, j, w) in &pairs {
            nbr[fill[i]] = j;
            weight[fill[i]] = w;
            fill[i] += 1;
            nbr[fill[j]] = i;
            weight[fill[j]] = w;
            fill[j] += 1;
        }
        Network { n, oscillators, start, nbr, weight }
    }

    fn default_c0(&self) -> f64 {
        let m = self.oscillators as f64;
        let sum_sq: f64 = self.weight.iter().map(|w| w * w).sum();
        if m < 2.0 || sum_sq == 0.0 {
            return 0.5;
        }
        let sigma = (sum_sq / (m * (m - 1.0))).sqrt();
        0.5 / (m.sqrt() * sigma)
    }

    fn force(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let (a, b) = (self.start[i], self.start[i + 1]);
            let mut f = 0.0;
            for (&j, &w) in self.nbr[a..b].iter().zip(&self.weight[a..b]) {
                f += w * x[j];
            }
            out[i] = f;
        }
    }
}

pub fn solve_sb(problem: &QuboProblem, params: &SbParams, budget: &SolverBudget) -> Result<SolveRun> {
    check_inputs(problem, budget)?;
    params.validate()?;
    let start = Instant::now();
    let mut rng = budget.seed.rng();
    let net = Network::from_ising(&problem.to_ising());
    let c0 = params.c0.unwrap_or_else(|| net.default_c0());
    let (dt, a0) = (params.dt, params.a0);
    let n = net.n;

    let mut tracker = Tracker::new(problem, *budget, start);
    let mut x = vec![0.0; net.oscillators];
    let mut y = vec![0.0; net.oscillators];
    let mut force = vec![0.0; n];
    let mut bits = vec![0u8; n];

    let init = |x: &mut [f64], y: &mut [f64], rng: &mut rand_chacha::ChaCha8Rng| {
        for i in 0..n {
            x[i] = rng.random_range(-0.1..=0.1);
            y[i] = rng.random_range(-0.1..=0.1);
        }
        if net.oscillators > n {
            x[n] = 1.0;
            y[n] = 0.0;
        }
    };
    let readout = |x: &[f64], bits: &mut [u8]| {
        for (b, &xi) in bits.iter_mut().zip(x) {
            *b = u8::from(xi >= 0.0);
        }
    };

    init(&mut x, &mut y, &mut rng);
    readout(&x, &mut bits);
    tracker.offer(&bits, f64::NEG_INFINITY);

    let planner = PassPlanner::new(params.steps, budget);
    let mut done = 0u64;
    let mut passes = 0u64;
    let mut aborted = None;
    let mut stopped = tracker.target_reached();
    'outer: while !stopped {
        let Some(len) = planner.next(done, tracker.elapsed()) else { break };
        if passes > 0 {
            init(&mut x, &mut y, &mut rng);
        }
        passes += 1;
        for k in 0..len {
            let a = a0 * (k + 1) as f64 / len as f64;
            net.force(&x, &mut force);
            let mut finite = true;
            for i in 0..n {
                y[i] += dt * (-(a0 - a) * x[i] - c0 * force[i]);
                finite &= y[i].is_finite();
            }
            for i in 0..n {
                x[i] += dt * a0 * y[i];
                if x[i].abs() > 1.0 {
                    x[i] = x[i].signum();
                    y[i] = 0.0;
                }
            }
            done += 1;
            if !finite {
                aborted = Some(format!("non-finite oscillator state at step {done}"));
                break 'outer;
            }
            readout(&x, &mut bits);
            tracker.offer(&bits, f64::NEG_INFINITY);
            if tracker.target_reached() || tracker.out_of_time() {
                stopped = true;
                break;
            }
        }
    }

    let mut resolved = BTreeMap::new();
    resolved.insert("dt".into(), dt.to_string());
    resolved.insert("a0".into(), a0.to_string());
    resolved.insert("c0".into(), c0.to_string());
    resolved.insert("steps".into(), params.steps.to_string());
    let mut run = tracker.finish("sb", done, resolved);
    run.stats.insert("restarts".into(), passes.saturating_sub(1) as f64);
    if let Some(msg) = aborted {
        run.aborted = true;
        run.warning = Some(msg);
    } else if done == 0 {
        run.warning = Some(EXHAUSTED_WARNING.into());
    }
    Ok(run)
}
