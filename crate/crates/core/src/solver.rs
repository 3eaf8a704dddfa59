//! Proximity function, its gradient, and the simultaneous and sequential
//! descent methods for the implicit feasibility problem
//! `find x ∈ ∩_s C_s(x)`.
//!
//! With `K_s = (1/α_s) U_sᵀ (I − A_s)` the proximity function reads
//!
//! ```text
//! G(x) = ½ Σ_s α_s² ‖(I − P_{Ω_s})(K_s x)‖²
//! ∇G(x) = Σ_s α_s² K_sᵀ (I − P_{Ω_s})(K_s x)
//! ```
//!
//! and the gradient is Lipschitz with constant `L = Σ_s ‖I − A_s‖₂²`.

use std::fmt;

use crate::error::{check_dim, invalid, Error, Result};
use crate::linear::{LinearMap, POWER_ITERATIONS};
use crate::steering::SteeringSpec;
use crate::variable::{lipschitz_constant_with, VariableSet};
use crate::vector::{distance, norm, norm_sq};

/// A family of variable sets over a common space, with `K_s` and `L`
/// precomputed.
#[derive(Debug, Clone)]
pub struct IcfpInstance {
    sets: Vec<VariableSet>,
    k_ops: Vec<LinearMap>,
    lipschitz: f64,
}

impl IcfpInstance {
    pub fn new(sets: Vec<VariableSet>) -> Result<Self> {
        Self::with_norm_seed(sets, 0)
    }

    /// Like [`IcfpInstance::new`], seeding the power iterations with `seed`.
    pub fn with_norm_seed(sets: Vec<VariableSet>, seed: u64) -> Result<Self> {
        let lipschitz = lipschitz_constant_with(&sets, POWER_ITERATIONS, seed)?;
        let k_ops = sets.iter().map(VariableSet::make_k).collect();
        Ok(Self {
            sets,
            k_ops,
            lipschitz,
        })
    }

    pub fn sets(&self) -> &[VariableSet] {
        &self.sets
    }

    pub fn k_ops(&self) -> &[LinearMap] {
        &self.k_ops
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sets[0].dim()
    }

    /// Upper end of the admissible step-size interval `(0, 2/L)`.
    pub fn max_step(&self) -> f64 {
        if self.lipschitz > 0.0 {
            2.0 / self.lipschitz
        } else {
            f64::INFINITY
        }
    }

    pub fn check_step(&self, gamma: f64) -> Result<()> {
        let upper = self.max_step();
        if gamma > 0.0 && gamma < upper {
            Ok(())
        } else {
            Err(Error::StepSizeOutOfRange {
                gamma,
                upper,
                lipschitz: self.lipschitz,
            })
        }
    }

    /// Adds `weight · α_s² K_sᵀ (I − P_Ω)(K_s x)` to `acc` and returns
    /// `½ α_s² ‖(I − P_Ω)(K_s x)‖²`.
    fn accumulate_term(&self, s: usize, x: &[f64], weight: f64, acc: Option<&mut [f64]>) -> f64 {
        let set = &self.sets[s];
        let k = &self.k_ops[s];
        let alpha_sq = set.alpha() * set.alpha();
        let mut kx = vec![0.0; k.rows()];
        k.apply_into(x, &mut kx);
        let mut proj = vec![0.0; kx.len()];
        set.core()
            .project_into(&kx, &mut proj)
            .expect("dimensions checked at construction");
        // residual (I − P)(Kx), reusing kx
        for (r, p) in kx.iter_mut().zip(&proj) {
            *r -= p;
        }
        let value = 0.5 * alpha_sq * norm_sq(&kx);
        if let Some(acc) = acc {
            let mut back = proj;
            k.apply_adjoint_into(&kx, &mut back);
            let w = weight * alpha_sq;
            for (a, b) in acc.iter_mut().zip(&back) {
                *a += w * b;
            }
        }
        value
    }

    /// `G(x)`.
    pub fn proximity(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok((0..self.len())
            .map(|s| self.accumulate_term(s, x, 0.0, None))
            .sum())
    }

    /// `∇G(x)`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.proximity_and_gradient(x)?.1)
    }

    /// `G(x)` and `∇G(x)` from one pass over the sets. Terms are accumulated
    /// in set order.
    pub fn proximity_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.dim(), x.len())?;
        let mut grad = vec![0.0; x.len()];
        let mut value = 0.0;
        for s in 0..self.len() {
            value += self.accumulate_term(s, x, 1.0, Some(&mut grad));
        }
        Ok((value, grad))
    }

    /// `x − γ ∇G(x)` for `γ ∈ (0, 2/L)`.
    pub fn simultaneous_step(&self, x: &[f64], gamma: f64) -> Result<Vec<f64>> {
        self.check_step(gamma)?;
        let (_, grad) = self.proximity_and_gradient(x)?;
        Ok(descend(x, &grad, gamma))
    }

    /// Index of the set used at sequential step `k` (cyclic control).
    pub fn control_index(&self, k: usize) -> usize {
        k % self.len()
    }

    /// One step of the sequential method: a gradient step of size `σ_k` on the
    /// single term of set `k mod S`.
    pub fn sequential_step(&self, x: &[f64], k: usize, steering: &SteeringSpec) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let mut out = x.to_vec();
        let s = self.control_index(k);
        self.accumulate_term(s, x, -steering.value(k), Some(&mut out));
        Ok(out)
    }
}

fn descend(x: &[f64], grad: &[f64], gamma: f64) -> Vec<f64> {
    x.iter().zip(grad).map(|(a, g)| a - gamma * g).collect()
}

pub fn proximity(instance: &IcfpInstance, x: &[f64]) -> Result<f64> {
    instance.proximity(x)
}

pub fn gradient(instance: &IcfpInstance, x: &[f64]) -> Result<Vec<f64>> {
    instance.gradient(x)
}

pub fn simultaneous_step(instance: &IcfpInstance, x: &[f64], gamma: f64) -> Result<Vec<f64>> {
    instance.simultaneous_step(x, gamma)
}

pub fn sequential_step(
    instance: &IcfpInstance,
    x: &[f64],
    k: usize,
    steering: &SteeringSpec,
) -> Result<Vec<f64>> {
    instance.sequential_step(x, k, steering)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Simultaneous,
    Sequential,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Simultaneous => "simultaneous",
            Algorithm::Sequential => "sequential",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simultaneous" => Ok(Algorithm::Simultaneous),
            "sequential" => Ok(Algorithm::Sequential),
            other => Err(invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Step size of the simultaneous method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `1 / L`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub max_iters: usize,
    pub gamma: StepSize,
    pub steering: SteeringSpec,
    /// Stop once `‖x^{k+1} − x^k‖ ≤ stop_tol`.
    pub stop_tol: f64,
    /// Record every n-th iteration in the trace (the final iterate is always
    /// recorded).
    pub trace_every: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            gamma: StepSize::Auto,
            steering: SteeringSpec::default(),
            stop_tol: 0.0,
            trace_every: 1,
        }
    }
}

impl SolveConfig {
    /// Resolved step size for `instance`, validated against `(0, 2/L)`.
    pub fn resolve_gamma(&self, instance: &IcfpInstance) -> Result<f64> {
        let gamma = match self.gamma {
            StepSize::Fixed(g) => g,
            StepSize::Auto if instance.lipschitz() > 0.0 => 1.0 / instance.lipschitz(),
            StepSize::Auto => 1.0,
        };
        instance.check_step(gamma)?;
        Ok(gamma)
    }

    pub fn validate(&self, instance: &IcfpInstance) -> Result<()> {
        if self.trace_every == 0 {
            return Err(invalid("trace_every must be >= 1"));
        }
        if !(self.stop_tol >= 0.0) {
            return Err(invalid("stop_tol must be >= 0"));
        }
        self.resolve_gamma(instance).map(|_| ())
    }
}

/// One recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    /// `G(x^k)`
    pub proximity: f64,
    /// `‖x^{k+1} − x^k‖`; `None` for the final iterate.
    pub step_norm: Option<f64>,
    /// Application metrics, one per entry of [`IterationTrace::metric_names`].
    pub metrics: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub metric_names: Vec<String>,
    pub records: Vec<TraceRecord>,
    /// Number of steps taken.
    pub iterations: usize,
    /// True when the stopping rule fired before `max_iters`.
    pub stopped: bool,
}

impl IterationTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn metric_index(&self, name: &str) -> Option<usize> {
        self.metric_names.iter().position(|n| n == name)
    }

    pub fn metric_series(&self, name: &str) -> Vec<(usize, Option<f64>)> {
        match self.metric_index(name) {
            Some(i) => self.records.iter().map(|r| (r.k, r.metrics[i])).collect(),
            None => Vec::new(),
        }
    }
}

/// Read-only hook called with every iterate `x^k`, including the final one.
pub trait Observer {
    fn metric_names(&self) -> Vec<String> {
        Vec::new()
    }

    /// Returns one value per metric name.
    fn observe(&mut self, k: usize, x: &[f64]) -> Vec<f64>;
}

/// Observer that records nothing.
pub struct NoMetrics;

impl Observer for NoMetrics {
    fn observe(&mut self, _k: usize, _x: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

/// Iterates are flagged as possibly unbounded past this multiple of the
/// initial norm.
const DIVERGENCE_FACTOR: f64 = 1e6;

/// Runs the chosen method from `x0`.
pub fn solve(
    instance: &IcfpInstance,
    x0: &[f64],
    config: &SolveConfig,
    algorithm: Algorithm,
    observer: &mut dyn Observer,
) -> Result<(Vec<f64>, IterationTrace)> {
    check_dim(instance.dim(), x0.len())?;
    config.validate(instance)?;
    let gamma = config.resolve_gamma(instance)?;

    let mut trace = IterationTrace {
        metric_names: observer.metric_names(),
        ..Default::default()
    };
    let bound = DIVERGENCE_FACTOR * norm(x0).max(1.0);
    let mut warned = false;
    let mut x = x0.to_vec();
    let mut k = 0;
    while k < config.max_iters {
        let (value, next) = match algorithm {
            Algorithm::Simultaneous => {
                let (value, grad) = instance.proximity_and_gradient(&x)?;
                (value, descend(&x, &grad, gamma))
            }
            Algorithm::Sequential => (
                instance.proximity(&x)?,
                instance.sequential_step(&x, k, &config.steering)?,
            ),
        };
        let step_norm = distance(&next, &x);
        let metrics = observer.observe(k, &x);
        if k % config.trace_every == 0 {
            trace.records.push(TraceRecord {
                k,
                proximity: value,
                step_norm: Some(step_norm),
                metrics: metrics.into_iter().map(Some).collect(),
            });
        }
        x = next;
        k += 1;
        if !warned && norm(&x) > bound {
            log::warn!("iterate norm exceeds {bound:e} at step {k}; the sequence may be unbounded");
            warned = true;
        }
        if step_norm <= config.stop_tol {
            trace.stopped = true;
            break;
        }
    }
    trace.iterations = k;
    let metrics = observer.observe(k, &x);
    trace.records.push(TraceRecord {
        k,
        proximity: instance.proximity(&x)?,
        step_norm: None,
        metrics: metrics.into_iter().map(Some).collect(),
    });
    Ok((x, trace))
}
