//! Block-harmonic β-steering step sizes.

use crate::error::{invalid, Result};

/// Step sizes `σ_t = c / (⌊t/β⌋ + 1)`: constant on blocks of length β,
/// tending to zero with a divergent sum. The scale `c > 0` defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringSpec {
    beta: usize,
    scale: f64,
}

impl SteeringSpec {
    pub fn new(beta: usize) -> Result<Self> {
        if beta == 0 {
            return Err(invalid("beta must be a positive integer"));
        }
        Ok(Self { beta, scale: 1.0 })
    }

    pub fn with_scale(self, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(invalid(format!("steering scale must be > 0, got {scale}")));
        }
        Ok(Self { scale, ..self })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn value(&self, t: usize) -> f64 {
        self.scale / ((t / self.beta) as f64 + 1.0)
    }
}

impl Default for SteeringSpec {
    fn default() -> Self {
        Self {
            beta: 100,
            scale: 1.0,
        }
    }
}

pub fn steering_value(spec: &SteeringSpec, t: usize) -> f64 {
    spec.value(t)
}
