//! Variable sets `C(x) = α U(Ω) + A x` and their projections.

use std::sync::Arc;

use crate::error::{check_dim, invalid, Result};
use crate::linear::{estimate_norm, LinearMap, OrthogonalMap, POWER_ITERATIONS, POWER_TOL};
use crate::projection::CoreSet;

/// A core set `Ω` scaled by `α > 0`, rotated by an orthogonal `U` and shifted
/// by the linear image `A x` of the unknown.
#[derive(Debug, Clone)]
pub struct VariableSet {
    alpha: f64,
    rotation: OrthogonalMap,
    shift: Arc<LinearMap>,
    core: CoreSet,
}

impl VariableSet {
    pub fn new(
        alpha: f64,
        rotation: OrthogonalMap,
        shift: impl Into<Arc<LinearMap>>,
        core: CoreSet,
    ) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid(format!("alpha must be > 0, got {alpha}")));
        }
        let shift = shift.into();
        let n = core.dim();
        check_dim(n, rotation.dim())?;
        check_dim(n, shift.rows())?;
        check_dim(n, shift.cols())?;
        Ok(Self {
            alpha,
            rotation,
            shift,
            core,
        })
    }

    /// A fixed set `Ω` (α = 1, U = I, A = 0).
    pub fn fixed(core: CoreSet) -> Self {
        let n = core.dim();
        Self {
            alpha: 1.0,
            rotation: OrthogonalMap::identity(n),
            shift: Arc::new(LinearMap::zero(n)),
            core,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rotation(&self) -> &OrthogonalMap {
        &self.rotation
    }

    pub fn shift(&self) -> &LinearMap {
        &self.shift
    }

    pub fn core(&self) -> &CoreSet {
        &self.core
    }

    pub fn dim(&self) -> usize {
        self.core.dim()
    }

    /// The point `α U w + A x` of `C(x)` corresponding to `w ∈ Ω`.
    pub fn embed(&self, x: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let mut out = self.rotation.as_map().apply(w)?;
        let ax = self.shift.apply(x)?;
        for (o, s) in out.iter_mut().zip(&ax) {
            *o = self.alpha * *o + s;
        }
        Ok(out)
    }

    /// Metric projection of `z` onto `C(x)`:
    /// `P_{C(x)}(z) = α U P_Ω((1/α) Uᵀ (z − A x)) + A x`.
    pub fn project(&self, x: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        check_dim(n, x.len())?;
        check_dim(n, z.len())?;
        let u = self.rotation.as_map();

        let mut ax = vec![0.0; n];
        self.shift.apply_into(x, &mut ax);
        let diff: Vec<f64> = z.iter().zip(&ax).map(|(a, b)| a - b).collect();
        let mut local = vec![0.0; n];
        u.apply_adjoint_into(&diff, &mut local);
        local.iter_mut().for_each(|v| *v /= self.alpha);

        let mut projected = vec![0.0; n];
        self.core.project_into(&local, &mut projected)?;
        let mut out = vec![0.0; n];
        u.apply_into(&projected, &mut out);
        for (o, s) in out.iter_mut().zip(&ax) {
            *o = self.alpha * *o + s;
        }
        Ok(out)
    }

    /// `K = (1/α) Uᵀ (I − A)`; its adjoint is `(1/α)(I − Aᵀ) U`.
    pub fn make_k(&self) -> LinearMap {
        let residual = LinearMap::IdentityMinus(self.shift.clone());
        let rotated = if self.rotation.is_identity() {
            residual
        } else {
            LinearMap::Compose {
                outer: Arc::new(LinearMap::adjoint(self.rotation.as_map().clone())),
                inner: Arc::new(residual),
            }
        };
        LinearMap::scaled(1.0 / self.alpha, rotated)
    }

    /// `‖I − A‖₂`, exact for structurally zero or identity shifts, otherwise
    /// by power iteration. If the iteration has not converged the closed-form
    /// upper bound of the operator is used instead, when one exists.
    pub fn residual_norm(&self, iters: usize, seed: u64) -> Result<f64> {
        let residual = LinearMap::IdentityMinus(self.shift.clone());
        if self.shift.is_structurally_zero() {
            return Ok(1.0);
        }
        if residual.is_structurally_zero() {
            return Ok(0.0);
        }
        let est = estimate_norm(&residual, iters, POWER_TOL, seed)?;
        if est.converged {
            return Ok(est.value);
        }
        match residual.norm_upper_bound() {
            Some(bound) => {
                log::debug!(
                    "power iteration did not converge after {} steps (estimate {}), using bound {}",
                    est.iterations,
                    est.value,
                    bound
                );
                Ok(bound.max(est.value))
            }
            None => Ok(est.value),
        }
    }
}

/// `P_{C(x)}(z)` for the variable set `c`.
pub fn project_variable(c: &VariableSet, x: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    c.project(x, z)
}

/// `K = (1/α) Uᵀ (I − A)` for the variable set `c`.
pub fn make_k(c: &VariableSet) -> LinearMap {
    c.make_k()
}

/// `L = Σ_s ‖I − A_s‖₂²`, the Lipschitz constant of the proximity gradient.
pub fn lipschitz_constant(sets: &[VariableSet]) -> Result<f64> {
    lipschitz_constant_with(sets, POWER_ITERATIONS, 0)
}

pub fn lipschitz_constant_with(sets: &[VariableSet], iters: usize, seed: u64) -> Result<f64> {
    let first = sets
        .first()
        .ok_or_else(|| invalid("at least one variable set is required"))?;
    let mut total = 0.0;
    for s in sets {
        check_dim(first.dim(), s.dim())?;
        let n = s.residual_norm(iters, seed)?;
        total += n * n;
    }
    Ok(total)
}
