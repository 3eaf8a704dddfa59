//! Core sets with closed-form metric projections.

use crate::error::{check_dim, invalid, Result};
use crate::vector::{dot, norm};

/// Tolerance used when checking that a projected point lies in its set.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Shape and parameters of a [`CoreSet`].
#[derive(Debug, Clone, PartialEq)]
pub enum CoreSetKind {
    /// `[lo, hi] ⊂ ℝ`.
    Interval { lo: f64, hi: f64 },
    /// Axis-aligned box `{ y : lo ≤ y ≤ hi }`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// `{ y : ⟨normal, y⟩ ≤ offset }`.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// `{ y : ⟨normal, y⟩ = offset }`.
    Hyperplane { normal: Vec<f64>, offset: f64 },
    /// Product of independent intervals. Same semantics as `Box`, used for
    /// image-sized constraints with one interval per pixel.
    IntervalProduct { lo: Vec<f64>, hi: Vec<f64> },
}

/// A nonempty, closed, convex set with an exact projection.
///
/// Constructors validate the parameters, so every value of this type is a
/// well-formed set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreSet {
    kind: CoreSetKind,
}

fn check_bounds(lo: &[f64], hi: &[f64]) -> Result<()> {
    check_dim(lo.len(), hi.len())?;
    if lo.is_empty() {
        return Err(invalid("bounds must have at least one component"));
    }
    for (k, (l, h)) in lo.iter().zip(hi).enumerate() {
        if l.is_nan() || h.is_nan() || l > h {
            return Err(invalid(format!(
                "lower bound {l} exceeds upper bound {h} at component {k}"
            )));
        }
    }
    Ok(())
}

fn check_normal(normal: &[f64], offset: f64) -> Result<()> {
    if normal.is_empty() || normal.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
        return Err(invalid("normal and offset must be finite and nonempty"));
    }
    if norm(normal) == 0.0 {
        return Err(invalid("normal vector must be nonzero"));
    }
    Ok(())
}

impl CoreSet {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        check_bounds(&[lo], &[hi])?;
        Ok(Self {
            kind: CoreSetKind::Interval { lo, hi },
        })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_bounds(&lo, &hi)?;
        Ok(Self {
            kind: CoreSetKind::Box { lo, hi },
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || center.iter().any(|v| !v.is_finite()) {
            return Err(invalid("ball center must be finite and nonempty"));
        }
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(invalid(format!("ball radius must be >= 0, got {radius}")));
        }
        Ok(Self {
            kind: CoreSetKind::Ball { center, radius },
        })
    }

    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self {
            kind: CoreSetKind::Halfspace { normal, offset },
        })
    }

    pub fn hyperplane(normal: Vec<f64>, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self {
            kind: CoreSetKind::Hyperplane { normal, offset },
        })
    }

    pub fn interval_product(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_bounds(&lo, &hi)?;
        Ok(Self {
            kind: CoreSetKind::IntervalProduct { lo, hi },
        })
    }

    pub fn kind(&self) -> &CoreSetKind {
        &self.kind
    }

    /// Ambient dimension of the set.
    pub fn dim(&self) -> usize {
        match &self.kind {
            CoreSetKind::Interval { .. } => 1,
            CoreSetKind::Box { lo, .. } | CoreSetKind::IntervalProduct { lo, .. } => lo.len(),
            CoreSetKind::Ball { center, .. } => center.len(),
            CoreSetKind::Halfspace { normal, .. } | CoreSetKind::Hyperplane { normal, .. } => {
                normal.len()
            }
        }
    }

    /// Metric projection of `z` onto the set.
    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; z.len()];
        self.project_into(z, &mut out)?;
        Ok(out)
    }

    /// Metric projection of `z`, written into `out`.
    pub fn project_into(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim(), z.len())?;
        check_dim(z.len(), out.len())?;
        match &self.kind {
            CoreSetKind::Interval { lo, hi } => out[0] = z[0].clamp(*lo, *hi),
            CoreSetKind::Box { lo, hi } | CoreSetKind::IntervalProduct { lo, hi } => {
                for (((o, zi), l), h) in out.iter_mut().zip(z).zip(lo).zip(hi) {
                    *o = zi.clamp(*l, *h);
                }
            }
            CoreSetKind::Ball { center, radius } => {
                let d: f64 = z
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                if d <= *radius {
                    out.copy_from_slice(z);
                } else {
                    // d > radius >= 0, so d > 0
                    let t = radius / d;
                    for ((o, zi), c) in out.iter_mut().zip(z).zip(center) {
                        *o = c + t * (zi - c);
                    }
                }
            }
            CoreSetKind::Halfspace { normal, offset } => {
                let excess = dot(normal, z) - offset;
                let t = if excess > 0.0 {
                    excess / dot(normal, normal)
                } else {
                    0.0
                };
                for ((o, zi), a) in out.iter_mut().zip(z).zip(normal) {
                    *o = zi - t * a;
                }
            }
            CoreSetKind::Hyperplane { normal, offset } => {
                let t = (dot(normal, z) - offset) / dot(normal, normal);
                for ((o, zi), a) in out.iter_mut().zip(z).zip(normal) {
                    *o = zi - t * a;
                }
            }
        }
        Ok(())
    }

    /// Largest violation of the set's defining inequalities at `y`, measured
    /// as a distance (0 for members).
    pub fn violation(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), y.len())?;
        let v = match &self.kind {
            CoreSetKind::Interval { lo, hi } => (lo - y[0]).max(y[0] - hi).max(0.0),
            CoreSetKind::Box { lo, hi } | CoreSetKind::IntervalProduct { lo, hi } => y
                .iter()
                .zip(lo)
                .zip(hi)
                .map(|((yi, l), h)| (l - yi).max(yi - h))
                .fold(0.0, f64::max),
            CoreSetKind::Ball { center, radius } => {
                let d: f64 = y
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                (d - radius).max(0.0)
            }
            CoreSetKind::Halfspace { normal, offset } => {
                ((dot(normal, y) - offset) / norm(normal)).max(0.0)
            }
            CoreSetKind::Hyperplane { normal, offset } => {
                (dot(normal, y) - offset).abs() / norm(normal)
            }
        };
        Ok(v)
    }

    /// True iff `y` violates the set's constraints by at most `tol`.
    pub fn contains(&self, y: &[f64], tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(invalid(format!("tolerance must be >= 0, got {tol}")));
        }
        Ok(self.violation(y)? <= tol)
    }
}
