//! Matrix-free linear operators.
//!
//! [`LinearMap`] covers the handful of operator shapes the solvers need:
//! small dense matrices for hand-written instances, identity-like maps, and
//! the two-point averaging stencils used on image grids. Compound maps such
//! as `(1/α) Uᵀ (I − A)` are built from the combinator variants and share
//! their operands through `Arc`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, invalid, Result};
use crate::vector::{norm, norm_sq};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix must have at least one row and column"));
        }
        check_dim(rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(crate::Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for k in 0..n {
            data[k * n + k] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::identity(n);
        for (k, d) in diag.iter().enumerate() {
            m.data[k * n + k] = *d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn frobenius(&self) -> f64 {
        norm(&self.data)
    }
}

/// Neighbor direction of an averaging stencil on an image grid.
///
/// Offsets are `(di, dj)` with `i` the column (horizontal) index and `j` the
/// row index. The stencil at `(i, j)` averages the pixels at `(i, j) ± (di, dj)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
    AntiDiagonal,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::Diagonal,
        Direction::AntiDiagonal,
    ];

    pub fn offset(self) -> (isize, isize) {
        match self {
            Direction::Horizontal => (1, 0),
            Direction::Vertical => (0, 1),
            Direction::Diagonal => (1, 1),
            // neighbors (i + 1, j − 1) and (i − 1, j + 1)
            Direction::AntiDiagonal => (1, -1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
            Direction::AntiDiagonal => "anti-diagonal",
        }
    }
}

/// Two-point averaging on a `width × height` grid with constant (clamped)
/// extension at the border:
/// `(A x)[i, j] = ½ (x[clamp(i + di, j + dj)] + x[clamp(i − di, j − dj)])`.
///
/// Pixels are stored row-major, index `j * width + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AveragingStencil {
    width: usize,
    height: usize,
    direction: Direction,
}

#[inline]
fn clamp_index(v: isize, n: usize) -> usize {
    v.clamp(0, n as isize - 1) as usize
}

impl AveragingStencil {
    pub fn new(width: usize, height: usize, direction: Direction) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid("stencil grid must be nonempty"));
        }
        Ok(Self {
            width,
            height,
            direction,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat indices of the two (clamped) neighbors of pixel `(i, j)`.
    #[inline]
    pub fn neighbors(&self, i: usize, j: usize) -> (usize, usize) {
        let (di, dj) = self.direction.offset();
        let (i, j) = (i as isize, j as isize);
        let plus = clamp_index(j + dj, self.height) * self.width + clamp_index(i + di, self.width);
        let minus =
            clamp_index(j - dj, self.height) * self.width + clamp_index(i - di, self.width);
        (plus, minus)
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let w = self.width;
        out.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
            for (i, o) in row.iter_mut().enumerate() {
                let (p, m) = self.neighbors(i, j);
                *o = 0.5 * (x[p] + x[m]);
            }
        });
    }

    fn apply_adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        // fixed scatter order keeps the result independent of threading
        for j in 0..self.height {
            for i in 0..self.width {
                let (p, m) = self.neighbors(i, j);
                let v = 0.5 * y[j * self.width + i];
                out[p] += v;
                out[m] += v;
            }
        }
    }
}

/// A linear operator `ℝ^cols → ℝ^rows` with its adjoint.
#[derive(Debug, Clone)]
pub enum LinearMap {
    Dense(DenseMatrix),
    Identity(usize),
    Zero { rows: usize, cols: usize },
    ScaledIdentity { dim: usize, factor: f64 },
    Stencil(AveragingStencil),
    /// `factor · M`
    Scaled(f64, Arc<LinearMap>),
    /// `I − M` for square `M`.
    IdentityMinus(Arc<LinearMap>),
    /// `outer ∘ inner`: applies `inner` first.
    Compose {
        outer: Arc<LinearMap>,
        inner: Arc<LinearMap>,
    },
    /// `Mᵀ`
    Adjoint(Arc<LinearMap>),
}

impl LinearMap {
    pub fn dense(m: DenseMatrix) -> Self {
        LinearMap::Dense(m)
    }

    pub fn identity(n: usize) -> Self {
        LinearMap::Identity(n)
    }

    pub fn zero(n: usize) -> Self {
        LinearMap::Zero { rows: n, cols: n }
    }

    pub fn scaled_identity(dim: usize, factor: f64) -> Self {
        LinearMap::ScaledIdentity { dim, factor }
    }

    pub fn stencil(s: AveragingStencil) -> Self {
        LinearMap::Stencil(s)
    }

    pub fn scaled(factor: f64, m: impl Into<Arc<LinearMap>>) -> Self {
        LinearMap::Scaled(factor, m.into())
    }

    pub fn identity_minus(m: impl Into<Arc<LinearMap>>) -> Result<Self> {
        let m = m.into();
        if m.rows() != m.cols() {
            return Err(invalid("I − M requires a square M"));
        }
        Ok(LinearMap::IdentityMinus(m))
    }

    pub fn compose(
        outer: impl Into<Arc<LinearMap>>,
        inner: impl Into<Arc<LinearMap>>,
    ) -> Result<Self> {
        let (outer, inner) = (outer.into(), inner.into());
        check_dim(outer.cols(), inner.rows())?;
        Ok(LinearMap::Compose { outer, inner })
    }

    pub fn adjoint(m: impl Into<Arc<LinearMap>>) -> Self {
        LinearMap::Adjoint(m.into())
    }

    pub fn rows(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.rows,
            LinearMap::Identity(n) => *n,
            LinearMap::Zero { rows, .. } => *rows,
            LinearMap::ScaledIdentity { dim, .. } => *dim,
            LinearMap::Stencil(s) => s.len(),
            LinearMap::Scaled(_, m) | LinearMap::IdentityMinus(m) => m.rows(),
            LinearMap::Compose { outer, .. } => outer.rows(),
            LinearMap::Adjoint(m) => m.cols(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.cols,
            LinearMap::Identity(n) => *n,
            LinearMap::Zero { cols, .. } => *cols,
            LinearMap::ScaledIdentity { dim, .. } => *dim,
            LinearMap::Stencil(s) => s.len(),
            LinearMap::Scaled(_, m) | LinearMap::IdentityMinus(m) => m.cols(),
            LinearMap::Compose { inner, .. } => inner.cols(),
            LinearMap::Adjoint(m) => m.rows(),
        }
    }

    /// True when the map is the zero map by construction.
    pub fn is_structurally_zero(&self) -> bool {
        match self {
            LinearMap::Zero { .. } => true,
            LinearMap::ScaledIdentity { factor, .. } => *factor == 0.0,
            LinearMap::Scaled(f, m) => *f == 0.0 || m.is_structurally_zero(),
            LinearMap::IdentityMinus(m) => m.is_structurally_identity(),
            LinearMap::Compose { outer, inner } => {
                outer.is_structurally_zero() || inner.is_structurally_zero()
            }
            LinearMap::Adjoint(m) => m.is_structurally_zero(),
            _ => false,
        }
    }

    fn is_structurally_identity(&self) -> bool {
        match self {
            LinearMap::Identity(_) => true,
            LinearMap::ScaledIdentity { factor, .. } => *factor == 1.0,
            LinearMap::IdentityMinus(m) => m.is_structurally_zero(),
            LinearMap::Adjoint(m) => m.is_structurally_identity(),
            _ => false,
        }
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cols(), v.len())?;
        let mut out = vec![0.0; self.rows()];
        self.apply_into(v, &mut out);
        Ok(out)
    }

    pub fn apply_adjoint(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.rows(), v.len())?;
        let mut out = vec![0.0; self.cols()];
        self.apply_adjoint_into(v, &mut out);
        Ok(out)
    }

    /// `out = M v`. Dimensions must already agree.
    pub(crate) fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols());
        debug_assert_eq!(out.len(), self.rows());
        match self {
            LinearMap::Dense(m) => {
                for (r, o) in out.iter_mut().enumerate() {
                    let row = &m.data[r * m.cols..(r + 1) * m.cols];
                    *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
                }
            }
            LinearMap::Identity(_) => out.copy_from_slice(v),
            LinearMap::Zero { .. } => out.fill(0.0),
            LinearMap::ScaledIdentity { factor, .. } => {
                for (o, x) in out.iter_mut().zip(v) {
                    *o = factor * x;
                }
            }
            LinearMap::Stencil(s) => s.apply_into(v, out),
            LinearMap::Scaled(f, m) => {
                m.apply_into(v, out);
                out.iter_mut().for_each(|o| *o *= f);
            }
            LinearMap::IdentityMinus(m) => {
                m.apply_into(v, out);
                for (o, x) in out.iter_mut().zip(v) {
                    *o = x - *o;
                }
            }
            LinearMap::Compose { outer, inner } => {
                let mut tmp = vec![0.0; inner.rows()];
                inner.apply_into(v, &mut tmp);
                outer.apply_into(&tmp, out);
            }
            LinearMap::Adjoint(m) => m.apply_adjoint_into(v, out),
        }
    }

    /// `out = Mᵀ v`. Dimensions must already agree.
    pub(crate) fn apply_adjoint_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows());
        debug_assert_eq!(out.len(), self.cols());
        match self {
            LinearMap::Dense(m) => {
                out.fill(0.0);
                for (r, x) in v.iter().enumerate() {
                    let row = &m.data[r * m.cols..(r + 1) * m.cols];
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += a * x;
                    }
                }
            }
            LinearMap::Identity(_) => out.copy_from_slice(v),
            LinearMap::Zero { .. } => out.fill(0.0),
            LinearMap::ScaledIdentity { factor, .. } => {
                for (o, x) in out.iter_mut().zip(v) {
                    *o = factor * x;
                }
            }
            LinearMap::Stencil(s) => s.apply_adjoint_into(v, out),
            LinearMap::Scaled(f, m) => {
                m.apply_adjoint_into(v, out);
                out.iter_mut().for_each(|o| *o *= f);
            }
            LinearMap::IdentityMinus(m) => {
                m.apply_adjoint_into(v, out);
                for (o, x) in out.iter_mut().zip(v) {
                    *o = x - *o;
                }
            }
            LinearMap::Compose { outer, inner } => {
                let mut tmp = vec![0.0; outer.cols()];
                outer.apply_adjoint_into(v, &mut tmp);
                inner.apply_adjoint_into(&tmp, out);
            }
            LinearMap::Adjoint(m) => m.apply_into(v, out),
        }
    }

    /// A cheap upper bound on `‖M‖₂` when one is known in closed form.
    ///
    /// For `I − A` with an averaging stencil `A`, every row and every column of
    /// `I − A` has absolute sum at most 2 (the corner pixel of a diagonal
    /// stencil attains it), so `‖I − A‖₂ ≤ √(‖·‖₁ ‖·‖∞) ≤ 2`.
    pub fn norm_upper_bound(&self) -> Option<f64> {
        match self {
            LinearMap::Dense(m) => Some(m.frobenius()),
            LinearMap::Identity(_) => Some(1.0),
            LinearMap::Zero { .. } => Some(0.0),
            LinearMap::ScaledIdentity { factor, .. } => Some(factor.abs()),
            // ‖A‖∞ = 1 and ‖A‖₁ ≤ 2
            LinearMap::Stencil(_) => Some(std::f64::consts::SQRT_2),
            LinearMap::Scaled(f, m) => m.norm_upper_bound().map(|b| f.abs() * b),
            LinearMap::IdentityMinus(m) => match m.as_ref() {
                LinearMap::Stencil(_) => Some(2.0),
                other => other.norm_upper_bound().map(|b| 1.0 + b),
            },
            LinearMap::Compose { outer, inner } => {
                Some(outer.norm_upper_bound()? * inner.norm_upper_bound()?)
            }
            LinearMap::Adjoint(m) => m.norm_upper_bound(),
        }
    }
}

impl From<DenseMatrix> for LinearMap {
    fn from(m: DenseMatrix) -> Self {
        LinearMap::Dense(m)
    }
}

impl From<AveragingStencil> for LinearMap {
    fn from(s: AveragingStencil) -> Self {
        LinearMap::Stencil(s)
    }
}

/// A square linear map with `UᵀU = UUᵀ = I`.
#[derive(Debug, Clone)]
pub struct OrthogonalMap(LinearMap);

/// Tolerance on `max |UᵀU − I|` accepted by [`OrthogonalMap::from_dense`].
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

impl OrthogonalMap {
    pub fn identity(n: usize) -> Self {
        OrthogonalMap(LinearMap::Identity(n))
    }

    /// Counter-clockwise rotation of the plane by `angle` radians.
    pub fn rotation_2d(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        OrthogonalMap(LinearMap::Dense(DenseMatrix {
            rows: 2,
            cols: 2,
            data: vec![c, -s, s, c],
        }))
    }

    pub fn from_dense(m: DenseMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(invalid("orthogonal matrix must be square"));
        }
        let n = m.rows;
        for a in 0..n {
            for b in 0..n {
                let g: f64 = (0..n).map(|r| m.get(r, a) * m.get(r, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                if (g - target).abs() > ORTHOGONALITY_TOL {
                    return Err(invalid(format!(
                        "matrix is not orthogonal: (UᵀU)[{a},{b}] = {g}"
                    )));
                }
            }
        }
        Ok(OrthogonalMap(LinearMap::Dense(m)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.0, LinearMap::Identity(_))
    }

    pub fn as_map(&self) -> &LinearMap {
        &self.0
    }
}

/// Result of a power iteration on `MᵀM`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Default iteration cap for [`estimate_norm`].
pub const POWER_ITERATIONS: usize = 500;
/// Relative change in the eigenvalue estimate that counts as converged.
pub const POWER_TOL: f64 = 1e-10;

/// Estimates `‖M‖₂` by power iteration on `MᵀM` from a seeded random start.
///
/// Stops after `iters` iterations or once the relative change of the
/// eigenvalue estimate drops to `tol`. Returns exactly 0 when the iteration
/// hits the zero vector (e.g. for the zero map).
pub fn estimate_norm(m: &LinearMap, iters: usize, tol: f64, seed: u64) -> Result<NormEstimate> {
    if iters == 0 {
        return Err(invalid("power iteration needs at least one iteration"));
    }
    let zero = NormEstimate {
        value: 0.0,
        iterations: 0,
        converged: true,
    };
    if m.is_structurally_zero() {
        return Ok(zero);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..m.cols()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n0 = norm(&v);
    if n0 == 0.0 {
        return Ok(zero);
    }
    v.iter_mut().for_each(|x| *x /= n0);

    let mut mv = vec![0.0; m.rows()];
    let mut w = vec![0.0; m.cols()];
    let mut lambda = 0.0;
    for k in 1..=iters {
        m.apply_into(&v, &mut mv);
        m.apply_adjoint_into(&mv, &mut w);
        let next = norm_sq(&w).sqrt();
        if next == 0.0 {
            return Ok(NormEstimate {
                iterations: k,
                ..zero
            });
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / next;
        }
        let converged = (next - lambda).abs() <= tol * next;
        lambda = next;
        if converged {
            return Ok(NormEstimate {
                value: lambda.sqrt(),
                iterations: k,
                converged: true,
            });
        }
    }
    Ok(NormEstimate {
        value: lambda.sqrt(),
        iterations: iters,
        converged: false,
    })
}

/// Power-iteration estimate of `‖M‖₂` with the default tolerance.
pub fn operator_norm(m: &LinearMap, iters: usize, seed: u64) -> Result<f64> {
    Ok(estimate_norm(m, iters, POWER_TOL, seed)?.value)
}
