//! Per-pixel interval constraints built from a noisy image.
//!
//! For every pixel `(i, j)` and direction `s` the two neighbors
//! `(i, j) ± d_s` (constant extension at the border) give a radius
//! `r_s = ½ |y₊ − y₋|` and a center `m_s = ½ (y₊ + y₋)`. The constraint on the
//! pixel is the interval `m_s ± α r_s`. With fixed centers `m_s(Y)` this is a
//! plain feasibility problem; letting the centers follow the unknown,
//! `m_s(X) = A_s X`, gives the implicit problem.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::image::Image;
use crate::linear::{AveragingStencil, Direction, LinearMap, OrthogonalMap};
use crate::projection::CoreSet;
use crate::solver::IcfpInstance;
use crate::variable::VariableSet;

/// Fixed constraints (centers from the data) or adaptive ones (centers from
/// the current iterate).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Cfp,
    Icfp,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cfp => "cfp",
            Mode::Icfp => "icfp",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cfp" => Ok(Mode::Cfp),
            "icfp" => Ok(Mode::Icfp),
            other => Err(invalid(format!("unknown mode '{other}'"))),
        }
    }
}

/// Radii and center stencils for all pixels and the four directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintField {
    alpha: f64,
    stencils: [AveragingStencil; 4],
    radii: [Vec<f64>; 4],
    /// `m_s(Y)`, the centers evaluated on the data.
    data_centers: [Vec<f64>; 4],
}

fn stencil_centers(stencil: &AveragingStencil, x: &[f64]) -> Vec<f64> {
    let w = stencil.width();
    let mut out = vec![0.0; x.len()];
    out.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let (p, m) = stencil.neighbors(i, j);
            *o = 0.5 * (x[p] + x[m]);
        }
    });
    out
}

fn stencil_radii(stencil: &AveragingStencil, x: &[f64]) -> Vec<f64> {
    let w = stencil.width();
    let mut out = vec![0.0; x.len()];
    out.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let (p, m) = stencil.neighbors(i, j);
            *o = 0.5 * (x[p] - x[m]).abs();
        }
    });
    out
}

/// Builds the constraint field of `y` with scale `alpha > 0`.
pub fn build_constraints(y: &Image, alpha: f64) -> Result<ConstraintField> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid(format!("alpha must be > 0, got {alpha}")));
    }
    let (w, h) = (y.width(), y.height());
    let stencils = Direction::ALL.map(|d| AveragingStencil::new(w, h, d).expect("nonempty image"));
    let radii = stencils.map(|s| stencil_radii(&s, y.data()));
    let data_centers = stencils.map(|s| stencil_centers(&s, y.data()));
    Ok(ConstraintField {
        alpha,
        stencils,
        radii,
        data_centers,
    })
}

impl ConstraintField {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn width(&self) -> usize {
        self.stencils[0].width()
    }

    pub fn height(&self) -> usize {
        self.stencils[0].height()
    }

    pub fn stencil(&self, s: usize) -> &AveragingStencil {
        &self.stencils[s]
    }

    /// `r_s` for every pixel.
    pub fn radii(&self, s: usize) -> &[f64] {
        &self.radii[s]
    }

    /// `m_s(x)` for every pixel.
    pub fn centers(&self, s: usize, x: &Image) -> Result<Vec<f64>> {
        self.check_shape(x)?;
        Ok(stencil_centers(&self.stencils[s], x.data()))
    }

    fn check_shape(&self, x: &Image) -> Result<()> {
        if x.width() != self.width() || x.height() != self.height() {
            return Err(invalid(format!(
                "image is {}x{}, constraints are {}x{}",
                x.width(),
                x.height(),
                self.width(),
                self.height()
            )));
        }
        Ok(())
    }

    /// The interval `m_s(center_source) ± α r_s` at pixel `(i, j)`.
    pub fn interval(&self, s: usize, i: usize, j: usize, center_source: &Image) -> (f64, f64) {
        let (p, m) = self.stencils[s].neighbors(i, j);
        let x = center_source.data();
        let c = 0.5 * (x[p] + x[m]);
        let r = self.alpha * self.radii[s][j * self.width() + i];
        (c - r, c + r)
    }

    fn center_arrays(&self, x: &Image, mode: Mode) -> Result<[Vec<f64>; 4]> {
        self.check_shape(x)?;
        Ok(match mode {
            Mode::Cfp => self.data_centers.clone(),
            Mode::Icfp => self.stencils.map(|s| stencil_centers(&s, x.data())),
        })
    }

    /// Assembles the four-set instance over `ℝ^{width·height}`.
    ///
    /// In ICFP mode `A_s` is the averaging stencil of direction `s` and the
    /// core set is the product of `[−r_s, r_s]`. In CFP mode `A_s = 0` and the
    /// core intervals are centered at `m_s(Y) / α`, so `α Ω_s = m_s(Y) ± α r_s`.
    pub fn assemble(&self, mode: Mode, norm_seed: u64) -> Result<IcfpInstance> {
        let n = self.width() * self.height();
        let mut sets = Vec::with_capacity(4);
        for s in 0..4 {
            let r = &self.radii[s];
            let (shift, lo, hi): (LinearMap, Vec<f64>, Vec<f64>) = match mode {
                Mode::Icfp => (
                    LinearMap::stencil(self.stencils[s]),
                    r.iter().map(|v| -v).collect(),
                    r.clone(),
                ),
                Mode::Cfp => {
                    let m = &self.data_centers[s];
                    (
                        LinearMap::zero(n),
                        m.iter().zip(r).map(|(c, v)| c / self.alpha - v).collect(),
                        m.iter().zip(r).map(|(c, v)| c / self.alpha + v).collect(),
                    )
                }
            };
            sets.push(VariableSet::new(
                self.alpha,
                OrthogonalMap::identity(n),
                Arc::new(shift),
                CoreSet::interval_product(lo, hi)?,
            )?);
        }
        IcfpInstance::with_norm_seed(sets, norm_seed)
    }

    /// Fraction of pixels whose four intervals have an empty intersection.
    /// Centers are taken from `x` in ICFP mode and from the data in CFP mode.
    pub fn empty_fraction(&self, x: &Image, mode: Mode) -> Result<f64> {
        let centers = self.center_arrays(x, mode)?;
        let n = x.len();
        let alpha = self.alpha;
        let empty = (0..n)
            .into_par_iter()
            .filter(|&p| {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for s in 0..4 {
                    let r = alpha * self.radii[s][p];
                    lo = lo.max(centers[s][p] - r);
                    hi = hi.min(centers[s][p] + r);
                }
                lo > hi
            })
            .count();
        Ok(empty as f64 / n as f64)
    }
}

/// True iff the closed intervals `[lo, hi]` share a common point.
pub fn intervals_intersect(intervals: &[(f64, f64)]) -> bool {
    let lo = intervals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    let hi = intervals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    lo <= hi
}

pub fn assemble(field: &ConstraintField, mode: Mode) -> Result<IcfpInstance> {
    field.assemble(mode, 0)
}

pub fn empty_fraction(field: &ConstraintField, x: &Image, mode: Mode) -> Result<f64> {
    field.empty_fraction(x, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_image(values: &[f64]) -> Image {
        Image::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn horizontal_interval_from_neighbors() {
        let y = row_image(&[0.2, 0.9, 0.6]);
        let f = build_constraints(&y, 1.0).unwrap();
        assert!((f.radii(0)[1] - 0.2).abs() < 1e-15);
        let (lo, hi) = f.interval(0, 1, 0, &y);
        assert!((lo - 0.2).abs() < 1e-15 && (hi - 0.6).abs() < 1e-15);

        let f = build_constraints(&y, 0.1).unwrap();
        let (lo, hi) = f.interval(0, 1, 0, &y);
        assert!((lo - 0.38).abs() < 1e-15 && (hi - 0.42).abs() < 1e-15);
    }

    #[test]
    fn vertical_uses_both_row_neighbors() {
        // column image: rows j-1 = 0.1, j = 0.5, j+1 = 0.7
        let y = Image::new(1, 3, vec![0.1, 0.5, 0.7]).unwrap();
        let f = build_constraints(&y, 1.0).unwrap();
        let (lo, hi) = f.interval(1, 0, 1, &y);
        assert!((lo - 0.1).abs() < 1e-15 && (hi - 0.7).abs() < 1e-15);
    }

    #[test]
    fn constant_image_gives_singletons() {
        let y = Image::constant(5, 4, 0.3).unwrap();
        let f = build_constraints(&y, 1.0).unwrap();
        for s in 0..4 {
            assert!(f.radii(s).iter().all(|&r| r == 0.0));
            let (lo, hi) = f.interval(s, 2, 2, &y);
            assert_eq!((lo, hi), (0.3, 0.3));
        }
        assert_eq!(f.empty_fraction(&y, Mode::Icfp).unwrap(), 0.0);
        assert_eq!(f.empty_fraction(&y, Mode::Cfp).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_positive_alpha() {
        let y = Image::constant(2, 2, 0.0).unwrap();
        assert!(build_constraints(&y, 0.0).is_err());
        assert!(build_constraints(&y, -1.0).is_err());
    }

    #[test]
    fn interval_intersection() {
        assert!(!intervals_intersect(&[(0.0, 1.0), (2.0, 3.0), (0.0, 3.0), (0.0, 3.0)]));
        assert!(intervals_intersect(&[(0.0, 1.0), (1.0, 3.0)]));
    }

    #[test]
    fn cfp_lipschitz_is_four() {
        let y = Image::from_fn(6, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 / 5.0).unwrap();
        let f = build_constraints(&y, 0.5).unwrap();
        assert_eq!(f.assemble(Mode::Cfp, 0).unwrap().lipschitz(), 4.0);
    }

    #[test]
    fn cfp_sets_match_data_intervals() {
        let y = Image::from_fn(5, 5, |i, j| ((i * 3 + j * 5) % 7) as f64 / 7.0).unwrap();
        let f = build_constraints(&y, 0.7).unwrap();
        let inst = f.assemble(Mode::Cfp, 0).unwrap();
        let x0 = vec![0.0; 25];
        for s in 0..4 {
            // projecting a far-away point lands on the lower interval ends
            let p = inst.sets()[s].project(&x0, &vec![-10.0; 25]).unwrap();
            for j in 0..5 {
                for i in 0..5 {
                    let (lo, _) = f.interval(s, i, j, &y);
                    assert!((p[j * 5 + i] - lo).abs() < 1e-12);
                }
            }
        }
    }
}
