//! Random instances and brute-force oracles shared by the integration tests
//! and the acceptance suite.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use icfp::vector::{dot, norm, norm_sq};
use icfp::{CoreSet, CoreSetKind, DenseMatrix, IcfpInstance, LinearMap, OrthogonalMap, VariableSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vec_in(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn unit(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v = vec_in(rng, n, -1.0, 1.0);
        let r = norm(&v);
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Names of the variants in a fixed order.
pub const VARIANTS: [&str; 6] = ["interval", "box", "ball", "halfspace", "hyperplane", "product"];

pub fn random_core(rng: &mut impl Rng, variant: &str, dim: usize) -> CoreSet {
    let pair = |rng: &mut dyn rand::RngCore| {
        let a: f64 = rng.random_range(-2.0..2.0);
        let w: f64 = rng.random_range(0.2..2.0);
        (a, a + w)
    };
    match variant {
        "interval" => {
            let (lo, hi) = pair(rng);
            CoreSet::interval(lo, hi).unwrap()
        }
        "box" | "product" => {
            let (lo, hi): (Vec<f64>, Vec<f64>) = (0..dim).map(|_| pair(rng)).unzip();
            if variant == "box" {
                CoreSet::boxed(lo, hi).unwrap()
            } else {
                CoreSet::interval_product(lo, hi).unwrap()
            }
        }
        "ball" => CoreSet::ball(vec_in(rng, dim, -1.0, 1.0), rng.random_range(0.3..2.0)).unwrap(),
        "halfspace" => {
            CoreSet::halfspace(vec_in(rng, dim, -2.0, 2.0), rng.random_range(-1.0..1.0)).unwrap()
        }
        "hyperplane" => {
            CoreSet::hyperplane(vec_in(rng, dim, -2.0, 2.0), rng.random_range(-1.0..1.0)).unwrap()
        }
        other => panic!("unknown variant {other}"),
    }
}

/// A random member of `set`, built from its defining inequalities.
pub fn random_member(rng: &mut impl Rng, set: &CoreSet) -> Vec<f64> {
    match set.kind() {
        CoreSetKind::Interval { lo, hi } => vec![rng.random_range(*lo..=*hi)],
        CoreSetKind::Box { lo, hi } | CoreSetKind::IntervalProduct { lo, hi } => lo
            .iter()
            .zip(hi)
            .map(|(l, h)| rng.random_range(*l..=*h))
            .collect(),
        CoreSetKind::Ball { center, radius } => {
            let u = unit(rng, center.len());
            let t = radius * rng.random::<f64>();
            center.iter().zip(&u).map(|(c, u)| c + t * u).collect()
        }
        CoreSetKind::Halfspace { normal, offset } => {
            let mut y = vec_in(rng, normal.len(), -4.0, 4.0);
            let excess = dot(normal, &y) - offset;
            if excess > 0.0 {
                let s = (excess + rng.random_range(0.0..1.0)) / norm_sq(normal);
                y.iter_mut().zip(normal).for_each(|(y, n)| *y -= s * n);
            }
            y
        }
        CoreSetKind::Hyperplane { normal, offset } => {
            let mut y = vec_in(rng, normal.len(), -4.0, 4.0);
            let s = (dot(normal, &y) - offset) / norm_sq(normal);
            y.iter_mut().zip(normal).for_each(|(y, n)| *y -= s * n);
            y
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

/// Orthonormal basis `[n̂, t_1, …]` with `n̂` along `normal` (Gram–Schmidt
/// against the coordinate axes).
fn frame(normal: &[f64]) -> Vec<Vec<f64>> {
    let d = normal.len();
    let n = norm(normal);
    let mut basis = vec![normal.iter().map(|v| v / n).collect::<Vec<_>>()];
    for axis in 0..d {
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        for b in &basis {
            let c = dot(&e, b);
            e.iter_mut().zip(b).for_each(|(e, b)| *e -= c * b);
        }
        let r = norm(&e);
        if r > 1e-6 && basis.len() < d {
            basis.push(e.iter().map(|v| v / r).collect());
        }
    }
    basis
}

/// Points stored contiguously, `dim` coordinates each.
pub struct Points {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl Points {
    fn new(dim: usize) -> Self {
        Self { dim, coords: Vec::new() }
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }
}

/// Members of `set` on a grid of spacing at most `h`, restricted to the ball of
/// radius `reach` around `z` where the set is unbounded. The grid is laid out
/// in coordinates adapted to the set so that boundary points are included.
/// Returns the members and the spacing actually used.
pub fn enumerate_members(set: &CoreSet, z: &[f64], reach: f64, h: f64) -> (Points, f64) {
    let steps = |len: f64| ((len / h).ceil() as usize).max(1);
    // all combinations of the axis values, each mapped through `emit`
    fn cartesian(axes: &[Vec<f64>], prefix: &mut Vec<f64>, emit: &mut dyn FnMut(&[f64])) {
        match axes.split_first() {
            None => emit(prefix),
            Some((axis, rest)) => {
                for v in axis {
                    prefix.push(*v);
                    cartesian(rest, prefix, emit);
                    prefix.pop();
                }
            }
        }
    }
    let mut pts = Points::new(z.len());
    match set.kind() {
        CoreSetKind::Interval { lo, hi } => {
            let n = steps(hi - lo);
            pts.coords = linspace(*lo, *hi, n);
            (pts, (hi - lo) / n as f64)
        }
        CoreSetKind::Box { lo, hi } | CoreSetKind::IntervalProduct { lo, hi } => {
            let mut spacing: f64 = 0.0;
            let axes: Vec<Vec<f64>> = lo
                .iter()
                .zip(hi)
                .map(|(l, u)| {
                    let n = steps(u - l);
                    spacing = spacing.max((u - l) / n as f64);
                    linspace(*l, *u, n)
                })
                .collect();
            cartesian(&axes, &mut Vec::new(), &mut |p| pts.coords.extend_from_slice(p));
            (pts, spacing)
        }
        CoreSetKind::Ball { center, radius } => {
            // concentric shells; angular spacing on the outer shell is ≤ h
            let d = center.len();
            let shells = steps(*radius);
            pts.coords.extend_from_slice(center);
            let mut push = |r: f64, u: &[f64]| {
                pts.coords.extend(center.iter().zip(u).map(|(c, u)| c + r * u));
            };
            for k in 1..=shells {
                let r = radius * k as f64 / shells as f64;
                let na = ((2.0 * PI * r / h).ceil() as usize).max(4);
                if d == 2 {
                    for m in 0..na {
                        let t = 2.0 * PI * m as f64 / na as f64;
                        push(r, &[t.cos(), t.sin()]);
                    }
                } else {
                    let nt = (na / 2).max(2);
                    for a in 0..=nt {
                        let theta = PI * a as f64 / nt as f64;
                        let ring = ((na as f64 * theta.sin()).ceil() as usize).max(1);
                        for b in 0..ring {
                            let phi = 2.0 * PI * b as f64 / ring as f64;
                            push(r, &[theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
                        }
                    }
                }
            }
            (pts, h.max(radius / shells as f64))
        }
        CoreSetKind::Halfspace { normal, offset } | CoreSetKind::Hyperplane { normal, offset } => {
            let basis = frame(normal);
            let nn = norm(normal);
            // point of the boundary plane closest to the origin, then tangential
            // coordinates of z
            let base: Vec<f64> = basis[0].iter().map(|v| v * offset / nn).collect();
            let rel: Vec<f64> = z.iter().zip(&base).map(|(z, b)| z - b).collect();
            let n = steps(2.0 * reach);
            let mut axes: Vec<Vec<f64>> = basis[1..]
                .iter()
                .map(|t| {
                    let c = dot(&rel, t);
                    linspace(c - reach, c + reach, n)
                })
                .collect();
            let depth = if matches!(set.kind(), CoreSetKind::Halfspace { .. }) {
                linspace(-2.0 * reach, 0.0, steps(2.0 * reach))
            } else {
                vec![0.0]
            };
            axes.insert(0, depth);
            cartesian(&axes, &mut Vec::new(), &mut |coords| {
                let start = pts.coords.len();
                pts.coords.extend_from_slice(&base);
                for (c, b) in coords.iter().zip(&basis) {
                    pts.coords[start..].iter_mut().zip(b).for_each(|(p, b)| *p += c * b);
                }
            });
            (pts, 2.0 * reach / n as f64)
        }
    }
}

pub fn nearest<'a>(points: &'a Points, z: &[f64]) -> &'a [f64] {
    points
        .iter()
        .min_by(|a, b| {
            let da: f64 = a.iter().zip(z).map(|(a, z)| (a - z) * (a - z)).sum();
            let db: f64 = b.iter().zip(z).map(|(b, z)| (b - z) * (b - z)).sum();
            da.total_cmp(&db)
        })
        .expect("nonempty enumeration")
}

/// Product of three random Householder reflections.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DenseMatrix {
    let mut q = vec![vec![0.0; n]; n];
    (0..n).for_each(|i| q[i][i] = 1.0);
    for _ in 0..3 {
        let v = unit(rng, n);
        // q ← (I − 2vvᵀ) q
        for c in 0..n {
            let s: f64 = (0..n).map(|r| v[r] * q[r][c]).sum();
            (0..n).for_each(|r| q[r][c] -= 2.0 * v[r] * s);
        }
    }
    DenseMatrix::from_rows(&q).unwrap()
}

pub fn random_dense(rng: &mut impl Rng, n: usize, scale: f64) -> DenseMatrix {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| vec_in(rng, n, -scale, scale)).collect();
    DenseMatrix::from_rows(&rows).unwrap()
}

/// A random variable set in ℝⁿ with a random core (never `interval` unless
/// `n = 1`).
pub fn random_variable_set(rng: &mut impl Rng, n: usize) -> VariableSet {
    let variant = if n == 1 {
        "interval"
    } else {
        VARIANTS[rng.random_range(1..VARIANTS.len())]
    };
    let core = random_core(rng, variant, n);
    let alpha = rng.random_range(0.3..3.0);
    let u = OrthogonalMap::from_dense(random_orthogonal(rng, n)).unwrap();
    let a = match rng.random_range(0..4) {
        0 => LinearMap::zero(n),
        1 => LinearMap::identity(n),
        _ => LinearMap::Dense(random_dense(rng, n, 0.8)),
    };
    VariableSet::new(alpha, u, Arc::new(a), core).unwrap()
}

pub fn random_instance(rng: &mut impl Rng, n: usize, sets: usize) -> IcfpInstance {
    IcfpInstance::new((0..sets).map(|_| random_variable_set(rng, n)).collect()).unwrap()
}

/// `½ Σ ‖x − P_{C_s(x)}(x)‖²`, the proximity evaluated through the variable
/// set projections directly.
pub fn proximity_direct(instance: &IcfpInstance, x: &[f64]) -> f64 {
    instance
        .sets()
        .iter()
        .map(|s| {
            let p = s.project(x, x).unwrap();
            0.5 * x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        })
        .sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Pass/fail line used by the acceptance suite.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!("criterion {id:>2} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
pub mod suites;
