//! The numerical suites behind acceptance criteria 1–5. Each returns a summary
//! so the core tests can assert on it and the acceptance target can print it.

use std::sync::Arc;

use icfp::vector::{dot, norm, sub};
use icfp::{
    solve, Algorithm, CoreSet, IcfpInstance, LinearMap, NoMetrics, OrthogonalMap, SolveConfig,
    StepSize, VariableSet,
};
use rand::Rng;

use super::*;

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: usize,
    pub failures: Vec<String>,
    /// Largest observed error relative to its tolerance.
    pub worst_ratio: f64,
}

impl Outcome {
    fn check(&mut self, what: impl FnOnce() -> String, error: f64, tol: f64) {
        self.checks += 1;
        self.worst_ratio = self.worst_ratio.max(error / tol);
        if !(error <= tol) {
            if self.failures.len() < 10 {
                self.failures.push(format!("{} (error {error:e} > {tol:e})", what()));
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} checks, worst error/tolerance {:.3e}",
            self.checks, self.worst_ratio
        );
        if let Some(f) = self.failures.first() {
            s.push_str(&format!("; first failure: {f}"));
        }
        s
    }
}

/// Grid spacing for the oracle: fine in 1-D and 2-D, coarser in 3-D.
fn spacing(set: &CoreSet, reach: f64) -> f64 {
    let unbounded = matches!(
        set.kind(),
        icfp::CoreSetKind::Halfspace { .. } | icfp::CoreSetKind::Hyperplane { .. }
    );
    match (set.dim(), unbounded) {
        (1, _) => 1e-3,
        (2, false) => 1e-2,
        (2, true) => 2.0 * reach / 300.0,
        (_, false) => 8e-2,
        (_, true) => 2.0 * reach / 40.0,
    }
}

fn reach_for(set: &CoreSet, z: &[f64]) -> f64 {
    // any member bounds the distance from z to the projection
    match set.kind() {
        icfp::CoreSetKind::Halfspace { normal, offset }
        | icfp::CoreSetKind::Hyperplane { normal, offset } => {
            let base: Vec<f64> = normal.iter().map(|n| n * offset / dot(normal, normal)).collect();
            norm(&sub(z, &base)) + 0.1
        }
        _ => 0.0,
    }
}

/// Criterion 1: `pairs` random (set, point) pairs per variant and dimension.
pub fn projection_suite(pairs: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(seed);
    for variant in VARIANTS {
        let dims: &[usize] = if variant == "interval" { &[1] } else { &[2, 3] };
        for &d in dims {
            for t in 0..pairs {
                let set = random_core(&mut r, variant, d);
                let z = vec_in(&mut r, d, -3.5, 3.5);
                let p = set.project(&z).unwrap();
                let label = || format!("{variant} d={d} pair {t}");

                let reach = reach_for(&set, &z);
                let h = spacing(&set, reach);
                let (members, used) = enumerate_members(&set, &z, reach, h);
                let g = nearest(&members, &z);
                out.check(|| format!("{} grid oracle", label()), norm(&sub(&p, g)), 2.0 * used);

                out.check(|| format!("{} membership", label()), set.violation(&p).unwrap(), 1e-12);
                let pp = set.project(&p).unwrap();
                out.check(|| format!("{} idempotence", label()), norm(&sub(&pp, &p)), 1e-12);

                let w = vec_in(&mut r, d, -3.5, 3.5);
                let pw = set.project(&w).unwrap();
                let excess = norm(&sub(&p, &pw)) - norm(&sub(&z, &w));
                out.check(|| format!("{} nonexpansive", label()), excess, 1e-12);

                let zp = sub(&z, &p);
                let hyperplane = variant == "hyperplane";
                let mut worst: f64 = f64::NEG_INFINITY;
                for _ in 0..100 {
                    let y = random_member(&mut r, &set);
                    let ip = dot(&zp, &sub(&y, &p));
                    worst = worst.max(if hyperplane { ip.abs() } else { ip });
                }
                out.check(|| format!("{} characterization", label()), worst, 1e-10);
            }
        }
    }
    out
}

/// Criterion 2: projections onto `αU(Ω) + Ax` in ℝ² against an explicit
/// enumeration of the set.
pub fn variable_projection_suite(draws: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(seed);
    for t in 0..draws {
        let variant = VARIANTS[1 + t % (VARIANTS.len() - 1)];
        let core = random_core(&mut r, variant, 2);
        let alpha = r.random_range(0.4..2.5);
        let angle = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let u = OrthogonalMap::rotation_2d(angle);
        let a = LinearMap::Dense(random_dense(&mut r, 2, 1.0));
        let c = VariableSet::new(alpha, u.clone(), Arc::new(a.clone()), core.clone()).unwrap();
        let x = vec_in(&mut r, 2, -2.0, 2.0);
        let z = vec_in(&mut r, 2, -4.0, 4.0);
        let p = c.project(&x, &z).unwrap();

        // enumerate Ω in its own coordinates; αU(·)+Ax is an isometry up to α
        let ax = a.apply(&x).unwrap();
        let local: Vec<f64> = u
            .as_map()
            .apply_adjoint(&sub(&z, &ax))
            .unwrap()
            .iter()
            .map(|v| v / alpha)
            .collect();
        let reach = reach_for(&core, &local);
        let h = spacing(&core, reach);
        let (ws, used) = enumerate_members(&core, &local, reach, h);
        let mut members = Points { dim: 2, coords: Vec::with_capacity(ws.coords.len()) };
        for w in ws.iter() {
            members.coords.extend(c.embed(&x, w).unwrap());
        }
        let g = nearest(&members, &z);
        out.check(
            || format!("draw {t} ({variant}) grid oracle"),
            norm(&sub(&p, g)),
            2.0 * alpha * used,
        );

        let zp = sub(&z, &p);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..100 {
            let w = random_member(&mut r, &core);
            let v = c.embed(&x, &w).unwrap();
            let ip = dot(&zp, &sub(&v, &p));
            worst = worst.max(if variant == "hyperplane" { ip.abs() } else { ip });
        }
        out.check(|| format!("draw {t} ({variant}) characterization"), worst, 1e-10);
    }
    out
}

/// A random instance with a known solution `x*`: every core is chosen to
/// contain `K_s x*` in its interior (or on its hyperplane).
pub fn instance_with_solution(r: &mut impl Rng, n: usize, sets: usize) -> (IcfpInstance, Vec<f64>) {
    let x_star = vec_in(r, n, -2.0, 2.0);
    let built = (0..sets)
        .map(|_| {
            let alpha = r.random_range(0.3..3.0);
            let u = OrthogonalMap::from_dense(random_orthogonal(r, n)).unwrap();
            let a = Arc::new(LinearMap::Dense(random_dense(r, n, 0.8)));
            let probe = VariableSet::new(alpha, u.clone(), a.clone(), CoreSet::ball(vec![0.0; n], 1.0).unwrap())
                .unwrap();
            let k = probe.make_k().apply(&x_star).unwrap();
            let core = match r.random_range(0..3) {
                0 => CoreSet::boxed(
                    k.iter().map(|v| v - r.random_range(0.1..1.0)).collect(),
                    k.iter().map(|v| v + r.random_range(0.1..1.0)).collect(),
                )
                .unwrap(),
                1 => {
                    let shift = vec_in(r, n, -0.2, 0.2);
                    let center: Vec<f64> = k.iter().zip(&shift).map(|(k, s)| k + s).collect();
                    CoreSet::ball(center, norm(&shift) + r.random_range(0.1..1.0)).unwrap()
                }
                _ => {
                    let normal = vec_in(r, n, -1.0, 1.0);
                    CoreSet::halfspace(normal.clone(), dot(&normal, &k) + r.random_range(0.1..1.0))
                        .unwrap()
                }
            };
            VariableSet::new(alpha, u, a, core).unwrap()
        })
        .collect();
    (IcfpInstance::new(built).unwrap(), x_star)
}

/// Criterion 3: finite differences on `instances` random instances, and an
/// exactly vanishing gradient at constructed solutions.
pub fn gradient_suite(instances: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(seed);
    let h = 1e-6;
    for t in 0..instances {
        let n = r.random_range(2..=10);
        let s = r.random_range(1..=4);
        let inst = random_instance(&mut r, n, s);
        let x = vec_in(&mut r, n, -4.0, 4.0);
        let g = inst.gradient(&x).unwrap();
        let fd: Vec<f64> = (0..n)
            .map(|i| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                (inst.proximity(&xp).unwrap() - inst.proximity(&xm).unwrap()) / (2.0 * h)
            })
            .collect();
        let scale = norm(&g).max(1e-300);
        out.check(
            || format!("instance {t} (n={n}, S={s}) finite differences"),
            norm(&sub(&fd, &g)) / scale,
            1e-4,
        );

        let (feasible, x_star) = instance_with_solution(&mut r, n, s);
        let gs = feasible.gradient(&x_star).unwrap();
        out.check(
            || format!("instance {t} gradient at a solution"),
            gs.iter().map(|v| v.abs()).fold(0.0, f64::max),
            0.0,
        );
    }
    out
}

/// Criterion 4: the Lipschitz bound over `pairs` random pairs and monotone
/// descent of the simultaneous method at `γ = 1/L`.
pub fn lipschitz_descent_suite(instances: usize, pairs: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let mut r = rng(seed);
    let per = pairs.div_ceil(instances);
    for t in 0..instances {
        let n = r.random_range(2..=8);
        let s = r.random_range(1..=4);
        let inst = random_instance(&mut r, n, s);
        let l = inst.lipschitz();
        for _ in 0..per {
            let x = vec_in(&mut r, n, -4.0, 4.0);
            let y = vec_in(&mut r, n, -4.0, 4.0);
            let dg = norm(&sub(&inst.gradient(&x).unwrap(), &inst.gradient(&y).unwrap()));
            let bound = l * norm(&sub(&x, &y));
            out.check(|| format!("instance {t} Lipschitz"), (dg - bound).max(0.0), 1e-8);
        }

        let x0 = vec_in(&mut r, n, -4.0, 4.0);
        let config = SolveConfig {
            max_iters: 200,
            gamma: StepSize::Auto,
            ..Default::default()
        };
        let (_, trace) = solve(&inst, &x0, &config, Algorithm::Simultaneous, &mut NoMetrics).unwrap();
        let rise = trace
            .records
            .windows(2)
            .map(|w| w[1].proximity - w[0].proximity)
            .fold(0.0, f64::max);
        out.check(|| format!("instance {t} descent"), rise, 1e-10);
    }
    out
}

pub const TWO_BOXES: &str = "\
dim = 2
x0 = 3 -1

[set]
core = box
lo = 0 0
hi = 2 2

[set]
core = box
lo = 1 1
hi = 3 3
";

/// Criterion 5: both methods on two overlapping boxes. Returns, per method,
/// the first recorded iteration with proximity ≤ 1e-10 within 500 steps.
pub fn two_box_suite() -> Vec<(Algorithm, Option<usize>, f64)> {
    let spec = icfp::toy::parse_toy_spec(TWO_BOXES).unwrap();
    let inst = IcfpInstance::new(spec.sets).unwrap();
    let x0 = spec.x0.unwrap();
    [Algorithm::Simultaneous, Algorithm::Sequential]
        .into_iter()
        .map(|alg| {
            let config = SolveConfig {
                max_iters: 500,
                ..Default::default()
            };
            let (x, trace) = solve(&inst, &x0, &config, alg, &mut NoMetrics).unwrap();
            let hit = trace.records.iter().find(|r| r.proximity <= 1e-10).map(|r| r.k);
            (alg, hit, inst.proximity(&x).unwrap())
        })
        .collect()
}
