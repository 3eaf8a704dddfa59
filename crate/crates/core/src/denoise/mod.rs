//! Adaptive image denoising with per-pixel interval constraints.

mod constraints;
mod metrics;
mod noise;
mod phantom;

pub use constraints::{
    assemble, build_constraints, empty_fraction, intervals_intersect, ConstraintField, Mode,
};
pub use metrics::{
    mean_squared_error, ssim, total_variation, total_variation_anisotropic, SSIM_RANGE,
    SSIM_WINDOW,
};
pub use noise::add_noise;
pub use phantom::{phantom, pixel_center, Ellipse, MIN_PHANTOM_SIZE, SHEPP_LOGAN};

use crate::error::{invalid, Result};
use crate::image::Image;
use crate::steering::SteeringSpec;
use crate::solver::{solve, Algorithm, IterationTrace, Observer, SolveConfig, StepSize};
use crate::vector::distance;

pub const EMPTY_FRACTION: &str = "empty_fraction";
/// Steering scale for the sequential method on images: `2 / 4`, where
/// `‖I − A_s‖² ≤ 4` bounds each single-direction term, so the first block
/// of steps is still nonexpansive.
pub const SEQUENTIAL_STEERING_SCALE: f64 = 0.5;
pub const DISTANCE_TO_FINAL: &str = "d_k";

/// Parameters of one denoising run.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseConfig {
    pub mode: Mode,
    pub algorithm: Algorithm,
    pub solve: SolveConfig,
    pub alpha: f64,
    /// Seed of the power iterations used for the Lipschitz constant.
    pub seed: u64,
    /// Keep every n-th iterate for the distances `‖X^k − X^final‖`.
    pub snapshot_stride: usize,
}

impl Default for DenoiseConfig {
    /// Simultaneous method on the adaptive constraints, `α = 1`,
    /// `γ = 1/16`, 1000 iterations. The sequential method, when selected,
    /// uses β = 100 scaled by [`SEQUENTIAL_STEERING_SCALE`].
    fn default() -> Self {
        Self {
            mode: Mode::Icfp,
            algorithm: Algorithm::Simultaneous,
            solve: SolveConfig {
                max_iters: 1000,
                gamma: StepSize::Fixed(1.0 / 16.0),
                steering: SteeringSpec::default()
                    .with_scale(SEQUENTIAL_STEERING_SCALE)
                    .expect("positive scale"),
                ..Default::default()
            },
            alpha: 1.0,
            seed: 0,
            snapshot_stride: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseMetrics {
    /// Empty-intersection fraction at the start and at the final iterate.
    pub initial_empty_fraction: f64,
    pub empty_fraction: f64,
    /// Against the reference image, when one was supplied.
    pub ssim: Option<f64>,
    pub total_variation: f64,
    /// `(k, ‖X^k − X^final‖)` for every stored snapshot.
    pub distances: Vec<(usize, f64)>,
    pub lipschitz: f64,
}

impl DenoiseMetrics {
    pub fn distance_at(&self, k: usize) -> Option<f64> {
        self.distances.iter().find(|(i, _)| *i == k).map(|(_, d)| *d)
    }
}

#[derive(Debug, Clone)]
pub struct DenoiseOutput {
    pub image: Image,
    pub metrics: DenoiseMetrics,
    pub trace: IterationTrace,
}

struct DenoiseObserver<'a> {
    field: &'a ConstraintField,
    mode: Mode,
    template: &'a Image,
    stride: usize,
    snapshots: Vec<(usize, Vec<f64>)>,
}

impl Observer for DenoiseObserver<'_> {
    fn metric_names(&self) -> Vec<String> {
        vec![EMPTY_FRACTION.to_string()]
    }

    fn observe(&mut self, k: usize, x: &[f64]) -> Vec<f64> {
        if k.is_multiple_of(self.stride) {
            self.snapshots.push((k, x.to_vec()));
        }
        let img = self
            .template
            .with_data(x.to_vec())
            .expect("iterate has the image shape");
        vec![self
            .field
            .empty_fraction(&img, self.mode)
            .expect("shapes agree")]
    }
}

/// Denoises `y` starting from `x0` (or from `y` itself).
pub fn run_denoise(
    y: &Image,
    x0: Option<&Image>,
    config: &DenoiseConfig,
    reference: Option<&Image>,
) -> Result<DenoiseOutput> {
    if config.snapshot_stride == 0 {
        return Err(invalid("snapshot stride must be >= 1"));
    }
    let start = x0.unwrap_or(y);
    start.same_shape(y)?;
    if let Some(r) = reference {
        r.same_shape(y)?;
    }
    let field = build_constraints(y, config.alpha)?;
    let instance = field.assemble(config.mode, config.seed)?;
    let mut observer = DenoiseObserver {
        field: &field,
        mode: config.mode,
        template: y,
        stride: config.snapshot_stride,
        snapshots: Vec::new(),
    };
    let (x, mut trace) = solve(
        &instance,
        start.data(),
        &config.solve,
        config.algorithm,
        &mut observer,
    )?;
    let last_k = trace.iterations;
    let mut distances: Vec<(usize, f64)> = observer
        .snapshots
        .iter()
        .map(|(k, snap)| (*k, distance(snap, &x)))
        .collect();
    // the final iterate always closes the distance curve
    if distances.last().map(|d| d.0) != Some(last_k) {
        distances.push((last_k, 0.0));
    }

    trace.metric_names.push(DISTANCE_TO_FINAL.to_string());
    for rec in &mut trace.records {
        let d = distances.iter().find(|(k, _)| *k == rec.k).map(|(_, d)| *d);
        rec.metrics.push(d);
    }

    let image = y.with_data(x)?;
    let ef = trace.metric_series(EMPTY_FRACTION);
    let metrics = DenoiseMetrics {
        initial_empty_fraction: field.empty_fraction(start, config.mode)?,
        empty_fraction: ef.last().and_then(|v| v.1).unwrap_or(f64::NAN),
        ssim: reference.map(|r| ssim(r, &image)).transpose()?,
        total_variation: total_variation(&image),
        distances,
        lipschitz: instance.lipschitz(),
    };
    Ok(DenoiseOutput {
        image,
        metrics,
        trace,
    })
}
