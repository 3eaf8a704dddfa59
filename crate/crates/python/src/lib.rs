//! Python bindings: images, core sets, variable sets, the two solvers and the
//! denoising pipeline.

use std::sync::Arc;

use icfp::denoise::{self, DenoiseConfig, Mode};
use icfp::{
    pgm, Algorithm, CoreSet, DenseMatrix, IcfpInstance, Image, LinearMap, NoMetrics,
    OrthogonalMap, SolveConfig, StepSize, SteeringSpec, VariableSet,
};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn err(e: icfp::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = icfp::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// Grayscale image, row-major, nominal range [0, 1].
#[pyclass(name = "Image", module = "icfp_py", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyImage(Image);

#[pymethods]
impl PyImage {
    #[new]
    fn new(width: usize, height: usize, data: Vec<f64>) -> PyResult<Self> {
        Image::new(width, height, data).map(Self).map_err(err)
    }

    #[staticmethod]
    fn constant(width: usize, height: usize, value: f64) -> PyResult<Self> {
        Image::constant(width, height, value).map(Self).map_err(err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn data(&self) -> Vec<f64> {
        self.0.data().to_vec()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.0.width() || j >= self.0.height() {
            return Err(PyValueError::new_err(format!("pixel ({i}, {j}) out of range")));
        }
        Ok(self.0.get(i, j))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Image({}x{})", self.0.width(), self.0.height())
    }
}

/// Closed convex set with an exact projection.
#[pyclass(name = "CoreSet", module = "icfp_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCoreSet(CoreSet);

#[pymethods]
impl PyCoreSet {
    #[staticmethod]
    fn interval(lo: f64, hi: f64) -> PyResult<Self> {
        CoreSet::interval(lo, hi).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(name = "box")]
    fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Self> {
        CoreSet::boxed(lo, hi).map(Self).map_err(err)
    }

    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        CoreSet::ball(center, radius).map(Self).map_err(err)
    }

    #[staticmethod]
    fn halfspace(normal: Vec<f64>, offset: f64) -> PyResult<Self> {
        CoreSet::halfspace(normal, offset).map(Self).map_err(err)
    }

    #[staticmethod]
    fn hyperplane(normal: Vec<f64>, offset: f64) -> PyResult<Self> {
        CoreSet::hyperplane(normal, offset).map(Self).map_err(err)
    }

    #[staticmethod]
    fn interval_product(lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Self> {
        CoreSet::interval_product(lo, hi).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn project(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.project(&z).map_err(err)
    }

    #[pyo3(signature = (y, tol = 1e-12))]
    fn contains(&self, y: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.0.contains(&y, tol).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("CoreSet({:?})", self.0.kind())
    }
}

fn dense(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(err)
}

/// `C(x) = alpha * U(core) + A x`. `rotation` and `shift` are row lists;
/// they default to the identity and the zero matrix.
#[pyclass(name = "VariableSet", module = "icfp_py", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyVariableSet(VariableSet);

#[pymethods]
impl PyVariableSet {
    #[new]
    #[pyo3(signature = (core, alpha = 1.0, rotation = None, shift = None))]
    fn new(
        core: &PyCoreSet,
        alpha: f64,
        rotation: Option<Vec<Vec<f64>>>,
        shift: Option<Vec<Vec<f64>>>,
    ) -> PyResult<Self> {
        let n = core.0.dim();
        let u = match rotation {
            Some(rows) => OrthogonalMap::from_dense(dense(rows)?).map_err(err)?,
            None => OrthogonalMap::identity(n),
        };
        let a = match shift {
            Some(rows) => LinearMap::Dense(dense(rows)?),
            None => LinearMap::zero(n),
        };
        VariableSet::new(alpha, u, Arc::new(a), core.0.clone())
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Projection of `z` onto `C(x)`.
    fn project(&self, x: Vec<f64>, z: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.project(&x, &z).map_err(err)
    }
}

/// A family of variable sets with its Lipschitz constant.
#[pyclass(name = "Instance", module = "icfp_py", frozen)]
pub struct PyInstance(IcfpInstance);

/// `(k, proximity, step_norm)` rows of a trace; the last row has no step.
type TraceRows = Vec<(usize, f64, Option<f64>)>;

#[pymethods]
impl PyInstance {
    #[new]
    fn new(sets: Vec<PyVariableSet>) -> PyResult<Self> {
        IcfpInstance::new(sets.into_iter().map(|s| s.0).collect())
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn lipschitz(&self) -> f64 {
        self.0.lipschitz()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn proximity(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.proximity(&x).map_err(err)
    }

    fn gradient(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.gradient(&x).map_err(err)
    }

    fn simultaneous_step(&self, x: Vec<f64>, gamma: f64) -> PyResult<Vec<f64>> {
        self.0.simultaneous_step(&x, gamma).map_err(err)
    }

    #[pyo3(signature = (x, k, beta = 100, steering_scale = 1.0))]
    fn sequential_step(&self, x: Vec<f64>, k: usize, beta: usize, steering_scale: f64) -> PyResult<Vec<f64>> {
        let steer = SteeringSpec::new(beta).and_then(|s| s.with_scale(steering_scale)).map_err(err)?;
        self.0.sequential_step(&x, k, &steer).map_err(err)
    }

    /// Runs a solver from `x0`; `gamma=None` means `1/L`.
    #[pyo3(signature = (
        x0, algorithm = "simultaneous", max_iters = 1000, gamma = None, beta = 100,
        steering_scale = 1.0, stop_tol = 0.0
    ))]
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        py: Python<'_>,
        x0: Vec<f64>,
        algorithm: &str,
        max_iters: usize,
        gamma: Option<f64>,
        beta: usize,
        steering_scale: f64,
        stop_tol: f64,
    ) -> PyResult<(Vec<f64>, TraceRows)> {
        let algorithm: Algorithm = parse(algorithm)?;
        let config = SolveConfig {
            max_iters,
            gamma: gamma.map_or(StepSize::Auto, StepSize::Fixed),
            steering: SteeringSpec::new(beta).and_then(|s| s.with_scale(steering_scale)).map_err(err)?,
            stop_tol,
            trace_every: 1,
        };
        let (x, trace) = py
            .detach(|| icfp::solve(&self.0, &x0, &config, algorithm, &mut NoMetrics))
            .map_err(err)?;
        let rows = trace.records.iter().map(|r| (r.k, r.proximity, r.step_norm)).collect();
        Ok((x, rows))
    }
}

/// Outcome of a denoising run.
#[pyclass(name = "DenoiseResult", module = "icfp_py", frozen, get_all)]
pub struct PyDenoiseResult {
    image: PyImage,
    initial_empty_fraction: f64,
    empty_fraction: f64,
    ssim: Option<f64>,
    total_variation: f64,
    lipschitz: f64,
    /// `(k, ‖X^k − X^final‖)` at the stored snapshots.
    distances: Vec<(usize, f64)>,
    /// `empty_fraction` per iteration.
    empty_fractions: Vec<f64>,
    proximity: Vec<f64>,
}

#[pymethods]
impl PyDenoiseResult {
    fn __repr__(&self) -> String {
        format!(
            "DenoiseResult(empty_fraction={}, total_variation={}, ssim={})",
            self.empty_fraction,
            self.total_variation,
            self.ssim.map_or("None".to_string(), |v| v.to_string())
        )
    }
}

#[pyfunction]
fn phantom(width: usize, height: usize) -> PyResult<PyImage> {
    denoise::phantom(width, height).map(PyImage).map_err(err)
}

#[pyfunction]
fn add_noise(image: &PyImage, variance: f64, seed: u64) -> PyResult<PyImage> {
    denoise::add_noise(&image.0, variance, seed).map(PyImage).map_err(err)
}

#[pyfunction]
fn ssim(a: &PyImage, b: &PyImage) -> PyResult<f64> {
    denoise::ssim(&a.0, &b.0).map_err(err)
}

#[pyfunction]
fn total_variation(image: &PyImage) -> f64 {
    denoise::total_variation(&image.0)
}

#[pyfunction]
fn mean_squared_error(a: &PyImage, b: &PyImage) -> PyResult<f64> {
    denoise::mean_squared_error(&a.0, &b.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (beta, t, scale = 1.0))]
fn steering_value(beta: usize, t: usize, scale: f64) -> PyResult<f64> {
    Ok(SteeringSpec::new(beta).and_then(|s| s.with_scale(scale)).map_err(err)?.value(t))
}

#[pyfunction]
fn read_pgm(path: &str) -> PyResult<PyImage> {
    let bytes = std::fs::read(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
    pgm::decode(&bytes).map(PyImage).map_err(err)
}

#[pyfunction]
fn write_pgm(path: &str, image: &PyImage) -> PyResult<()> {
    pgm::write(path, &image.0).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))
}

/// Parses a toy instance description; returns the instance and its `x0`
/// (zeros when absent).
#[pyfunction]
fn parse_toy(text: &str) -> PyResult<(PyInstance, Vec<f64>)> {
    let spec = icfp::toy::parse_toy_spec(text).map_err(err)?;
    let x0 = spec.x0.unwrap_or_else(|| vec![0.0; spec.dim]);
    Ok((PyInstance(IcfpInstance::new(spec.sets).map_err(err)?), x0))
}

#[pyfunction]
#[pyo3(signature = (
    y, mode = "icfp", algorithm = "simultaneous", alpha = 1.0, gamma = 0.0625, beta = 100,
    steering_scale = denoise::SEQUENTIAL_STEERING_SCALE, iters = 1000, seed = 0,
    snapshot_stride = 10, reference = None, x0 = None
))]
#[allow(clippy::too_many_arguments)]
fn run_denoise(
    py: Python<'_>,
    y: &PyImage,
    mode: &str,
    algorithm: &str,
    alpha: f64,
    gamma: f64,
    beta: usize,
    steering_scale: f64,
    iters: usize,
    seed: u64,
    snapshot_stride: usize,
    reference: Option<PyImage>,
    x0: Option<PyImage>,
) -> PyResult<PyDenoiseResult> {
    let config = DenoiseConfig {
        mode: parse::<Mode>(mode)?,
        algorithm: parse(algorithm)?,
        solve: SolveConfig {
            max_iters: iters,
            gamma: StepSize::Fixed(gamma),
            steering: SteeringSpec::new(beta).and_then(|s| s.with_scale(steering_scale)).map_err(err)?,
            ..Default::default()
        },
        alpha,
        seed,
        snapshot_stride,
    };
    let out = py
        .detach(|| {
            denoise::run_denoise(
                &y.0,
                x0.as_ref().map(|i| &i.0),
                &config,
                reference.as_ref().map(|i| &i.0),
            )
        })
        .map_err(err)?;
    let empty_fractions = out
        .trace
        .metric_series(denoise::EMPTY_FRACTION)
        .into_iter()
        .filter_map(|(_, v)| v)
        .collect();
    Ok(PyDenoiseResult {
        image: PyImage(out.image),
        initial_empty_fraction: out.metrics.initial_empty_fraction,
        empty_fraction: out.metrics.empty_fraction,
        ssim: out.metrics.ssim,
        total_variation: out.metrics.total_variation,
        lipschitz: out.metrics.lipschitz,
        distances: out.metrics.distances,
        empty_fractions,
        proximity: out.trace.records.iter().map(|r| r.proximity).collect(),
    })
}

#[pymodule]
fn icfp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", icfp::VERSION)?;
    m.add_class::<PyImage>()?;
    m.add_class::<PyCoreSet>()?;
    m.add_class::<PyVariableSet>()?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyDenoiseResult>()?;
    m.add_function(wrap_pyfunction!(phantom, m)?)?;
    m.add_function(wrap_pyfunction!(add_noise, m)?)?;
    m.add_function(wrap_pyfunction!(ssim, m)?)?;
    m.add_function(wrap_pyfunction!(total_variation, m)?)?;
    m.add_function(wrap_pyfunction!(mean_squared_error, m)?)?;
    m.add_function(wrap_pyfunction!(steering_value, m)?)?;
    m.add_function(wrap_pyfunction!(read_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(write_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(parse_toy, m)?)?;
    m.add_function(wrap_pyfunction!(run_denoise, m)?)?;
    Ok(())
}
