use std::fs;
use std::io::Write;
use std::path::Path;

use icfp::denoise::{
    add_noise, mean_squared_error, phantom, run_denoise, ssim, total_variation, DenoiseConfig,
    DISTANCE_TO_FINAL, EMPTY_FRACTION, SEQUENTIAL_STEERING_SCALE,
};
use icfp::solver::{IterationTrace, NoMetrics};
use icfp::{pgm, solve, Algorithm, IcfpInstance, Image, SolveConfig, StepSize, SteeringSpec};

use crate::args::*;
use crate::manifest::{manifest_path, RunManifest};
use crate::CliError;

/// Columns of the denoising trace.
pub const TRACE_COLUMNS: [&str; 5] = ["iter", "proximity", "step_norm", EMPTY_FRACTION, DISTANCE_TO_FINAL];

const DEFAULT_GAMMA: f64 = 1.0 / 16.0;
const DEFAULT_BETA: usize = 100;
const DEFAULT_VARIANCE: f64 = 0.1;

pub(crate) fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Phantom(a) => cmd_phantom(a, out),
        Command::Noise(a) => cmd_noise(a, out),
        Command::Denoise(a) => cmd_denoise(a, out),
        Command::Metrics(a) => cmd_metrics(a, out),
        Command::SolveToy(a) => cmd_solve_toy(a, out),
        Command::Replay(a) => cmd_replay(a, out),
    }
}

fn say(out: &mut dyn Write, text: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", text.as_ref()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn read_image(path: &Path) -> Result<Image, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    pgm::decode(&bytes).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_manifest(manifest: &RunManifest, primary: &Path) -> Result<(), CliError> {
    write_file(&manifest_path(primary), manifest.to_toml().as_bytes())
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `trace` as CSV: `iter`, `proximity`, `step_norm`, then one column
/// per metric. Missing values are left blank.
pub fn write_trace_csv(trace: &IterationTrace, mut sink: impl Write) -> std::io::Result<()> {
    let mut header = vec!["iter".to_string(), "proximity".into(), "step_norm".into()];
    header.extend(trace.metric_names.iter().cloned());
    writeln!(sink, "{}", header.join(","))?;
    for rec in &trace.records {
        let mut row = vec![rec.k.to_string(), fmt_value(rec.proximity)];
        row.push(rec.step_norm.map(fmt_value).unwrap_or_default());
        row.extend(rec.metrics.iter().map(|m| m.map(fmt_value).unwrap_or_default()));
        writeln!(sink, "{}", row.join(","))?;
    }
    Ok(())
}

fn trace_bytes(trace: &IterationTrace) -> Vec<u8> {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf).expect("writing to memory");
    buf
}

fn cmd_phantom(a: PhantomArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (w, h) = (a.size[0], a.size[1]);
    let img = phantom(w, h)?;
    write_file(&a.out, &pgm::encode(&img))?;
    let mut m = RunManifest::new(
        "phantom",
        &[
            ("size", vec![w.to_string(), h.to_string()]),
            ("out", vec![path_str(&a.out)]),
        ],
    );
    m.outputs.push(path_str(&a.out));
    write_manifest(&m, &a.out)?;
    say(out, format!("wrote {w}x{h} phantom to {}", a.out.display()))
}

fn cmd_noise(a: NoiseArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let x = read_image(&a.input)?;
    let y = add_noise(&x, a.variance, a.seed)?;
    write_file(&a.out, &pgm::encode(&y))?;
    let mut m = RunManifest::new(
        "noise",
        &[
            ("in", vec![path_str(&a.input)]),
            ("variance", vec![a.variance.to_string()]),
            ("seed", vec![a.seed.to_string()]),
            ("out", vec![path_str(&a.out)]),
        ],
    );
    m.inputs.push(path_str(&a.input));
    m.outputs.push(path_str(&a.out));
    write_manifest(&m, &a.out)?;

    // statistics of the noise itself, before the 8-bit file clips it
    let eta: Vec<f64> = y.data().iter().zip(x.data()).map(|(y, x)| y - x).collect();
    let n = eta.len() as f64;
    let mean = eta.iter().sum::<f64>() / n;
    let var = eta.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    say(out, format!("noise_mean {mean}"))?;
    say(out, format!("noise_variance {var}"))?;
    say(out, format!("wrote {}", a.out.display()))
}

fn steering(beta: usize, scale: f64) -> Result<SteeringSpec, CliError> {
    Ok(SteeringSpec::new(beta)?.with_scale(scale)?)
}

fn cmd_denoise(a: DenoiseArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sequential = a.algorithm == Algorithm::Sequential;
    if sequential && a.gamma.is_some() {
        return Err(CliError::usage("--gamma applies to the simultaneous method only"));
    }
    if !sequential && (a.beta.is_some() || a.steering_scale.is_some()) {
        return Err(CliError::usage(
            "--beta and --steering-scale apply to the sequential method only",
        ));
    }
    let trace_path = a.trace.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    if trace_path == a.out {
        return Err(CliError::usage("--trace must differ from --out"));
    }

    let mut resolved: Vec<(&str, Vec<String>)> = Vec::new();
    let mut inputs = Vec::new();
    let (y, mut reference) = match (&a.input, &a.phantom) {
        (Some(path), None) => {
            resolved.push(("in", vec![path_str(path)]));
            inputs.push(path_str(path));
            (read_image(path)?, None)
        }
        (None, Some(size)) => {
            let variance = a.variance.unwrap_or(DEFAULT_VARIANCE);
            let noise_seed = a.noise_seed.unwrap_or(0);
            resolved.push(("phantom", vec![size[0].to_string(), size[1].to_string()]));
            resolved.push(("variance", vec![variance.to_string()]));
            resolved.push(("noise-seed", vec![noise_seed.to_string()]));
            let clean = phantom(size[0], size[1])?;
            (add_noise(&clean, variance, noise_seed)?, Some(clean))
        }
        _ => return Err(CliError::usage("give exactly one of --in and --phantom")),
    };
    if let Some(path) = &a.reference {
        reference = Some(read_image(path)?);
    }
    let init = a.init.as_deref().map(read_image).transpose()?;

    let mut solve_config = SolveConfig {
        max_iters: a.iters,
        ..Default::default()
    };
    resolved.push(("mode", vec![a.mode.to_string()]));
    resolved.push(("algorithm", vec![a.algorithm.to_string()]));
    resolved.push(("alpha", vec![a.alpha.to_string()]));
    if sequential {
        let beta = a.beta.unwrap_or(DEFAULT_BETA);
        let scale = a.steering_scale.unwrap_or(SEQUENTIAL_STEERING_SCALE);
        solve_config.steering = steering(beta, scale)?;
        resolved.push(("beta", vec![beta.to_string()]));
        resolved.push(("steering-scale", vec![scale.to_string()]));
    } else {
        let gamma = a.gamma.unwrap_or(DEFAULT_GAMMA);
        solve_config.gamma = StepSize::Fixed(gamma);
        resolved.push(("gamma", vec![gamma.to_string()]));
    }
    resolved.push(("iters", vec![a.iters.to_string()]));
    resolved.push(("seed", vec![a.seed.to_string()]));
    resolved.push(("snapshot-stride", vec![a.snapshot_stride.to_string()]));
    for (flag, path) in [("init", &a.init), ("ref", &a.reference)] {
        if let Some(p) = path {
            resolved.push((flag, vec![path_str(p)]));
            inputs.push(path_str(p));
        }
    }
    resolved.push(("out", vec![path_str(&a.out)]));
    resolved.push(("trace", vec![path_str(&trace_path)]));

    let config = DenoiseConfig {
        mode: a.mode,
        algorithm: a.algorithm,
        solve: solve_config,
        alpha: a.alpha,
        seed: a.seed,
        snapshot_stride: a.snapshot_stride,
    };
    let result = run_denoise(&y, init.as_ref(), &config, reference.as_ref())?;

    write_file(&a.out, &pgm::encode(&result.image))?;
    write_file(&trace_path, &trace_bytes(&result.trace))?;
    let mut m = RunManifest::new("denoise", &resolved);
    m.inputs = inputs;
    m.outputs = vec![path_str(&a.out), path_str(&trace_path)];
    write_manifest(&m, &a.out)?;

    let metrics = &result.metrics;
    say(out, format!("lipschitz {}", metrics.lipschitz))?;
    say(out, format!("initial_empty_fraction {}", metrics.initial_empty_fraction))?;
    say(out, format!("empty_fraction {}", metrics.empty_fraction))?;
    if let Some(s) = metrics.ssim {
        say(out, format!("ssim {s}"))?;
    }
    say(out, format!("total_variation {}", metrics.total_variation))?;
    say(out, format!("final_proximity {}", result.trace.last().map_or(f64::NAN, |r| r.proximity)))?;
    say(out, format!("wrote {} and {}", a.out.display(), trace_path.display()))
}

fn cmd_metrics(a: MetricsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let r = read_image(&a.reference)?;
    let t = read_image(&a.test)?;
    if r.width() != t.width() || r.height() != t.height() {
        return Err(CliError::usage(format!(
            "images differ in size: {}x{} vs {}x{}",
            r.width(),
            r.height(),
            t.width(),
            t.height()
        )));
    }
    say(out, format!("ssim {}", ssim(&r, &t)?))?;
    say(out, format!("total_variation {}", total_variation(&t)))?;
    say(out, format!("mse {}", mean_squared_error(&r, &t)?))
}

fn cmd_solve_toy(a: SolveToyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.spec).map_err(|e| CliError::io(&a.spec, e))?;
    let spec = icfp::toy::parse_toy_spec(&text).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", a.spec.display(), err.message);
        err
    })?;
    let sequential = a.algorithm == Algorithm::Sequential;
    if sequential && a.gamma.is_some() {
        return Err(CliError::usage("--gamma applies to the simultaneous method only"));
    }
    if !sequential && (a.beta.is_some() || a.steering_scale.is_some()) {
        return Err(CliError::usage(
            "--beta and --steering-scale apply to the sequential method only",
        ));
    }
    let instance = IcfpInstance::new(spec.sets)?;
    let x0 = spec.x0.unwrap_or_else(|| vec![0.0; spec.dim]);

    let mut config = SolveConfig {
        max_iters: a.iters,
        stop_tol: a.stop_tol,
        ..Default::default()
    };
    let mut resolved: Vec<(&str, Vec<String>)> = vec![
        ("spec", vec![path_str(&a.spec)]),
        ("algorithm", vec![a.algorithm.to_string()]),
        ("iters", vec![a.iters.to_string()]),
    ];
    if sequential {
        let beta = a.beta.unwrap_or(DEFAULT_BETA);
        let scale = a.steering_scale.unwrap_or(1.0);
        config.steering = steering(beta, scale)?;
        resolved.push(("beta", vec![beta.to_string()]));
        resolved.push(("steering-scale", vec![scale.to_string()]));
    } else {
        let gamma = match a.gamma {
            Some(g) => g,
            None => config.resolve_gamma(&instance)?,
        };
        config.gamma = StepSize::Fixed(gamma);
        resolved.push(("gamma", vec![gamma.to_string()]));
    }
    resolved.push(("stop-tol", vec![a.stop_tol.to_string()]));
    resolved.push(("out", vec![path_str(&a.out)]));

    let (x, trace) = solve(&instance, &x0, &config, a.algorithm, &mut NoMetrics)?;
    write_file(&a.out, &trace_bytes(&trace))?;
    let mut m = RunManifest::new("solve-toy", &resolved);
    m.inputs.push(path_str(&a.spec));
    m.outputs.push(path_str(&a.out));
    write_manifest(&m, &a.out)?;

    say(out, format!("lipschitz {}", instance.lipschitz()))?;
    say(out, format!("iterations {}", trace.iterations))?;
    say(out, format!("final_proximity {}", trace.last().map_or(f64::NAN, |r| r.proximity)))?;
    let coords: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    say(out, format!("x {}", coords.join(" ")))
}

fn cmd_replay(a: ReplayArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.manifest).map_err(|e| CliError::io(&a.manifest, e))?;
    let manifest = RunManifest::from_toml(&text).map_err(|e| CliError {
        code: crate::EXIT_FORMAT,
        message: format!("{}: {e}", a.manifest.display()),
    })?;
    if manifest.command == "replay" {
        return Err(CliError::usage("a manifest cannot replay another replay"));
    }
    if manifest.version != icfp::VERSION {
        log::warn!(
            "manifest written by version {}, running {}",
            manifest.version,
            icfp::VERSION
        );
    }
    let argv = std::iter::once("icfp".to_string()).chain(manifest.args.iter().cloned());
    crate::run(argv, out)
}
