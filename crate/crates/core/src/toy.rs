//! Plain-text description of small instances.
//!
//! ```text
//! # two overlapping boxes in the plane
//! dim = 2
//! x0 = 3 -1
//!
//! [set]
//! alpha = 1
//! core = box
//! lo = 0 0
//! hi = 2 2
//!
//! [set]
//! alpha = 2
//! rotation = 0.785398   # radians, 2-D only
//! a = 0.5 0             # one `a` line per row of A
//! a = 0 0.5
//! core = ball
//! center = 1 1
//! radius = 1
//! ```
//!
//! Keys inside a `[set]` block: `alpha` (default 1), either `rotation` or one
//! `u` line per row of an orthogonal matrix (default identity), either
//! `a = zero`, `a = identity` or one `a` line per row (default zero), and
//! `core` = `interval | box | ball | halfspace | hyperplane` with its
//! parameters (`lo`/`hi`, `center`/`radius`, `normal`/`offset`). Errors report
//! the offending line.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linear::{DenseMatrix, LinearMap, OrthogonalMap};
use crate::projection::CoreSet;
use crate::variable::VariableSet;

#[derive(Debug, Clone)]
pub struct ToySpec {
    pub dim: usize,
    pub x0: Option<Vec<f64>>,
    pub sets: Vec<VariableSet>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn numbers(line: usize, value: &str) -> Result<Vec<f64>> {
    value
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(line, format!("expected a number, got '{t}'")))
        })
        .collect()
}

fn scalar(line: usize, value: &str) -> Result<f64> {
    match numbers(line, value)?.as_slice() {
        [v] => Ok(*v),
        _ => Err(err(line, format!("expected a single number, got '{value}'"))),
    }
}

#[derive(Default)]
struct Block {
    header_line: usize,
    alpha: Option<(usize, f64)>,
    rotation: Option<(usize, f64)>,
    u_rows: Vec<(usize, Vec<f64>)>,
    a_rows: Vec<(usize, Vec<f64>)>,
    a_named: Option<(usize, String)>,
    core: Option<(usize, String)>,
    params: Vec<(usize, String, Vec<f64>)>,
}

impl Block {
    fn param(&self, name: &str) -> Option<&(usize, String, Vec<f64>)> {
        self.params.iter().find(|p| p.1 == name)
    }

    fn require(&self, name: &str, dim: usize) -> Result<&Vec<f64>> {
        let (line, _, v) = self
            .param(name)
            .ok_or_else(|| err(self.header_line, format!("missing '{name}'")))?;
        if v.len() != dim {
            return Err(err(
                *line,
                format!("'{name}' needs {dim} values, got {}", v.len()),
            ));
        }
        Ok(v)
    }

    fn build(self, dim: usize) -> Result<VariableSet> {
        let at = |line: usize| move |e: Error| err(line, e.to_string());
        let alpha = self.alpha.map_or(1.0, |a| a.1);
        let alpha_line = self.alpha.map_or(self.header_line, |a| a.0);
        if !(alpha > 0.0) {
            return Err(err(alpha_line, format!("alpha must be > 0, got {alpha}")));
        }

        let rotation = match (self.rotation, self.u_rows.is_empty()) {
            (Some((line, _)), false) => {
                return Err(err(line, "give either 'rotation' or 'u' rows, not both"))
            }
            (Some((line, angle)), true) => {
                if dim != 2 {
                    return Err(err(line, "'rotation' is only available in 2-D"));
                }
                OrthogonalMap::rotation_2d(angle)
            }
            (None, true) => OrthogonalMap::identity(dim),
            (None, false) => {
                let line = self.u_rows[0].0;
                let rows: Vec<Vec<f64>> = self.u_rows.iter().map(|r| r.1.clone()).collect();
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(err(line, format!("'u' must be {dim}x{dim}")));
                }
                OrthogonalMap::from_dense(DenseMatrix::from_rows(&rows).map_err(at(line))?)
                    .map_err(at(line))?
            }
        };

        let shift = match (self.a_named.clone(), self.a_rows.is_empty()) {
            (Some((line, _)), false) => {
                return Err(err(line, "'a = zero|identity' cannot be mixed with rows"))
            }
            (Some((_, name)), true) if name == "identity" => LinearMap::identity(dim),
            (Some(_), true) | (None, true) => LinearMap::zero(dim),
            (None, false) => {
                let line = self.a_rows[0].0;
                let rows: Vec<Vec<f64>> = self.a_rows.iter().map(|r| r.1.clone()).collect();
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(err(line, format!("'a' must be {dim}x{dim}")));
                }
                LinearMap::Dense(DenseMatrix::from_rows(&rows).map_err(at(line))?)
            }
        };

        let (core_line, kind) = self
            .core
            .clone()
            .ok_or_else(|| err(self.header_line, "missing 'core'"))?;
        let scalar_param = |name: &str| -> Result<f64> {
            let (line, _, v) = self
                .param(name)
                .ok_or_else(|| err(self.header_line, format!("missing '{name}'")))?;
            match v.as_slice() {
                [x] => Ok(*x),
                _ => Err(err(*line, format!("'{name}' takes one value"))),
            }
        };
        let core = match kind.as_str() {
            "interval" => {
                if dim != 1 {
                    return Err(err(core_line, "'interval' requires dim = 1"));
                }
                CoreSet::interval(scalar_param("lo")?, scalar_param("hi")?)
            }
            "box" => CoreSet::boxed(self.require("lo", dim)?.clone(), self.require("hi", dim)?.clone()),
            "ball" => CoreSet::ball(self.require("center", dim)?.clone(), scalar_param("radius")?),
            "halfspace" => {
                CoreSet::halfspace(self.require("normal", dim)?.clone(), scalar_param("offset")?)
            }
            "hyperplane" => {
                CoreSet::hyperplane(self.require("normal", dim)?.clone(), scalar_param("offset")?)
            }
            other => return Err(err(core_line, format!("unknown core set '{other}'"))),
        }
        .map_err(at(core_line))?;

        VariableSet::new(alpha, rotation, Arc::new(shift), core).map_err(at(self.header_line))
    }
}

pub fn parse_toy_spec(text: &str) -> Result<ToySpec> {
    let mut dim: Option<usize> = None;
    let mut x0: Option<(usize, Vec<f64>)> = None;
    let mut blocks: Vec<Block> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content == "[set]" {
            if dim.is_none() {
                return Err(err(line, "'dim' must be declared before the first [set]"));
            }
            blocks.push(Block {
                header_line: line,
                ..Default::default()
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{content}'")))?;

        let Some(block) = blocks.last_mut() else {
            match key {
                "dim" => {
                    let d = value
                        .parse::<usize>()
                        .ok()
                        .filter(|d| *d > 0)
                        .ok_or_else(|| err(line, format!("'dim' must be a positive integer, got '{value}'")))?;
                    dim = Some(d);
                }
                "x0" => x0 = Some((line, numbers(line, value)?)),
                other => return Err(err(line, format!("unknown top-level key '{other}'"))),
            }
            continue;
        };
        match key {
            "alpha" => block.alpha = Some((line, scalar(line, value)?)),
            "rotation" => block.rotation = Some((line, scalar(line, value)?)),
            "u" => block.u_rows.push((line, numbers(line, value)?)),
            "a" if value == "zero" || value == "identity" => {
                block.a_named = Some((line, value.to_string()))
            }
            "a" => block.a_rows.push((line, numbers(line, value)?)),
            "core" => block.core = Some((line, value.to_string())),
            "lo" | "hi" | "center" | "radius" | "normal" | "offset" => {
                block
                    .params
                    .push((line, key.to_string(), numbers(line, value)?))
            }
            other => return Err(err(line, format!("unknown key '{other}'"))),
        }
    }

    let dim = dim.ok_or_else(|| err(1, "missing 'dim'"))?;
    if blocks.is_empty() {
        return Err(err(text.lines().count().max(1), "no [set] blocks"));
    }
    if let Some((line, v)) = &x0 {
        if v.len() != dim {
            return Err(err(*line, format!("'x0' needs {dim} values, got {}", v.len())));
        }
    }
    let sets = blocks
        .into_iter()
        .map(|b| b.build(dim))
        .collect::<Result<Vec<_>>>()?;
    Ok(ToySpec {
        dim,
        x0: x0.map(|v| v.1),
        sets,
    })
}
