//! Image quality and smoothness measures.

use rayon::prelude::*;

use crate::error::Result;
use crate::image::Image;

/// Side length of the square SSIM window.
pub const SSIM_WINDOW: usize = 8;
/// Dynamic range assumed by SSIM.
pub const SSIM_RANGE: f64 = 1.0;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Mean structural similarity over all `8 × 8` windows (stride 1, uniform
/// weights, population moments). Windows shrink to the image size for
/// smaller images.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    a.same_shape(b)?;
    let (w, h) = (a.width(), a.height());
    let (ww, wh) = (SSIM_WINDOW.min(w), SSIM_WINDOW.min(h));
    let c1 = (K1 * SSIM_RANGE).powi(2);
    let c2 = (K2 * SSIM_RANGE).powi(2);
    let n = (ww * wh) as f64;
    let (xa, xb) = (a.data(), b.data());

    let rows: Vec<f64> = (0..=h - wh)
        .into_par_iter()
        .map(|j0| {
            let mut row_sum = 0.0;
            for i0 in 0..=w - ww {
                let (mut sa, mut sb) = (0.0, 0.0);
                for j in j0..j0 + wh {
                    for i in i0..i0 + ww {
                        sa += xa[j * w + i];
                        sb += xb[j * w + i];
                    }
                }
                let (ma, mb) = (sa / n, sb / n);
                let (mut vaa, mut vbb, mut vab) = (0.0, 0.0, 0.0);
                for j in j0..j0 + wh {
                    for i in i0..i0 + ww {
                        let da = xa[j * w + i] - ma;
                        let db = xb[j * w + i] - mb;
                        vaa += da * da;
                        vbb += db * db;
                        vab += da * db;
                    }
                }
                let (vaa, vbb, vab) = (vaa / n, vbb / n, vab / n);
                row_sum += ((2.0 * ma * mb + c1) * (2.0 * vab + c2))
                    / ((ma * ma + mb * mb + c1) * (vaa + vbb + c2));
            }
            row_sum
        })
        .collect();
    let windows = ((h - wh + 1) * (w - ww + 1)) as f64;
    Ok(rows.iter().sum::<f64>() / windows)
}

/// Isotropic total variation `Σ √(Δx² + Δy²)` with forward differences
/// (zero across the last column and row).
pub fn total_variation(x: &Image) -> f64 {
    tv_with(x, |dx, dy| (dx * dx + dy * dy).sqrt())
}

/// Anisotropic total variation `Σ |Δx| + |Δy|`.
pub fn total_variation_anisotropic(x: &Image) -> f64 {
    tv_with(x, |dx, dy| dx.abs() + dy.abs())
}

fn tv_with(x: &Image, f: impl Fn(f64, f64) -> f64) -> f64 {
    let (w, h) = (x.width(), x.height());
    let mut total = 0.0;
    for j in 0..h {
        for i in 0..w {
            let v = x.get(i, j);
            let dx = if i + 1 < w { x.get(i + 1, j) - v } else { 0.0 };
            let dy = if j + 1 < h { x.get(i, j + 1) - v } else { 0.0 };
            total += f(dx, dy);
        }
    }
    total
}

pub fn mean_squared_error(a: &Image, b: &Image) -> Result<f64> {
    a.same_shape(b)?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(p, q)| (p - q) * (p - q))
        .sum();
    Ok(sum / a.len() as f64)
}
