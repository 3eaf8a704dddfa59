//! Grayscale images stored as row-major `f64` grids.

use crate::error::{check_dim, invalid, Result};

/// A `width × height` grid of intensities (nominally in `[0, 1]`).
///
/// Pixel `(i, j)` has column `i` and row `j` and lives at `j * width + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        check_dim(width * height, data.len())?;
        if let Some(p) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite intensity at index {p}")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                data.push(f(i, j));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.width + i]
    }

    /// Intensity at `(i, j)` with constant extension outside the domain:
    /// indices are clamped to the nearest border pixel.
    pub fn extend(&self, i: isize, j: isize) -> f64 {
        let ci = i.clamp(0, self.width as isize - 1) as usize;
        let cj = j.clamp(0, self.height as isize - 1) as usize;
        self.get(ci, cj)
    }

    pub fn same_shape(&self, other: &Image) -> Result<()> {
        if self.width == other.width && self.height == other.height {
            Ok(())
        } else {
            Err(invalid(format!(
                "image dimensions differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    /// Same shape, new pixel values.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Self::new(self.width, self.height, data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_data(self.data.iter().map(|&v| f(v)).collect())
    }
}

pub fn extend(image: &Image, i: isize, j: isize) -> f64 {
    image.extend(i, j)
}
