//! Shepp–Logan head phantom.

use crate::error::{invalid, Result};
use crate::image::Image;

/// One ellipse: intensity, semi-axes, center and rotation in degrees, on the
/// square `[−1, 1]²` with `y` pointing up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub intensity: f64,
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub y0: f64,
    pub phi_deg: f64,
}

impl Ellipse {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (s, c) = self.phi_deg.to_radians().sin_cos();
        let (dx, dy) = (x - self.x0, y - self.y0);
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        (u * u) / (self.a * self.a) + (v * v) / (self.b * self.b) <= 1.0
    }
}

const fn e(intensity: f64, a: f64, b: f64, x0: f64, y0: f64, phi_deg: f64) -> Ellipse {
    Ellipse {
        intensity,
        a,
        b,
        x0,
        y0,
        phi_deg,
    }
}

/// The ten ellipses of the Shepp–Logan phantom with the contrast-enhanced
/// intensities (Toft), whose gray levels lie in `[0, 1]`.
pub const SHEPP_LOGAN: [Ellipse; 10] = [
    e(1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    e(-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    e(-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    e(-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    e(0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    e(0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    e(0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    e(0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    e(0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    e(0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// Smallest accepted side length.
pub const MIN_PHANTOM_SIZE: usize = 16;

/// Pixel-center coordinates of `(i, j)` on `[−1, 1]²`, row 0 at the top.
pub fn pixel_center(i: usize, j: usize, width: usize, height: usize) -> (f64, f64) {
    let x = (2.0 * i as f64 + 1.0) / width as f64 - 1.0;
    let y = 1.0 - (2.0 * j as f64 + 1.0) / height as f64;
    (x, y)
}

/// Rasterizes the phantom by sampling each pixel center, summing the
/// intensities of all ellipses that contain it and clipping to `[0, 1]`.
pub fn phantom(width: usize, height: usize) -> Result<Image> {
    if width < MIN_PHANTOM_SIZE || height < MIN_PHANTOM_SIZE {
        return Err(invalid(format!(
            "phantom needs at least {MIN_PHANTOM_SIZE}x{MIN_PHANTOM_SIZE} pixels, got {width}x{height}"
        )));
    }
    Image::from_fn(width, height, |i, j| {
        let (x, y) = pixel_center(i, j, width, height);
        SHEPP_LOGAN
            .iter()
            .filter(|el| el.contains(x, y))
            .map(|el| el.intensity)
            .sum::<f64>()
            .clamp(0.0, 1.0)
    })
}
