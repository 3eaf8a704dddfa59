use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::image::Image;

/// Adds i.i.d. zero-mean Gaussian noise of the given variance, drawn from a
/// ChaCha8 stream seeded with `seed`. Values are not clipped.
pub fn add_noise(x: &Image, variance: f64, seed: u64) -> Result<Image> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(invalid(format!("variance must be >= 0, got {variance}")));
    }
    if variance == 0.0 {
        return Ok(x.clone());
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    x.with_data(x.data().iter().map(|v| v + normal.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_is_identity() {
        let x = Image::from_fn(4, 3, |i, j| (i + j) as f64 / 10.0).unwrap();
        assert_eq!(add_noise(&x, 0.0, 1).unwrap(), x);
        assert!(add_noise(&x, -0.1, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let x = Image::constant(8, 8, 0.5).unwrap();
        assert_eq!(add_noise(&x, 0.1, 9).unwrap(), add_noise(&x, 0.1, 9).unwrap());
        assert_ne!(add_noise(&x, 0.1, 9).unwrap(), add_noise(&x, 0.1, 10).unwrap());
    }

    #[test]
    fn sample_moments() {
        let (w, h) = (256, 256);
        let x = Image::constant(w, h, 0.0).unwrap();
        for seed in [7, 8, 9] {
            let y = add_noise(&x, 0.1, seed).unwrap();
            let n = (w * h) as f64;
            let mean = y.data().iter().sum::<f64>() / n;
            let var = y.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() <= 3.0 * 0.1f64.sqrt() / n.sqrt(), "{mean}");
            assert!((0.095..=0.105).contains(&var), "{var}");
        }
    }
}
