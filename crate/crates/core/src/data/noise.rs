use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{ImageDataset, ImageShape};
use crate::parallel::{map_indexed, Execution};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Synthetic out-of-distribution image generator. Image `k` under `seed` is
/// drawn from its own RNG stream, so any image can be regenerated alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// `N(mean, std²)` per pixel, clipped to `[0, 1]`.
    Gaussian { mean: f64, std: f64 },
    /// `U[0, 1]` per pixel.
    Uniform,
}

impl NoiseKind {
    const DEFAULT_GAUSSIAN: NoiseKind = NoiseKind::Gaussian {
        mean: 0.5,
        std: 0.25,
    };

    pub fn default_gaussian() -> Self {
        Self::DEFAULT_GAUSSIAN
    }

    pub fn label(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian { .. } => "gaussian",
            NoiseKind::Uniform => "uniform",
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let NoiseKind::Gaussian { mean, std } = *self {
            if !(std > 0.0 && std.is_finite()) || !mean.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "gaussian noise needs finite mean and std > 0, got ({mean}, {std})"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn fill_image(&self, seed: u64, index: u64, out: &mut [f32]) {
        let mut rng = stream_rng(seed, index);
        match *self {
            NoiseKind::Gaussian { mean, std } => {
                let normal = Normal::new(mean, std).expect("validated");
                for p in out.iter_mut() {
                    *p = normal.sample(&mut rng).clamp(0.0, 1.0) as f32;
                }
            }
            NoiseKind::Uniform => {
                for p in out.iter_mut() {
                    *p = rng.random::<f32>();
                }
            }
        }
    }

    pub fn generate(
        &self,
        n: usize,
        shape: ImageShape,
        seed: u64,
        exec: Execution,
    ) -> Result<ImageDataset> {
        self.validate()?;
        if n == 0 {
            return Err(Error::InvalidArgument("noise dataset needs n > 0".into()));
        }
        let images = map_indexed(exec, n, |k| {
            let mut img = vec![0.0f32; shape.len()];
            self.fill_image(seed, k as u64, &mut img);
            img
        });
        ImageDataset::new(self.label(), shape, images.concat())
    }
}

pub fn gen_gaussian_noise(
    n: usize,
    shape: ImageShape,
    mean: f64,
    std: f64,
    seed: u64,
) -> Result<ImageDataset> {
    NoiseKind::Gaussian { mean, std }.generate(n, shape, seed, Execution::default())
}

pub fn gen_uniform_noise(n: usize, shape: ImageShape, seed: u64) -> Result<ImageDataset> {
    NoiseKind::Uniform.generate(n, shape, seed, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MNIST: ImageShape = ImageShape::new(1, 28, 28);

    #[test]
    fn vanishing_std_collapses_to_clamped_mean() {
        let ds = gen_gaussian_noise(3, MNIST, 0.3, 1e-12, 1).unwrap();
        assert!(ds.pixels().iter().all(|&p| (p - 0.3).abs() < 1e-6));
        let ds = gen_gaussian_noise(2, MNIST, 1.7, 1e-12, 1).unwrap();
        assert!(ds.pixels().iter().all(|&p| p == 1.0));
    }

    #[test]
    fn clip_mass_matches_normal_tails() {
        let ds = gen_gaussian_noise(1000, MNIST, 0.5, 1.0, 3).unwrap();
        let clipped = ds.pixels().iter().filter(|&&p| p == 0.0 || p == 1.0).count();
        let frac = clipped as f64 / ds.pixels().len() as f64;
        // 2·Φ(−0.5)
        assert!((frac - 0.617_075_077_451_973_8).abs() < 0.02, "{frac}");
    }

    #[test]
    fn uniform_is_in_range_with_half_mean() {
        let ds = gen_uniform_noise(200, MNIST, 9).unwrap();
        assert!(ds.pixels().len() >= 100_000);
        assert!(ds.pixels().iter().all(|p| (0.0..=1.0).contains(p)));
        let mean = ds.pixels().iter().map(|&p| p as f64).sum::<f64>() / ds.pixels().len() as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn seeded_and_mode_independent() {
        let kind = NoiseKind::default_gaussian();
        let a = kind.generate(16, MNIST, 5, Execution::Sequential).unwrap();
        let b = kind.generate(16, MNIST, 5, Execution::Parallel).unwrap();
        let c = kind.generate(16, MNIST, 6, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.pixels(), c.pixels());
        assert_eq!(gen_uniform_noise(4, MNIST, 2).unwrap(), gen_uniform_noise(4, MNIST, 2).unwrap());
    }

    #[test]
    fn invalid_arguments() {
        assert!(gen_gaussian_noise(0, MNIST, 0.5, 0.2, 0).is_err());
        assert!(gen_gaussian_noise(3, MNIST, 0.5, 0.0, 0).is_err());
    }
}
