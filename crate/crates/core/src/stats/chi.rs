use serde::{Deserialize, Serialize};

use super::special::lgamma;
use crate::{Error, Result};

/// Scaled χ² law for per-pixel squared errors. The standard χ²(α) density is
/// evaluated at `t / scale` and divided by `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareParams {
    pub alpha: f64,
    pub scale: f64,
}

impl ChiSquareParams {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(alpha) || !ok(scale) {
            return Err(Error::Domain(format!(
                "chi-square parameters must be positive and finite, got alpha={alpha}, scale={scale}"
            )));
        }
        Ok(Self { alpha, scale })
    }

    pub fn standardize(&self, t: f64) -> f64 {
        t / self.scale
    }

    pub fn ln_pdf(&self, t: f64) -> Result<f64> {
        let h = 0.5 * self.alpha;
        if !(t >= 0.0) || (t == 0.0 && h < 1.0) {
            return Err(Error::Domain(format!(
                "chi-square({}) density undefined at t={t}",
                self.alpha
            )));
        }
        let s = self.standardize(t);
        let kernel = if s == 0.0 {
            if h == 1.0 { 0.0 } else { f64::NEG_INFINITY }
        } else {
            (h - 1.0) * s.ln() - 0.5 * s
        };
        Ok(kernel - h * std::f64::consts::LN_2 - lgamma(h) - self.scale.ln())
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        Ok(self.ln_pdf(t)?.exp())
    }
}

/// Fits `scale = mean(t)` with `α = 1`, so standardized errors have mean
/// exactly `α`.
pub fn fit_chi_square(pixel_errors: &[f64]) -> Result<ChiSquareParams> {
    if pixel_errors.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let mean = pixel_errors.iter().sum::<f64>() / pixel_errors.len() as f64;
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::Degenerate(format!("pixel errors have mean {mean}")));
    }
    ChiSquareParams::new(1.0, mean)
}

pub fn chi_square_pdf(p: &ChiSquareParams, t: f64) -> Result<f64> {
    p.pdf(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn closed_forms() {
        let p = ChiSquareParams::new(2.0, 1.0).unwrap();
        assert!((p.pdf(1.0).unwrap() - 0.5 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((p.pdf(0.0).unwrap() - 0.5).abs() < 1e-15);
        let one = ChiSquareParams::new(1.0, 1.0).unwrap();
        assert!(one.pdf(0.0).is_err());
        for &t in &[0.1, 0.7, 3.0] {
            let want = oracle::chi_square_pdf_ref(1.0, t);
            assert!((one.pdf(t).unwrap() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn scale_is_change_of_variables() {
        let a = ChiSquareParams::new(3.0, 1.0).unwrap();
        let b = ChiSquareParams::new(3.0, 2.0).unwrap();
        for &t in &[0.2, 1.0, 4.5] {
            assert!((b.pdf(2.0 * t).unwrap() - 0.5 * a.pdf(t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        for &(k, s) in &[(2.0, 1.0), (4.0, 0.3), (9.0, 2.0)] {
            let p = ChiSquareParams::new(k, s).unwrap();
            let mass = oracle::integrate(|t| p.pdf(t).unwrap(), 0.0, 400.0 * s, 1e-12);
            assert!((mass - 1.0).abs() < 1e-8, "k={k} s={s}: {mass}");
        }
        // α = 1 has an integrable singularity at 0; substitute t = u²
        let p = ChiSquareParams::new(1.0, 0.2).unwrap();
        let mass = oracle::integrate(|u: f64| if u == 0.0 { 0.0 } else { 2.0 * u * p.pdf(u * u).unwrap() }, 0.0, 20.0, 1e-12);
        assert!((mass - 1.0).abs() < 1e-8, "{mass}");
    }

    #[test]
    fn fit_constant_and_idempotent() {
        let p = fit_chi_square(&[0.3; 10]).unwrap();
        assert_eq!(p.alpha, 1.0);
        assert!((p.scale - 0.3).abs() < 1e-15);
        let v = [0.1, 0.4, 0.9, 2.0];
        let p = fit_chi_square(&v).unwrap();
        let standardized: Vec<f64> = v.iter().map(|&t| p.standardize(t)).collect();
        let again = fit_chi_square(&standardized).unwrap();
        assert!((again.scale - 1.0).abs() < 1e-15);
        assert!(fit_chi_square(&[0.0, 0.0]).is_err());
        assert!(fit_chi_square(&[]).is_err());
    }

    #[test]
    fn squared_normals_fit_unit_scale() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let t: Vec<f64> = (0..1_000_000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * z
            })
            .collect();
        let p = fit_chi_square(&t).unwrap();
        assert!((p.scale - 1.0).abs() < 0.01, "{}", p.scale);
    }
}
