use super::posterior::bayes_from_logs;
use super::Priors;
use crate::io::GrayImage;
use crate::stats::{ChiSquareParams, PixelErrorMap};
use crate::{Error, Result};

/// Pixel errors are floored here so `t = 0` takes the `t → 0` limit of the
/// density ratio, which stays finite even where a density diverges.
const T_FLOOR: f64 = f64::MIN_POSITIVE;

/// Per-pixel `p(ID | t)` over one image.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelPosterior {
    pub height: usize,
    pub width: usize,
    pub id_posterior: Vec<f64>,
    /// Pixels where the posterior was undefined and the prior was emitted.
    pub undefined: usize,
}

impl PixelPosterior {
    pub fn ood_map(&self) -> Vec<f64> {
        self.id_posterior.iter().map(|p| 1.0 - p).collect()
    }

    pub fn mean_ood(&self) -> f64 {
        1.0 - self.id_posterior.iter().sum::<f64>() / self.id_posterior.len() as f64
    }
}

pub fn pixel_posterior_map(
    t_map: &PixelErrorMap,
    id: &ChiSquareParams,
    ood: &ChiSquareParams,
    priors: &Priors,
) -> Result<PixelPosterior> {
    let mut undefined = 0;
    let mut id_posterior = Vec::with_capacity(t_map.values.len());
    for &t in &t_map.values {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("pixel error {t} is negative or NaN")));
        }
        let t = t.max(T_FLOOR);
        match bayes_from_logs(priors, id.ln_pdf(t)?, ood.ln_pdf(t)?, t) {
            Ok(p) => id_posterior.push(p),
            Err(Error::UndefinedPosterior { .. }) => {
                undefined += 1;
                id_posterior.push(priors.p_id());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PixelPosterior {
        height: t_map.height,
        width: t_map.width,
        id_posterior,
        undefined,
    })
}

/// 8-bit OOD heatmap: `floor(255 · (1 − p_id) + 0.5)` per pixel.
pub fn ood_heatmap(map: &PixelPosterior) -> Result<GrayImage> {
    GrayImage::from_unit(map.width, map.height, &map.ood_map())
}
