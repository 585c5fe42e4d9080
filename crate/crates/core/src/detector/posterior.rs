use serde::{Deserialize, Serialize};

use crate::stats::GammaParams;
use crate::{Error, Result};

/// Prior probabilities of the two populations; `p_ood = 1 − p_id`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Priors {
    p_id: f64,
}

impl Default for Priors {
    fn default() -> Self {
        Self { p_id: 0.5 }
    }
}

impl Priors {
    pub fn new(p_id: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_id) {
            return Err(Error::InvalidArgument(format!("prior p_id={p_id} outside [0, 1]")));
        }
        Ok(Self { p_id })
    }

    pub fn p_id(&self) -> f64 {
        self.p_id
    }

    pub fn p_ood(&self) -> f64 {
        1.0 - self.p_id
    }
}

fn weighted(prior: f64, ln_density: f64) -> f64 {
    if prior == 0.0 {
        f64::NEG_INFINITY
    } else {
        prior.ln() + ln_density
    }
}

/// `w_id / (w_id + w_ood)` from log-weights, stable for any magnitudes.
pub(crate) fn bayes_from_logs(priors: &Priors, ln_id: f64, ln_ood: f64, at: f64) -> Result<f64> {
    let a = weighted(priors.p_id(), ln_id);
    let b = weighted(priors.p_ood(), ln_ood);
    if a == b {
        if a.is_finite() {
            return Ok(0.5);
        }
        return Err(Error::UndefinedPosterior { at });
    }
    let d = b - a;
    if d.is_nan() {
        return Err(Error::UndefinedPosterior { at });
    }
    Ok(1.0 / (1.0 + d.exp()))
}

/// `p(ID | l)` from the two fitted Gamma laws.
pub fn posterior_id(l: f64, id: &GammaParams, ood: &GammaParams, priors: &Priors) -> Result<f64> {
    bayes_from_logs(priors, id.ln_pdf(l)?, ood.ln_pdf(l)?, l)
}
