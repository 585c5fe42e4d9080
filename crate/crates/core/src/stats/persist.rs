use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{fit_gamma_mom, ChiSquareParams, GammaParams, MomentEstimate};
use crate::{Error, Result};

/// A fitted Gamma law together with the moments it was fitted from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRecord {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub sigma2: f64,
    pub n: usize,
}

impl GammaRecord {
    pub fn fit(m: &MomentEstimate) -> Result<Self> {
        let p = fit_gamma_mom(m)?;
        Ok(Self {
            alpha: p.alpha,
            beta: p.beta,
            mu: m.mu,
            sigma2: m.sigma2,
            n: m.n,
        })
    }

    pub fn params(&self) -> Result<GammaParams> {
        GammaParams::new(self.alpha, self.beta)
    }

    pub fn moments(&self) -> MomentEstimate {
        MomentEstimate {
            mu: self.mu,
            sigma2: self.sigma2,
            n: self.n,
        }
    }
}

/// Fitted-statistics document written next to a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FittedStats {
    pub model_id: String,
    pub id_gamma: GammaRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ood_gamma: Option<GammaRecord>,
    pub id_chi: ChiSquareParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ood_chi: Option<ChiSquareParams>,
    pub priors: PriorsRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorsRecord {
    pub p_id: f64,
    pub p_ood: f64,
}

impl FittedStats {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.id_gamma.params()?;
        if let Some(g) = &s.ood_gamma {
            g.params()?;
        }
        ChiSquareParams::new(s.id_chi.alpha, s.id_chi.scale)?;
        if let Some(c) = &s.ood_chi {
            ChiSquareParams::new(c.alpha, c.scale)?;
        }
        Ok(s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::io::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Equal-width histogram over `[min, max]` of the values; the last bin is
/// closed on the right.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    if bins == 0 || values.is_empty() {
        return Err(Error::InvalidArgument("histogram needs values and at least one bin".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            left: lo + k as f64 * width,
            right: lo + (k + 1) as f64 * width,
            count,
        })
        .collect())
}

pub fn write_histogram_csv(bins: &[HistogramBin], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("bin_left,bin_right,count\n");
    for b in bins {
        out.push_str(&format!("{:e},{:e},{}\n", b.left, b.right, b.count));
    }
    crate::io::write_atomic(path, out.as_bytes())
}
