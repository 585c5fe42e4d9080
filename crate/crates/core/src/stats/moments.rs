use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sample mean and population-convention variance `E[l²] − E[l]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mu: f64,
    pub sigma2: f64,
    pub n: usize,
}

impl MomentEstimate {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Two-pass mean/variance. Constant inputs give exactly zero variance even
/// when their mean is not representable.
pub fn moments(values: &[f64]) -> Result<MomentEstimate> {
    if values.len() < 2 {
        return Err(Error::TooFewValues {
            needed: 2,
            got: values.len(),
        });
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite value {v} in moment input")));
    }
    if values.iter().all(|&v| v == values[0]) {
        return Ok(MomentEstimate {
            mu: values[0],
            sigma2: 0.0,
            n: values.len(),
        });
    }
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    let sigma2 = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n;
    Ok(MomentEstimate {
        mu,
        sigma2,
        n: values.len(),
    })
}
