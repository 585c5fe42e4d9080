use serde::{Deserialize, Serialize};

use crate::detector::Priors;
use crate::stats::GammaParams;
use crate::Result;

/// Population fractions of the four detection outcomes; sums to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionProportions {
    pub tp: f64,
    pub fp: f64,
    pub fn_: f64,
    pub tn: f64,
}

impl ConfusionProportions {
    pub fn total(&self) -> f64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Confusion fractions at error threshold `t_v` implied by the fitted laws.
pub fn analytic_proportions(
    t_v: f64,
    id: &GammaParams,
    ood: &GammaParams,
    priors: &Priors,
) -> Result<ConfusionProportions> {
    let (pi, po) = (priors.p_id(), priors.p_ood());
    let t = t_v.max(0.0);
    let (f_id, s_id) = (id.cdf(t)?, id.sf(t)?);
    let (f_ood, s_ood) = (ood.cdf(t)?, ood.sf(t)?);
    Ok(ConfusionProportions {
        tp: po * s_ood,
        fp: pi * s_id,
        fn_: po * f_ood,
        tn: pi * f_id,
    })
}

/// Ratios derived from a confusion table; `None` where the denominator is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedRates {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

pub fn derived_rates(c: &ConfusionProportions) -> DerivedRates {
    DerivedRates {
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
        ppv: ratio(c.tp, c.tp + c.fp),
        npv: ratio(c.tn, c.tn + c.fn_),
    }
}
