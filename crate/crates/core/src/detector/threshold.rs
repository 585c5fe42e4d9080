use serde::{Deserialize, Serialize};

use super::{posterior_id, Priors};
use crate::stats::GammaParams;
use crate::{Error, Result};

/// Grid resolution of the bracketing scan and the monotonicity check.
pub const GRID_POINTS: usize = 1024;

const UPPER_QUANTILE: f64 = 0.99999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSolution {
    /// Error threshold `T_v`.
    pub t_v: f64,
    /// Posterior at `t_v`.
    pub posterior: f64,
    /// Upper end of the search interval.
    pub l_max: f64,
    /// Whether the posterior was non-increasing over the whole grid.
    pub monotone: bool,
}

/// Solves `p(ID | T_v) = t_p` for the smallest crossing on `[0, l_max]`.
pub fn solve_threshold(
    t_p: f64,
    id: &GammaParams,
    ood: &GammaParams,
    priors: &Priors,
) -> Result<ThresholdSolution> {
    if !(t_p > 0.0 && t_p < 1.0) {
        return Err(Error::InvalidArgument(format!("t_p={t_p} outside (0, 1)")));
    }
    let l_max = id.quantile(UPPER_QUANTILE)?.max(ood.quantile(UPPER_QUANTILE)?);
    let post = |l: f64| posterior_id(l, id, ood, priors);
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|k| l_max * k as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    // The posterior at exactly zero is undefined when both shapes exceed 1;
    // the first grid point is then nudged inward.
    let mut values = Vec::with_capacity(GRID_POINTS);
    let mut points = Vec::with_capacity(GRID_POINTS);
    for (k, &l) in grid.iter().enumerate() {
        let (l, v) = match post(l) {
            Ok(v) => (l, v),
            Err(Error::UndefinedPosterior { .. }) if k == 0 => {
                let nudged = grid[1] * 1e-6;
                (nudged, post(nudged)?)
            }
            Err(e) => return Err(e),
        };
        points.push(l);
        values.push(v);
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let bracket = values
        .windows(2)
        .position(|w| w[0] - t_p > 0.0 && w[1] - t_p <= 0.0)
        .ok_or_else(|| {
            let (lo, hi) = values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            Error::NoThreshold(format!(
                "posterior never falls through t_p={t_p} on [0, {l_max:.6e}] (range {lo:.6} to {hi:.6})"
            ))
        })?;
    let (mut lo, mut hi) = (points[bracket], points[bracket + 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if post(mid)? > t_p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (plo, phi) = (post(lo)?, post(hi)?);
    let (t_v, posterior) = if (plo - t_p).abs() < (phi - t_p).abs() {
        (lo, plo)
    } else {
        (hi, phi)
    };
    Ok(ThresholdSolution {
        t_v,
        posterior,
        l_max,
        monotone,
    })
}

/// Sample verdict; positive means out-of-distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Positive,
    Negative,
}

impl Verdict {
    pub fn is_ood(self) -> bool {
        self == Verdict::Positive
    }
}

/// Positive iff `l ≥ t_v`; the boundary counts as positive.
pub fn classify_sample(l: f64, t_v: f64) -> Verdict {
    if l >= t_v {
        Verdict::Positive
    } else {
        Verdict::Negative
    }
}
