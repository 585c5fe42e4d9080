use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::parallel::{map_indexed, Execution};
use crate::rng::stream_rng;
use crate::stats::std_normal_sf;
use crate::{Error, Result};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.01;

/// One-sided test of `H0: E[l] = μ_l` against `E[l] > μ_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamTestResult {
    pub n: usize,
    pub mean: f64,
    /// Mean excess over the expected error.
    pub z: f64,
    /// Standard error `σ_l / √n`.
    pub s: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub significance: f64,
    pub reject: bool,
}

/// Uses the known in-distribution `σ_l` and the normal tail, so the statistic
/// is a z-score.
pub fn stream_test(errors: &[f64], mu_l: f64, sigma_l: f64, significance: f64) -> Result<StreamTestResult> {
    let n = errors.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("stream test needs n >= 2 samples, got {n}")));
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::InvalidArgument(format!("significance {significance} outside (0, 1)")));
    }
    if !(sigma_l > 0.0 && sigma_l.is_finite()) {
        return Err(Error::Degenerate(format!("stream test needs sigma_l > 0, got {sigma_l}")));
    }
    let mean = errors.iter().sum::<f64>() / n as f64;
    let z = mean - mu_l;
    let s = sigma_l / (n as f64).sqrt();
    let t_stat = z / s;
    let p_value = std_normal_sf(t_stat);
    Ok(StreamTestResult {
        n,
        mean,
        z,
        s,
        t_stat,
        p_value,
        significance,
        reject: p_value < significance,
    })
}

/// Fraction of `trials` simulated streams that are rejected. Each stream has
/// `n` errors drawn from `N(μ_l + shift, σ_l²)`; trial `k` uses its own RNG
/// stream, so the result does not depend on the execution mode.
#[allow(clippy::too_many_arguments)]
pub fn simulate_rejection_rate(
    mu_l: f64,
    sigma_l: f64,
    shift: f64,
    n: usize,
    trials: usize,
    significance: f64,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    let law = Normal::new(mu_l + shift, sigma_l)
        .map_err(|e| Error::InvalidArgument(format!("simulation law: {e}")))?;
    let outcomes = map_indexed(exec, trials, |k| -> Result<bool> {
        let mut rng = stream_rng(seed, k as u64);
        let errors: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
        Ok(stream_test(&errors, mu_l, sigma_l, significance)?.reject)
    });
    let mut rejected = 0usize;
    for o in outcomes {
        rejected += o? as usize;
    }
    Ok(rejected as f64 / trials.max(1) as f64)
}
