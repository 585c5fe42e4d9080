use serde::{Deserialize, Serialize};

use super::{
    classify_sample, pixel_posterior_map, posterior_id, solve_threshold, PixelPosterior, Priors,
    Verdict,
};
use crate::stats::{ChiSquareParams, FittedStats, GammaParams, PixelErrorMap};
use crate::{Error, Result};

/// Everything a deployed sample/pixel detector needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionProfile {
    pub id_gamma: GammaParams,
    pub ood_gamma: GammaParams,
    pub id_chi: ChiSquareParams,
    pub ood_chi: ChiSquareParams,
    pub priors: Priors,
    pub t_p: f64,
    pub t_v: f64,
    pub monotone: bool,
}

/// One line of detector output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub index: usize,
    pub l: f64,
    pub posterior: f64,
    pub verdict: Verdict,
}

impl DetectionProfile {
    /// Builds a profile from fitted statistics that include an OOD fit.
    pub fn from_stats(stats: &FittedStats, t_p: f64, priors: Priors) -> Result<Self> {
        let missing = || {
            Error::InvalidArgument(
                "statistics have no OOD fit; run `fit` with an OOD dataset first".into(),
            )
        };
        let ood_gamma = stats.ood_gamma.ok_or_else(missing)?.params()?;
        let ood_chi = stats.ood_chi.ok_or_else(missing)?;
        let id_gamma = stats.id_gamma.params()?;
        let sol = solve_threshold(t_p, &id_gamma, &ood_gamma, &priors)?;
        Ok(Self {
            id_gamma,
            ood_gamma,
            id_chi: stats.id_chi,
            ood_chi,
            priors,
            t_p,
            t_v: sol.t_v,
            monotone: sol.monotone,
        })
    }

    pub fn posterior(&self, l: f64) -> Result<f64> {
        posterior_id(l, &self.id_gamma, &self.ood_gamma, &self.priors)
    }

    pub fn classify(&self, l: f64) -> Verdict {
        classify_sample(l, self.t_v)
    }

    /// Verdict records for a sequence of reconstruction errors. A posterior
    /// that is undefined at `l` is reported as the prior.
    pub fn verdicts(&self, errors: &[f64]) -> Result<Vec<VerdictRecord>> {
        errors
            .iter()
            .enumerate()
            .map(|(index, &l)| {
                let posterior = match self.posterior(l) {
                    Ok(p) => p,
                    Err(Error::UndefinedPosterior { .. }) => self.priors.p_id(),
                    Err(e) => return Err(e),
                };
                Ok(VerdictRecord {
                    index,
                    l,
                    posterior,
                    verdict: self.classify(l),
                })
            })
            .collect()
    }

    pub fn segment(&self, t_map: &PixelErrorMap) -> Result<PixelPosterior> {
        pixel_posterior_map(t_map, &self.id_chi, &self.ood_chi, &self.priors)
    }
}
