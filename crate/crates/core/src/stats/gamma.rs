use serde::{Deserialize, Serialize};

use super::special::{lgamma, reg_lower_gamma, reg_upper_gamma};
use super::MomentEstimate;
use crate::{Error, Result};

/// Gamma law in shape/rate form: `p(l) = β^α l^{α−1} e^{−βl} / Γ(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl GammaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(alpha) || !ok(beta) {
            return Err(Error::Domain(format!(
                "gamma parameters must be positive and finite, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn mean(&self) -> f64 {
        self.alpha / self.beta
    }

    pub fn variance(&self) -> f64 {
        self.alpha / (self.beta * self.beta)
    }

    /// Analytic moments, the inverse of [`fit_gamma_mom`].
    pub fn moments(&self) -> MomentEstimate {
        MomentEstimate {
            mu: self.mean(),
            sigma2: self.variance(),
            n: 0,
        }
    }

    /// Log density; `+∞` at `0` when `α < 1`.
    pub fn ln_pdf(&self, l: f64) -> Result<f64> {
        if !(l >= 0.0) {
            return Err(Error::Domain(format!("gamma density needs l >= 0, got {l}")));
        }
        let GammaParams { alpha, beta } = *self;
        if l == 0.0 {
            return Ok(if alpha < 1.0 {
                f64::INFINITY
            } else if alpha == 1.0 {
                beta.ln()
            } else {
                f64::NEG_INFINITY
            });
        }
        if l.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(alpha * beta.ln() + (alpha - 1.0) * l.ln() - beta * l - lgamma(alpha))
    }

    pub fn pdf(&self, l: f64) -> Result<f64> {
        Ok(self.ln_pdf(l)?.exp())
    }

    /// `P(α, βl)`.
    pub fn cdf(&self, l: f64) -> Result<f64> {
        if !(l >= 0.0) {
            return Err(Error::Domain(format!("gamma cdf needs l >= 0, got {l}")));
        }
        reg_lower_gamma(self.alpha, self.beta * l)
    }

    /// `Q(α, βl)`, accurate in the upper tail.
    pub fn sf(&self, l: f64) -> Result<f64> {
        if !(l >= 0.0) {
            return Err(Error::Domain(format!("gamma sf needs l >= 0, got {l}")));
        }
        reg_upper_gamma(self.alpha, self.beta * l)
    }

    /// Smallest `l` with `F(l) ≥ q`, by bracketing and bisection.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("quantile level {q} outside (0, 1)")));
        }
        let mut lo = 0.0;
        let mut hi = self.mean().max(f64::MIN_POSITIVE);
        while self.cdf(hi)? < q {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NoConvergence("gamma quantile bracket"));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid)? < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

/// Method of moments: `α = μ²/σ²`, `β = μ/σ²`.
pub fn fit_gamma_mom(m: &MomentEstimate) -> Result<GammaParams> {
    if !(m.mu > 0.0) || !(m.sigma2 > 0.0) {
        return Err(Error::Degenerate(format!(
            "gamma fit needs positive mean and variance, got mu={}, sigma2={}",
            m.mu, m.sigma2
        )));
    }
    GammaParams::new(m.mu * m.mu / m.sigma2, m.mu / m.sigma2)
}

pub fn gamma_pdf(p: &GammaParams, l: f64) -> Result<f64> {
    p.pdf(l)
}

pub fn gamma_cdf(p: &GammaParams, l: f64) -> Result<f64> {
    p.cdf(l)
}
