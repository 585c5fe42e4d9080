use super::backward::Gradients;
use super::model::Autoencoder;
use super::train::TrainConfig;
use super::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl From<&TrainConfig> for AdamHyper {
    fn from(cfg: &TrainConfig) -> Self {
        Self {
            learning_rate: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.eps_adam,
        }
    }
}

/// First and second moment accumulators, one buffer per parameter slice.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<T> {
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
    step: u64,
}

impl<T: Real> OptimizerState<T> {
    pub fn for_lengths(lengths: &[usize]) -> Self {
        Self {
            first: lengths.iter().map(|&n| vec![T::zero(); n]).collect(),
            second: lengths.iter().map(|&n| vec![T::zero(); n]).collect(),
            step: 0,
        }
    }

    pub fn new(params: &Autoencoder<T>) -> Self {
        let lengths: Vec<usize> = params.param_slices().iter().map(|s| s.len()).collect();
        Self::for_lengths(&lengths)
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn second_moments(&self) -> impl Iterator<Item = &T> {
        self.second.iter().flatten()
    }
}

/// One bias-corrected Adam update over matching parameter/gradient slices.
/// Returns the L2 norm of the applied parameter change.
pub fn adam_update<T: Real>(
    state: &mut OptimizerState<T>,
    params: &mut [&mut [T]],
    grads: &[&[T]],
    hyper: &AdamHyper,
) -> Result<f64> {
    let lens_match = params.len() == state.first.len()
        && grads.len() == params.len()
        && params
            .iter()
            .zip(grads)
            .zip(&state.first)
            .all(|((p, g), m)| p.len() == g.len() && p.len() == m.len());
    if !lens_match {
        return Err(Error::ShapeMismatch {
            context: "adam_step",
            expected: state.first.iter().map(Vec::len).collect(),
            actual: grads.iter().map(|g| g.len()).collect(),
        });
    }
    state.step += 1;
    let t = state.step as i32;
    let b1 = T::of(hyper.beta1);
    let b2 = T::of(hyper.beta2);
    let c1 = T::of(1.0 - hyper.beta1.powi(t));
    let c2 = T::of(1.0 - hyper.beta2.powi(t));
    let lr = T::of(hyper.learning_rate);
    let eps = T::of(hyper.eps);
    let one = T::one();

    let mut delta_sq = 0.0f64;
    for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
        let m = &mut state.first[k];
        let v = &mut state.second[k];
        for i in 0..p.len() {
            let gi = g[i];
            m[i] = b1 * m[i] + (one - b1) * gi;
            v[i] = b2 * v[i] + (one - b2) * gi * gi;
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            let update = lr * m_hat / (v_hat.sqrt() + eps);
            p[i] -= update;
            delta_sq += update.as_f64() * update.as_f64();
        }
    }
    Ok(delta_sq.sqrt())
}

/// Applies one Adam step to the autoencoder; returns `||θ_t − θ_{t−1}||₂`.
pub fn adam_step<T: Real>(
    state: &mut OptimizerState<T>,
    params: &mut Autoencoder<T>,
    grads: &Gradients<T>,
    cfg: &TrainConfig,
) -> Result<f64> {
    let grad_slices = grads.slices();
    let mut param_slices = params.param_slices_mut();
    adam_update(state, &mut param_slices, &grad_slices, &AdamHyper::from(cfg))
}
