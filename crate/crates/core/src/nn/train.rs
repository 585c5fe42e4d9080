use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, OptimizerState};
use super::model::{Architecture, Autoencoder, AutoencoderParams};
use crate::data::{epoch_order, ImageDataset};
use crate::{Error, Result};

/// Optimization settings for [`train`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    pub seed: u64,
    /// Stop once `||θ_t − θ_{t−1}||₂ <= convergence_eps`.
    pub convergence_eps: f64,
    pub max_steps: usize,
    pub hidden: Vec<usize>,
    pub latent_dim: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 128,
            epochs: 20,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps_adam: 1e-8,
            seed: 0,
            convergence_eps: 0.0,
            max_steps: usize::MAX,
            hidden: vec![256, 64],
            latent_dim: 32,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.batch_size == 0 || self.epochs == 0 || self.max_steps == 0 {
            return fail("batch_size, epochs and max_steps must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail("learning_rate must be positive");
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0) || !(self.beta2 > 0.0 && self.beta2 < 1.0) {
            return fail("beta1 and beta2 must lie in (0, 1)");
        }
        if !(self.eps_adam > 0.0) {
            return fail("eps_adam must be positive");
        }
        if !(self.convergence_eps >= 0.0) {
            return fail("convergence_eps must be non-negative");
        }
        if self.latent_dim == 0 || self.hidden.contains(&0) {
            return fail("layer widths must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EpochsExhausted,
    MaxSteps,
    Converged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    /// Mean training loss of each (possibly partial) epoch.
    pub epoch_losses: Vec<f64>,
    /// Mean batch loss of every optimizer step.
    pub step_losses: Vec<f64>,
    pub steps: usize,
    pub stop: StopReason,
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub params: AutoencoderParams,
    pub log: TrainLog,
}

/// Minibatch Adam on the mean reconstruction loss, with a seeded shuffle
/// per epoch. Single-threaded and fully determined by `(dataset, cfg)`.
pub fn train(dataset: &ImageDataset, cfg: &TrainConfig) -> Result<Trained> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let arch = Architecture {
        input_shape: dataset.shape().as_array(),
        hidden: cfg.hidden.clone(),
        latent_dim: cfg.latent_dim,
    };
    let mut model = Autoencoder::<f32>::new(&arch, cfg.seed)?;
    let mut state = OptimizerState::new(&model);
    let width = dataset.shape().len();

    let mut log = TrainLog {
        epoch_losses: Vec::with_capacity(cfg.epochs),
        step_losses: Vec::new(),
        steps: 0,
        stop: StopReason::EpochsExhausted,
    };
    let mut buffer = Vec::with_capacity(cfg.batch_size * width);

    'epochs: for epoch in 0..cfg.epochs {
        let order = epoch_order(dataset.len(), cfg.seed, epoch as u64);
        let (mut sum, mut seen) = (0.0, 0usize);
        for chunk in order.chunks(cfg.batch_size) {
            buffer.clear();
            for &i in chunk {
                buffer.extend_from_slice(dataset.image(i));
            }
            let x = Array2::from_shape_vec((chunk.len(), width), std::mem::take(&mut buffer))
                .expect("batch shape");
            let (loss, grads, fwd) = model.backward_matrix(x.view())?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { step: log.steps });
            }
            model.update_running_stats(&fwd);
            let delta = adam_step(&mut state, &mut model, &grads, cfg)?;
            buffer = x.into_raw_vec_and_offset().0;

            log.steps += 1;
            log.step_losses.push(loss);
            sum += loss * chunk.len() as f64;
            seen += chunk.len();

            let stop = if delta <= cfg.convergence_eps {
                Some(StopReason::Converged)
            } else if log.steps >= cfg.max_steps {
                Some(StopReason::MaxSteps)
            } else {
                None
            };
            if let Some(reason) = stop {
                log.stop = reason;
                log.epoch_losses.push(sum / seen as f64);
                break 'epochs;
            }
        }
        log.epoch_losses.push(sum / seen as f64);
    }

    Ok(Trained { params: model, log })
}
