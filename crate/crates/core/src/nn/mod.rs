//! Fully connected autoencoder with hand-written reverse-mode gradients,
//! a batch-standardized latent layer, and an Adam training loop.

mod adam;
mod backward;
mod loss;
mod model;
mod persist;
mod train;

pub use adam::{adam_step, adam_update, AdamHyper, OptimizerState};
pub use backward::{DenseGrad, Gradients};
pub use loss::{mse_loss, per_sample_mse};
pub use model::{
    Activation, Architecture, Autoencoder, AutoencoderParams, Dense, Forward, LatentNorm, Mode,
};
pub use persist::{FORMAT_VERSION, MODEL_MAGIC};
pub use train::{train, StopReason, TrainConfig, TrainLog, Trained};

/// Floating-point element type the network can be evaluated in.
///
/// Training runs in `f32`; gradient checks run the same code in `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::NumAssign
    + ndarray::LinalgScalar
    + ndarray::ScalarOperand
    + std::fmt::Debug
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    fn of(v: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    fn of(v: f64) -> Self {
        v as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn as_f64(self) -> f64 {
        self
    }
}
