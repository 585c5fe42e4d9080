//! Out-of-distribution detection from autoencoder reconstruction errors.
//!
//! An autoencoder is trained on an in-distribution image corpus. The
//! per-image reconstruction error of held-out in-distribution data is
//! modeled as a Gamma law, per-pixel squared errors as a scaled χ² law,
//! and the fitted laws drive three detectors:
//!
//! * sample detection: Bayes posterior `p(ID | l)` thresholded at `T_p`,
//!   converted to an error threshold `T_v` ([`detector::solve_threshold`]);
//! * pixel segmentation: the same posterior per pixel
//!   ([`detector::pixel_posterior_map`]);
//! * stream detection: a one-sided test on the mean error of `n` samples
//!   ([`detector::stream_test`]).
//!
//! [`metrics`] holds the analytic confusion proportions and the empirical
//! ROC/PR evaluation used to score a detector.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod data;
pub mod detector;
pub mod error;
pub mod io;
pub mod metrics;
pub mod nn;
pub mod parallel;
mod rng;
pub mod stats;
pub mod tensor;

pub use error::{Error, ErrorCategory, Result};
pub use parallel::Execution;
pub use tensor::TensorBuffer;

#[cfg(test)]
#[path = "../tests/common/oracle.rs"]
pub(crate) mod oracle;
