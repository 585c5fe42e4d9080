use ndarray::ArrayView2;

use super::Real;
use crate::{Error, Result, TensorBuffer};

/// Per-row mean squared error, accumulated in `f64`.
pub fn per_sample_mse<T: Real>(x_hat: ArrayView2<T>, x: ArrayView2<T>) -> Vec<f64> {
    debug_assert_eq!(x_hat.dim(), x.dim());
    let width = x.ncols() as f64;
    x_hat
        .rows()
        .into_iter()
        .zip(x.rows())
        .map(|(a, b)| {
            a.iter()
                .zip(b.iter())
                .map(|(&p, &q)| {
                    let d = p.as_f64() - q.as_f64();
                    d * d
                })
                .sum::<f64>()
                / width
        })
        .collect()
}

/// Reconstruction loss `||x̂ − x||² / dim(x)` for every sample of a batch.
pub fn mse_loss(x_hat: &TensorBuffer, x: &TensorBuffer) -> Result<Vec<f64>> {
    if x_hat.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            context: "mse_loss",
            expected: x.shape().to_vec(),
            actual: x_hat.shape().to_vec(),
        });
    }
    Ok(per_sample_mse(x_hat.as_matrix(), x.as_matrix()))
}
