use ndarray::{Array1, Array2, ArrayView2, Axis};

use super::loss::per_sample_mse;
use super::model::{Autoencoder, Dense, Forward, Mode};
use super::Real;
use crate::{Result, TensorBuffer};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrad<T> {
    pub weights: Array2<T>,
    pub bias: Array1<T>,
}

/// Gradient of the mean batch loss, laid out like [`Autoencoder`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub encoder: Vec<DenseGrad<T>>,
    pub decoder: Vec<DenseGrad<T>>,
}

impl<T: Real> Gradients<T> {
    /// Same ordering as [`Autoencoder::param_slices`].
    pub fn slices(&self) -> Vec<&[T]> {
        self.encoder
            .iter()
            .chain(&self.decoder)
            .flat_map(|g| {
                [
                    g.weights.as_slice().expect("standard layout"),
                    g.bias.as_slice().expect("standard layout"),
                ]
            })
            .collect()
    }

    pub fn l2_norm(&self) -> f64 {
        self.slices()
            .iter()
            .flat_map(|s| s.iter())
            .map(|v| v.as_f64() * v.as_f64())
            .sum::<f64>()
            .sqrt()
    }
}

fn layer_backward<T: Real>(
    layer: &Dense<T>,
    input: &Array2<T>,
    output: &Array2<T>,
    d_out: Array2<T>,
    need_input_grad: bool,
) -> (DenseGrad<T>, Option<Array2<T>>) {
    let act = layer.activation;
    let mut dz = d_out;
    dz.zip_mut_with(output, |d, &o| *d *= act.derivative_from_output(o));
    let weights = input.t().dot(&dz);
    let bias = dz.sum_axis(Axis(0));
    let d_in = need_input_grad.then(|| dz.dot(&layer.weights.t()));
    (DenseGrad { weights, bias }, d_in)
}

impl<T: Real> Autoencoder<T> {
    /// Mean per-sample loss of a train-mode pass, without touching the
    /// running statistics.
    pub fn batch_loss(&self, x: ArrayView2<T>) -> Result<f64> {
        let fwd = self.forward(x, Mode::Train)?;
        let losses = per_sample_mse(fwd.output().view(), x);
        Ok(losses.iter().sum::<f64>() / losses.len() as f64)
    }

    /// Exact gradient of `(1/n) Σ_i ||x̂_i − x_i||² / dim(x)` under a
    /// train-mode forward pass. Returns the mean loss, the gradients and the
    /// forward record (so callers can update running statistics).
    pub fn backward_matrix(&self, x: ArrayView2<T>) -> Result<(f64, Gradients<T>, Forward<T>)> {
        let fwd = self.forward(x, Mode::Train)?;
        let out = fwd.output();
        let (n, width) = out.dim();
        let losses = per_sample_mse(out.view(), x);
        let loss = losses.iter().sum::<f64>() / n as f64;

        let scale = T::of(2.0 / (n * width) as f64);
        let mut grad = (out - &x) * scale;

        let mut decoder = Vec::with_capacity(self.decoder.len());
        for k in (0..self.decoder.len()).rev() {
            let (g, d_in) = layer_backward(
                &self.decoder[k],
                &fwd.dec_acts[k],
                &fwd.dec_acts[k + 1],
                grad,
                true,
            );
            decoder.push(g);
            grad = d_in.unwrap();
        }
        decoder.reverse();

        // Through y = (z - mean_b) * inv_std with batch statistics:
        // dz = inv_std * (dy - mean(dy) - y * mean(dy * y))
        let y = fwd.latent();
        let nf = T::of(n as f64);
        let mean_dy = grad.sum_axis(Axis(0)) / nf;
        let mean_dy_y = (&grad * y).sum_axis(Axis(0)) / nf;
        let mut dz = grad - &mean_dy - &(y * &mean_dy_y);
        dz *= &fwd.inv_std;
        grad = dz;

        let mut encoder = Vec::with_capacity(self.encoder.len());
        for k in (0..self.encoder.len()).rev() {
            let (g, d_in) = layer_backward(
                &self.encoder[k],
                &fwd.enc_acts[k],
                &fwd.enc_acts[k + 1],
                grad,
                k > 0,
            );
            encoder.push(g);
            match d_in {
                Some(d) => grad = d,
                None => break,
            }
        }
        encoder.reverse();

        Ok((loss, Gradients { encoder, decoder }, fwd))
    }
}

impl Autoencoder<f32> {
    /// Gradient of the mean batch loss for a `n × C × H × W` batch.
    pub fn backward(&self, batch: &TensorBuffer) -> Result<Gradients<f32>> {
        if batch.row_width() != self.input_width() {
            return Err(crate::Error::ShapeMismatch {
                context: "backward",
                expected: self.input_shape.to_vec(),
                actual: batch.shape()[1..].to_vec(),
            });
        }
        Ok(self.backward_matrix(batch.as_matrix())?.1)
    }
}
