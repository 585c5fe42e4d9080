use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::ImageDataset;
use crate::nn::{per_sample_mse, Autoencoder};
use crate::parallel::{map_chunks, Execution};
use crate::{Error, Result};

/// Images per work unit. Fixed so results do not depend on thread count.
const CHUNK: usize = 256;

/// Per-image (or per-pixel) reconstruction errors with their origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorVector {
    pub values: Vec<f64>,
    pub dataset: String,
    pub model_id: Option<String>,
}

impl ErrorVector {
    pub fn new(values: Vec<f64>, dataset: impl Into<String>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain(format!("reconstruction error {v} is not finite and non-negative")));
        }
        Ok(Self {
            values,
            dataset: dataset.into(),
            model_id: None,
        })
    }

    pub fn with_model_id(mut self, id: impl Into<String>) -> Self {
        self.model_id = Some(id.into());
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Channel-averaged squared error per pixel of one image, row-major `H × W`.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelErrorMap {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

impl PixelErrorMap {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn check_shape(params: &Autoencoder, ds: &ImageDataset) -> Result<()> {
    if params.input_shape() != ds.shape().as_array() {
        return Err(Error::ShapeMismatch {
            context: "dataset vs model input",
            expected: params.input_shape().to_vec(),
            actual: ds.shape().as_array().to_vec(),
        });
    }
    Ok(())
}

fn chunked<R: Send>(
    params: &Autoencoder,
    ds: &ImageDataset,
    exec: Execution,
    f: impl Fn(&Array2<f32>, &crate::TensorBuffer) -> Vec<R> + Sync + Send,
) -> Result<Vec<R>> {
    check_shape(params, ds)?;
    let parts = map_chunks(exec, ds.len(), CHUNK, |range| -> Result<Vec<R>> {
        let batch = ds.batch(range);
        let out = params.reconstruct_matrix(batch.as_matrix())?;
        Ok(f(&out, &batch))
    });
    let mut all = Vec::with_capacity(ds.len());
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// `l_i = ‖x̂_i − x_i‖² / dim` for every image, in dataset order.
pub fn recon_errors(params: &Autoencoder, ds: &ImageDataset, exec: Execution) -> Result<ErrorVector> {
    let values = chunked(params, ds, exec, |out, batch| per_sample_mse(out.view(), batch.as_matrix()))?;
    ErrorVector::new(values, ds.name())
}

/// Per-pixel error maps `t(h, w)`; the mean of a map equals that image's `l`.
pub fn pixel_sq_errors(
    params: &Autoencoder,
    ds: &ImageDataset,
    exec: Execution,
) -> Result<Vec<PixelErrorMap>> {
    let shape = ds.shape();
    let plane = shape.height * shape.width;
    chunked(params, ds, exec, |out, batch| {
        let x = batch.as_matrix();
        (0..x.nrows())
            .map(|i| {
                let mut values = vec![0.0f64; plane];
                for c in 0..shape.channels {
                    for (p, v) in values.iter_mut().enumerate() {
                        let d = (out[[i, c * plane + p]] - x[[i, c * plane + p]]) as f64;
                        *v += d * d;
                    }
                }
                for v in &mut values {
                    *v /= shape.channels as f64;
                }
                PixelErrorMap {
                    height: shape.height,
                    width: shape.width,
                    values,
                }
            })
            .collect()
    })
}

/// Reconstructions of every image, as a dataset of the same shape.
pub fn reconstruct_dataset(params: &Autoencoder, ds: &ImageDataset, exec: Execution) -> Result<ImageDataset> {
    let rows = chunked(params, ds, exec, |out, _| {
        out.rows().into_iter().map(|r| r.to_vec()).collect()
    })?;
    ImageDataset::new(format!("{}-recon", ds.name()), ds.shape(), rows.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ImageShape;
    use crate::nn::{mse_loss, Architecture};

    fn tiny_arch() -> Architecture {
        Architecture {
            input_shape: [1, 3, 3],
            hidden: vec![5],
            latent_dim: 2,
        }
    }

    fn noise_ds(n: usize, seed: u64) -> ImageDataset {
        crate::data::gen_uniform_noise(n, ImageShape::new(1, 3, 3), seed).unwrap()
    }

    #[test]
    fn zero_model_reconstructs_half_gray_exactly() {
        let model = Autoencoder::zeros(&tiny_arch()).unwrap();
        let ds = ImageDataset::new("gray", ImageShape::new(1, 3, 3), vec![0.5; 9]).unwrap();
        assert_eq!(recon_errors(&model, &ds, Execution::Sequential).unwrap().values, vec![0.0]);
        let maps = pixel_sq_errors(&model, &ds, Execution::Sequential).unwrap();
        assert!(maps[0].values.iter().all(|&t| t == 0.0));
        let ds = ImageDataset::new("white", ImageShape::new(1, 3, 3), vec![1.0; 9]).unwrap();
        let maps = pixel_sq_errors(&model, &ds, Execution::Sequential).unwrap();
        assert!(maps[0].values.iter().all(|&t| t == 0.25));
    }

    #[test]
    fn matches_mse_loss_and_pixel_means() {
        let model = Autoencoder::new(&tiny_arch(), 3).unwrap();
        let ds = noise_ds(600, 1);
        let l = recon_errors(&model, &ds, Execution::Parallel).unwrap();
        let batch = ds.batch(0..ds.len());
        let direct = mse_loss(&model.reconstruct(&batch).unwrap(), &batch).unwrap();
        assert_eq!(l.values, direct);
        let maps = pixel_sq_errors(&model, &ds, Execution::Parallel).unwrap();
        for (m, li) in maps.iter().zip(&l.values) {
            assert!((m.mean() - li).abs() <= 1e-6 * li.max(1e-12));
        }
    }

    #[test]
    fn modes_agree_and_order_is_kept() {
        let model = Autoencoder::new(&tiny_arch(), 5).unwrap();
        let ds = noise_ds(700, 2);
        let a = recon_errors(&model, &ds, Execution::Sequential).unwrap();
        let b = recon_errors(&model, &ds, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let one = recon_errors(&model, &ds.subset(650..651), Execution::Sequential).unwrap();
        assert_eq!(one.values[0], a.values[650]);
    }

    #[test]
    fn shape_mismatch() {
        let model = Autoencoder::zeros(&tiny_arch()).unwrap();
        let ds = ImageDataset::new("x", ImageShape::new(1, 2, 2), vec![0.5; 4]).unwrap();
        assert!(matches!(
            recon_errors(&model, &ds, Execution::Sequential),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
