use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;

use super::Real;
use crate::rng::stream_rng;
use crate::{Error, Result, TensorBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
}

impl Activation {
    pub(crate) fn tag(self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Relu => 1,
            Activation::Sigmoid => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Identity),
            1 => Some(Activation::Relu),
            2 => Some(Activation::Sigmoid),
            _ => None,
        }
    }

    fn apply<T: Real>(self, z: &Array2<T>) -> Array2<T> {
        match self {
            Activation::Identity => z.clone(),
            Activation::Relu => z.mapv(|v| v.max(T::zero())),
            Activation::Sigmoid => z.mapv(sigmoid),
        }
    }

    /// Derivative expressed through the activation output.
    pub(crate) fn derivative_from_output<T: Real>(self, out: T) -> T {
        match self {
            Activation::Identity => T::one(),
            Activation::Relu => {
                if out > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Sigmoid => out * (T::one() - out),
        }
    }
}

fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Affine layer `act(x W + b)`; `weights` is `inputs × outputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub weights: Array2<T>,
    pub bias: Array1<T>,
    pub activation: Activation,
}

impl<T: Real> Dense<T> {
    pub fn inputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.weights.ncols()
    }

    fn forward(&self, x: &ArrayView2<T>) -> (Array2<T>, Array2<T>) {
        let mut pre = x.dot(&self.weights);
        pre += &self.bias;
        let post = self.activation.apply(&pre);
        (pre, post)
    }
}

/// Per-dimension standardization of the latent code (no learned affine).
#[derive(Debug, Clone, PartialEq)]
pub struct LatentNorm<T> {
    pub running_mean: Array1<T>,
    pub running_var: Array1<T>,
    pub momentum: T,
    pub eps: T,
}

impl<T: Real> LatentNorm<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            running_mean: Array1::zeros(dim),
            running_var: Array1::ones(dim),
            momentum: T::of(0.1),
            eps: T::of(1e-8),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Standardize with the batch statistics.
    Train,
    /// Standardize with the running statistics.
    Infer,
}

/// Layer widths of a mirrored encoder/decoder pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    /// `[channels, height, width]`
    pub input_shape: [usize; 3],
    /// Encoder hidden widths; the decoder uses them in reverse.
    pub hidden: Vec<usize>,
    pub latent_dim: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            input_shape: [1, 28, 28],
            hidden: vec![256, 64],
            latent_dim: 32,
        }
    }
}

impl Architecture {
    pub fn input_width(&self) -> usize {
        self.input_shape.iter().product()
    }

    fn widths(&self) -> (Vec<usize>, Vec<usize>) {
        let mut enc = vec![self.input_width()];
        enc.extend(&self.hidden);
        enc.push(self.latent_dim);
        let dec: Vec<usize> = enc.iter().rev().copied().collect();
        (enc, dec)
    }
}

/// Encoder `g`, decoder `f` and latent normalization statistics. The full
/// model is `h(x) = f(standardize(g(x)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder<T = f32> {
    pub(crate) input_shape: [usize; 3],
    pub(crate) encoder: Vec<Dense<T>>,
    pub(crate) decoder: Vec<Dense<T>>,
    pub(crate) latent_norm: LatentNorm<T>,
}

pub type AutoencoderParams = Autoencoder<f32>;

/// Activations recorded by a forward pass, consumed by the backward pass.
#[derive(Debug, Clone)]
pub struct Forward<T> {
    pub(crate) mode: Mode,
    /// `enc_acts[0]` is the input; `enc_acts[k + 1]` the output of layer `k`.
    pub(crate) enc_acts: Vec<Array2<T>>,
    pub(crate) enc_pre: Vec<Array2<T>>,
    pub(crate) batch_mean: Array1<T>,
    pub(crate) batch_var: Array1<T>,
    pub(crate) inv_std: Array1<T>,
    /// `dec_acts[0]` is the standardized latent.
    pub(crate) dec_acts: Vec<Array2<T>>,
    pub(crate) dec_pre: Vec<Array2<T>>,
}

impl<T: Real> Forward<T> {
    pub fn output(&self) -> &Array2<T> {
        self.dec_acts.last().expect("decoder has layers")
    }

    pub fn latent(&self) -> &Array2<T> {
        &self.dec_acts[0]
    }

    /// Smallest distance of any ReLU pre-activation from the kink at zero.
    pub fn relu_margin(&self, model: &Autoencoder<T>) -> T {
        let enc = model.encoder.iter().zip(&self.enc_pre);
        let dec = model.decoder.iter().zip(&self.dec_pre);
        enc.chain(dec)
            .filter(|(layer, _)| layer.activation == Activation::Relu)
            .flat_map(|(_, pre)| pre.iter().map(|v| v.abs()))
            .fold(T::infinity(), T::min)
    }
}

impl<T: Real> Autoencoder<T> {
    /// Glorot-uniform weights drawn from `seed`, zero biases.
    pub fn new(arch: &Architecture, seed: u64) -> Result<Self> {
        validate_arch(arch)?;
        let (enc_w, dec_w) = arch.widths();
        let mut rng = stream_rng(seed, 0);
        let mut build = |widths: &[usize], last: Activation| -> Vec<Dense<T>> {
            let count = widths.len() - 1;
            (0..count)
                .map(|k| {
                    let (fan_in, fan_out) = (widths[k], widths[k + 1]);
                    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                    let weights = Array2::from_shape_simple_fn((fan_in, fan_out), || {
                        T::of(rng.random_range(-limit..limit))
                    });
                    Dense {
                        weights,
                        bias: Array1::zeros(fan_out),
                        activation: if k + 1 == count { last } else { Activation::Relu },
                    }
                })
                .collect()
        };
        let encoder = build(&enc_w, Activation::Identity);
        let decoder = build(&dec_w, Activation::Sigmoid);
        Ok(Self {
            input_shape: arch.input_shape,
            encoder,
            decoder,
            latent_norm: LatentNorm::new(arch.latent_dim),
        })
    }

    /// Same layout as [`Autoencoder::new`] with every weight and bias zero.
    pub fn zeros(arch: &Architecture) -> Result<Self> {
        let mut model = Self::new(arch, 0)?;
        for layer in model.encoder.iter_mut().chain(model.decoder.iter_mut()) {
            layer.weights.fill(T::zero());
        }
        Ok(model)
    }

    pub fn from_parts(
        input_shape: [usize; 3],
        encoder: Vec<Dense<T>>,
        decoder: Vec<Dense<T>>,
        latent_norm: LatentNorm<T>,
    ) -> Result<Self> {
        let model = Self {
            input_shape,
            encoder,
            decoder,
            latent_norm,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.encoder.is_empty() || self.decoder.is_empty() {
            return bad("encoder and decoder need at least one layer".into());
        }
        let layers = self.encoder.iter().chain(&self.decoder);
        let mut width = self.input_width();
        for (k, layer) in layers.enumerate() {
            if layer.inputs() != width || layer.bias.len() != layer.outputs() {
                return bad(format!("layer {k} does not chain: expected input width {width}"));
            }
            if k + 1 == self.encoder.len() && layer.outputs() != self.latent_dim() {
                return bad("encoder output width differs from latent dimension".into());
            }
            width = layer.outputs();
        }
        if width != self.input_width() {
            return bad("decoder output width differs from input size".into());
        }
        let norm = &self.latent_norm;
        if norm.running_mean.len() != self.latent_dim() || norm.running_var.len() != self.latent_dim() {
            return bad("latent statistics have wrong length".into());
        }
        if norm.running_var.iter().any(|&v| !(v > T::zero())) {
            return bad("running variance must be positive".into());
        }
        if !(norm.momentum > T::zero() && norm.momentum < T::one()) || !(norm.eps > T::zero()) {
            return bad("latent momentum must lie in (0, 1) and eps be positive".into());
        }
        Ok(())
    }

    pub fn input_shape(&self) -> [usize; 3] {
        self.input_shape
    }

    pub fn input_width(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_norm.running_mean.len()
    }

    pub fn encoder(&self) -> &[Dense<T>] {
        &self.encoder
    }

    pub fn decoder(&self) -> &[Dense<T>] {
        &self.decoder
    }

    pub fn latent_norm(&self) -> &LatentNorm<T> {
        &self.latent_norm
    }

    pub fn param_count(&self) -> usize {
        self.param_slices().iter().map(|s| s.len()).sum()
    }

    /// Trainable parameters in a fixed order: encoder then decoder, each
    /// layer's weights followed by its bias.
    pub fn param_slices(&self) -> Vec<&[T]> {
        self.encoder
            .iter()
            .chain(&self.decoder)
            .flat_map(|l| {
                [
                    l.weights.as_slice().expect("standard layout"),
                    l.bias.as_slice().expect("standard layout"),
                ]
            })
            .collect()
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [T]> {
        self.encoder
            .iter_mut()
            .chain(self.decoder.iter_mut())
            .flat_map(|l| {
                [
                    l.weights.as_slice_mut().expect("standard layout"),
                    l.bias.as_slice_mut().expect("standard layout"),
                ]
            })
            .collect()
    }

    /// Converts every parameter and statistic to another element type.
    pub fn cast<U: Real>(&self) -> Autoencoder<U> {
        let conv = |layers: &[Dense<T>]| {
            layers
                .iter()
                .map(|l| Dense {
                    weights: l.weights.mapv(|v| U::of(v.as_f64())),
                    bias: l.bias.mapv(|v| U::of(v.as_f64())),
                    activation: l.activation,
                })
                .collect()
        };
        let n = &self.latent_norm;
        Autoencoder {
            input_shape: self.input_shape,
            encoder: conv(&self.encoder),
            decoder: conv(&self.decoder),
            latent_norm: LatentNorm {
                running_mean: n.running_mean.mapv(|v| U::of(v.as_f64())),
                running_var: n.running_var.mapv(|v| U::of(v.as_f64())),
                momentum: U::of(n.momentum.as_f64()),
                eps: U::of(n.eps.as_f64()),
            },
        }
    }

    fn check_input(&self, x: &ArrayView2<T>, context: &'static str) -> Result<()> {
        if x.ncols() != self.input_width() {
            return Err(Error::ShapeMismatch {
                context,
                expected: self.input_shape.to_vec(),
                actual: vec![x.ncols()],
            });
        }
        if x.nrows() == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(())
    }

    /// Full forward pass. Never mutates the running statistics; see
    /// [`Autoencoder::update_running_stats`].
    pub fn forward(&self, x: ArrayView2<T>, mode: Mode) -> Result<Forward<T>> {
        self.check_input(&x, "encode")?;
        let mut enc_acts = vec![x.to_owned()];
        let mut enc_pre = Vec::with_capacity(self.encoder.len());
        for layer in &self.encoder {
            let (pre, post) = layer.forward(&enc_acts.last().unwrap().view());
            enc_pre.push(pre);
            enc_acts.push(post);
        }
        let raw = enc_acts.last().unwrap();
        let norm = &self.latent_norm;
        let (mean, var) = match mode {
            Mode::Train => batch_moments(raw),
            Mode::Infer => (norm.running_mean.clone(), norm.running_var.clone()),
        };
        let inv_std = var.mapv(|v| T::one() / (v + norm.eps).sqrt());
        let latent = (raw - &mean) * &inv_std;
        let (dec_acts, dec_pre) = self.decode_layers(latent);
        Ok(Forward {
            mode,
            enc_acts,
            enc_pre,
            batch_mean: mean,
            batch_var: var,
            inv_std,
            dec_acts,
            dec_pre,
        })
    }

    fn decode_layers(&self, latent: Array2<T>) -> (Vec<Array2<T>>, Vec<Array2<T>>) {
        let mut acts = vec![latent];
        let mut pres = Vec::with_capacity(self.decoder.len());
        for layer in &self.decoder {
            let (pre, post) = layer.forward(&acts.last().unwrap().view());
            pres.push(pre);
            acts.push(post);
        }
        (acts, pres)
    }

    /// Folds the batch statistics of a train-mode pass into the running ones.
    pub fn update_running_stats(&mut self, fwd: &Forward<T>) {
        if fwd.mode != Mode::Train {
            return;
        }
        let norm = &mut self.latent_norm;
        let m = norm.momentum;
        let keep = T::one() - m;
        norm.running_mean = &norm.running_mean * keep + &fwd.batch_mean * m;
        norm.running_var = &norm.running_var * keep + &fwd.batch_var * m;
    }

    pub fn encode_matrix(&mut self, x: ArrayView2<T>, mode: Mode) -> Result<Array2<T>> {
        let fwd = self.forward(x, mode)?;
        self.update_running_stats(&fwd);
        Ok(fwd.dec_acts.into_iter().next().unwrap())
    }

    pub fn decode_matrix(&self, latents: ArrayView2<T>) -> Result<Array2<T>> {
        if latents.ncols() != self.latent_dim() {
            return Err(Error::ShapeMismatch {
                context: "decode",
                expected: vec![self.latent_dim()],
                actual: vec![latents.ncols()],
            });
        }
        let (mut acts, _) = self.decode_layers(latents.to_owned());
        Ok(acts.pop().unwrap())
    }

    /// `decode(encode(x))` with inference-mode normalization.
    pub fn reconstruct_matrix(&self, x: ArrayView2<T>) -> Result<Array2<T>> {
        let mut fwd = self.forward(x, Mode::Infer)?;
        Ok(fwd.dec_acts.pop().unwrap())
    }
}

impl Autoencoder<f32> {
    fn batch_view<'a>(&self, batch: &'a TensorBuffer, context: &'static str) -> Result<ArrayView2<'a, f32>> {
        if batch.row_width() != self.input_width() {
            return Err(Error::ShapeMismatch {
                context,
                expected: self.input_shape.to_vec(),
                actual: batch.shape()[1..].to_vec(),
            });
        }
        Ok(batch.as_matrix())
    }

    /// Latent codes `n × m`. Train mode standardizes with batch statistics
    /// and updates the running statistics.
    pub fn encode(&mut self, batch: &TensorBuffer, mode: Mode) -> Result<TensorBuffer> {
        let x = self.batch_view(batch, "encode")?;
        let z = self.encode_matrix(x, mode)?;
        Ok(matrix_to_tensor(z, vec![batch.rows(), self.latent_dim()]))
    }

    /// Inference-mode latents; usable on shared parameters.
    pub fn latents(&self, batch: &TensorBuffer) -> Result<TensorBuffer> {
        let x = self.batch_view(batch, "encode")?;
        let mut fwd = self.forward(x, Mode::Infer)?;
        let z = fwd.dec_acts.swap_remove(0);
        Ok(matrix_to_tensor(z, vec![batch.rows(), self.latent_dim()]))
    }

    /// Reconstructions `n × C × H × W` in `[0, 1]`.
    pub fn decode(&self, latents: &TensorBuffer) -> Result<TensorBuffer> {
        if latents.row_width() != self.latent_dim() {
            return Err(Error::ShapeMismatch {
                context: "decode",
                expected: vec![self.latent_dim()],
                actual: latents.shape()[1..].to_vec(),
            });
        }
        let out = self.decode_matrix(latents.as_matrix())?;
        Ok(matrix_to_tensor(out, self.image_batch_shape(latents.rows())))
    }

    pub fn reconstruct(&self, batch: &TensorBuffer) -> Result<TensorBuffer> {
        let x = self.batch_view(batch, "reconstruct")?;
        let out = self.reconstruct_matrix(x)?;
        Ok(matrix_to_tensor(out, self.image_batch_shape(batch.rows())))
    }

    fn image_batch_shape(&self, n: usize) -> Vec<usize> {
        let [c, h, w] = self.input_shape;
        vec![n, c, h, w]
    }
}

fn matrix_to_tensor(m: Array2<f32>, shape: Vec<usize>) -> TensorBuffer {
    let data = if m.is_standard_layout() {
        m.into_raw_vec_and_offset().0
    } else {
        m.iter().copied().collect()
    };
    TensorBuffer::from_parts(shape, data)
}

/// Per-column mean and population variance.
fn batch_moments<T: Real>(z: &Array2<T>) -> (Array1<T>, Array1<T>) {
    let n = T::of(z.nrows() as f64);
    let mean = z.sum_axis(Axis(0)) / n;
    let centered = z - &mean;
    let var = (&centered * &centered).sum_axis(Axis(0)) / n;
    (mean, var)
}

fn validate_arch(arch: &Architecture) -> Result<()> {
    if arch.input_shape.contains(&0) || arch.latent_dim == 0 || arch.hidden.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "architecture widths must be positive: {arch:?}"
        )));
    }
    Ok(())
}
