//! Little-endian model file.
//!
//! ```text
//! magic            b"DDLR"
//! version          u32 (= 1)
//! input shape      u32 × 3 (C, H, W)
//! layer count      u32 (encoder + decoder)
//! encoder layers   u32
//! per layer        rows u32, cols u32, activation u8,
//!                  weights f32 × rows·cols (row-major), biases f32 × cols
//! latent dim       u32
//! momentum, eps    f32, f32
//! running mean     f32 × latent dim
//! running var      f32 × latent dim
//! ```

use std::path::Path;

use ndarray::{Array1, Array2};

use super::model::{Activation, Autoencoder, Dense, LatentNorm};
use crate::{Error, Result};

pub const MODEL_MAGIC: [u8; 4] = *b"DDLR";
pub const FORMAT_VERSION: u32 = 1;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::format("model file", "unexpected end of file")),
        }
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn dim(&mut self) -> Result<usize> {
        let v = self.u32()? as usize;
        if v == 0 {
            return Err(Error::format("model file", "zero dimension"));
        }
        Ok(v)
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let bytes = self.take(n.checked_mul(4).ok_or_else(|| Error::format("model file", "size overflow"))?)?;
        let out: Vec<f32> = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::format("model file", "non-finite parameter"));
        }
        Ok(out)
    }
}

impl Autoencoder<f32> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.param_count() * 4 + 256);
        let put_u32 = |out: &mut Vec<u8>, v: usize| out.extend((v as u32).to_le_bytes());
        let put_f32s = |out: &mut Vec<u8>, vs: &mut dyn Iterator<Item = &f32>| {
            for v in vs {
                out.extend(v.to_le_bytes());
            }
        };
        out.extend(MODEL_MAGIC);
        out.extend(FORMAT_VERSION.to_le_bytes());
        for d in self.input_shape {
            put_u32(&mut out, d);
        }
        put_u32(&mut out, self.encoder.len() + self.decoder.len());
        put_u32(&mut out, self.encoder.len());
        for layer in self.encoder.iter().chain(&self.decoder) {
            put_u32(&mut out, layer.inputs());
            put_u32(&mut out, layer.outputs());
            out.push(layer.activation.tag());
            put_f32s(&mut out, &mut layer.weights.iter());
            put_f32s(&mut out, &mut layer.bias.iter());
        }
        let norm = &self.latent_norm;
        put_u32(&mut out, self.latent_dim());
        out.extend(norm.momentum.to_le_bytes());
        out.extend(norm.eps.to_le_bytes());
        put_f32s(&mut out, &mut norm.running_mean.iter());
        put_f32s(&mut out, &mut norm.running_var.iter());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let magic: [u8; 4] = r.take(4).map_err(|_| Error::ModelMagic { found: [0; 4] })?.try_into().unwrap();
        if magic != MODEL_MAGIC {
            return Err(Error::ModelMagic { found: magic });
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::ModelVersion(version));
        }
        let input_shape = [r.dim()?, r.dim()?, r.dim()?];
        let layers = r.u32()? as usize;
        let enc_count = r.u32()? as usize;
        if enc_count == 0 || enc_count >= layers {
            return Err(Error::format("model file", "bad encoder/decoder split"));
        }
        let mut all = Vec::with_capacity(layers);
        for _ in 0..layers {
            let rows = r.dim()?;
            let cols = r.dim()?;
            let activation = Activation::from_tag(r.u8()?)
                .ok_or_else(|| Error::format("model file", "unknown activation tag"))?;
            let count = rows
                .checked_mul(cols)
                .ok_or_else(|| Error::format("model file", "layer size overflow"))?;
            let weights = Array2::from_shape_vec((rows, cols), r.f32s(count)?).expect("length checked");
            let bias = Array1::from(r.f32s(cols)?);
            all.push(Dense {
                weights,
                bias,
                activation,
            });
        }
        let dim = r.dim()?;
        let momentum = r.f32()?;
        let eps = r.f32()?;
        let running_mean = Array1::from(r.f32s(dim)?);
        let running_var = Array1::from(r.f32s(dim)?);
        if r.pos != bytes.len() {
            return Err(Error::format("model file", "trailing bytes"));
        }
        let decoder = all.split_off(enc_count);
        Autoencoder::from_parts(
            input_shape,
            all,
            decoder,
            LatentNorm {
                running_mean,
                running_var,
                momentum,
                eps,
            },
        )
        .map_err(|e| Error::format("model file", e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::io::write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
