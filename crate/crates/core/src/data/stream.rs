use super::{epoch_order, ImageDataset, ImageShape, NoiseKind};
use crate::{Error, Result};

enum Source {
    Dataset { data: ImageDataset, order: Vec<usize> },
    Noise { kind: NoiseKind, shape: ImageShape },
}

/// Single-consumer sample source. Dataset sources are finite and optionally
/// shuffled; noise sources are unbounded.
pub struct StreamSource {
    source: Source,
    cursor: usize,
    seed: u64,
}

impl StreamSource {
    /// Yields the dataset in file order, or in a seeded permutation.
    pub fn from_dataset(data: ImageDataset, shuffle_seed: Option<u64>) -> Self {
        let order = match shuffle_seed {
            Some(seed) => epoch_order(data.len(), seed, 0),
            None => (0..data.len()).collect(),
        };
        Self {
            source: Source::Dataset { data, order },
            cursor: 0,
            seed: shuffle_seed.unwrap_or(0),
        }
    }

    pub fn from_noise(kind: NoiseKind, shape: ImageShape, seed: u64) -> Result<Self> {
        kind.validate()?;
        Ok(Self {
            source: Source::Noise { kind, shape },
            cursor: 0,
            seed,
        })
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn shape(&self) -> ImageShape {
        match &self.source {
            Source::Dataset { data, .. } => data.shape(),
            Source::Noise { shape, .. } => *shape,
        }
    }

    /// Samples left, `None` for unbounded sources.
    pub fn remaining(&self) -> Option<usize> {
        match &self.source {
            Source::Dataset { order, .. } => Some(order.len() - self.cursor),
            Source::Noise { .. } => None,
        }
    }

    pub fn take(&mut self, n: usize) -> Result<ImageDataset> {
        if n == 0 {
            return Err(Error::InvalidArgument("stream_take needs n >= 1".into()));
        }
        let out = match &self.source {
            Source::Dataset { data, order } => {
                let remaining = order.len() - self.cursor;
                if n > remaining {
                    return Err(Error::StreamExhausted {
                        requested: n,
                        remaining,
                    });
                }
                data.select(&order[self.cursor..self.cursor + n])
            }
            Source::Noise { kind, shape } => {
                let mut pixels = vec![0.0f32; n * shape.len()];
                for (k, img) in pixels.chunks_mut(shape.len()).enumerate() {
                    kind.fill_image(self.seed, (self.cursor + k) as u64, img);
                }
                ImageDataset::new(kind.label(), *shape, pixels)?
            }
        };
        self.cursor += n;
        Ok(out)
    }
}

pub fn stream_take(source: &mut StreamSource, n: usize) -> Result<ImageDataset> {
    source.take(n)
}
