//! Image datasets: IDX and raw-f32 ingestion, synthetic noise, batching and
//! stream sources.

mod batch;
mod idx;
mod noise;
mod raw;
mod resize;
mod stream;

use std::ops::Range;
use std::path::Path;

pub use batch::{batch_iter, epoch_order, BatchIter};
pub use idx::{encode_idx, load_idx, parse_idx, IDX_IMAGE_MAGIC};
pub use noise::{gen_gaussian_noise, gen_uniform_noise, NoiseKind};
pub use raw::{load_raw_dir, write_raw_dir};
pub use resize::resize_nearest;
pub use stream::{stream_take, StreamSource};

use crate::{Error, Result, TensorBuffer};

/// Channels × height × width of one image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImageShape {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl ImageShape {
    pub const fn new(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
        }
    }

    pub fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.channels, self.height, self.width]
    }

    pub fn from_array(a: [usize; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Split {
    Train,
    #[default]
    Test,
}

/// Equally shaped images with intensities in `[0, 1]`, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageDataset {
    name: String,
    split: Split,
    shape: ImageShape,
    pixels: Vec<f32>,
}

impl ImageDataset {
    pub fn new(name: impl Into<String>, shape: ImageShape, pixels: Vec<f32>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::InvalidArgument(format!("empty image shape {shape:?}")));
        }
        if !pixels.len().is_multiple_of(shape.len()) {
            return Err(Error::ShapeMismatch {
                context: "dataset construction",
                expected: shape.as_array().to_vec(),
                actual: vec![pixels.len()],
            });
        }
        if let Some(&value) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::PixelRange { value });
        }
        Ok(Self {
            name: name.into(),
            split: Split::default(),
            shape,
            pixels,
        })
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn shape(&self) -> ImageShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.pixels.len() / self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn image(&self, i: usize) -> &[f32] {
        let w = self.shape.len();
        &self.pixels[i * w..(i + 1) * w]
    }

    /// Images `range` as an `n × C × H × W` tensor.
    pub fn batch(&self, range: Range<usize>) -> TensorBuffer {
        let w = self.shape.len();
        let n = range.len();
        let data = self.pixels[range.start * w..range.end * w].to_vec();
        let [c, h, wd] = self.shape.as_array();
        TensorBuffer::from_parts(vec![n, c, h, wd], data)
    }

    pub fn subset(&self, range: Range<usize>) -> Self {
        let w = self.shape.len();
        Self {
            name: self.name.clone(),
            split: self.split,
            shape: self.shape,
            pixels: self.pixels[range.start * w..range.end * w].to_vec(),
        }
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        let mut pixels = Vec::with_capacity(indices.len() * self.shape.len());
        for &i in indices {
            pixels.extend_from_slice(self.image(i));
        }
        Self {
            pixels,
            ..self.clone_empty()
        }
    }

    fn clone_empty(&self) -> Self {
        Self {
            name: self.name.clone(),
            split: self.split,
            shape: self.shape,
            pixels: Vec::new(),
        }
    }

    /// Splits off the last `fraction` of the images: `(head, tail)`.
    pub fn split_tail(&self, fraction: f64) -> Result<(Self, Self)> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::InvalidArgument(format!(
                "holdout fraction {fraction} outside [0, 1]"
            )));
        }
        let tail = (self.len() as f64 * fraction).round() as usize;
        let cut = self.len() - tail;
        Ok((self.subset(0..cut), self.subset(cut..self.len())))
    }
}

/// Loads a dataset from an IDX file or a raw-f32 directory.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<ImageDataset> {
    let path = path.as_ref();
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ds = if path.is_dir() {
        load_raw_dir(path)?
    } else {
        load_idx(path)?
    };
    Ok(ds.with_name(name))
}
