//! Loading and writing of the files the commands exchange.

use std::path::Path;

use doodler_core::data::{load_dataset, ImageDataset, ImageShape};
use doodler_core::io::{write_atomic, GrayImage};
use doodler_core::nn::Autoencoder;
use doodler_core::stats::FittedStats;
use doodler_core::Error;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Context};

/// First 16 hex digits of the SHA-256 of the model file bytes.
pub fn model_id(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub struct LoadedModel {
    pub model: Autoencoder,
    pub id: String,
}

pub fn load_model(path: &str) -> Result<LoadedModel, CliError> {
    let bytes = std::fs::read(path)
        .map_err(Error::from)
        .context(|| format!("reading model {path}"))?;
    let model = Autoencoder::from_bytes(&bytes).context(|| format!("loading model {path}"))?;
    Ok(LoadedModel {
        model,
        id: model_id(&bytes),
    })
}

pub fn load_data(path: &str) -> Result<ImageDataset, CliError> {
    load_dataset(path).context(|| format!("loading dataset {path}"))
}

/// Loads statistics and checks they were fitted for `model`.
pub fn load_stats(path: &str, model: &LoadedModel) -> Result<FittedStats, CliError> {
    let stats = FittedStats::load(path).context(|| format!("loading statistics {path}"))?;
    if !stats.model_id.is_empty() && stats.model_id != model.id {
        return Err(CliError::Context {
            context: format!("statistics {path}"),
            source: Error::format(
                "statistics",
                format!("fitted for model {}, but the loaded model is {}", stats.model_id, model.id),
            ),
        });
    }
    Ok(stats)
}

/// A single image from a P5 PGM file, or image `index` of a dataset.
pub fn load_image(path: &str, index: usize) -> Result<ImageDataset, CliError> {
    if Path::new(path).extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        let bytes = std::fs::read(path)
            .map_err(Error::from)
            .context(|| format!("reading image {path}"))?;
        let img = GrayImage::from_pgm(&bytes).context(|| format!("decoding {path}"))?;
        let pixels = img.pixels.iter().map(|&p| p as f32 / 255.0).collect();
        return ImageDataset::new(path, ImageShape::new(1, img.height, img.width), pixels)
            .map_err(CliError::from);
    }
    let ds = load_data(path)?;
    if index >= ds.len() {
        return Err(CliError::Usage(format!(
            "index {index} out of range for {path} with {} images",
            ds.len()
        )));
    }
    Ok(ds.subset(index..index + 1))
}

pub fn write_file(path: &str, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = Path::new(path).parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(Error::from)
            .context(|| format!("creating {}", dir.display()))?;
    }
    write_atomic(path, bytes).context(|| format!("writing {path}"))
}

pub fn encode_png(img: &GrayImage) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    let fail = |e: png::EncodingError| CliError::from(Error::format("PNG", e.to_string()));
    {
        let mut enc = png::Encoder::new(&mut out, img.width as u32, img.height as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(fail)?;
        writer.write_image_data(&img.pixels).map_err(fail)?;
    }
    Ok(out)
}
