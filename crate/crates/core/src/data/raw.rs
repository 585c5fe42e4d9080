//! Raw dataset directory: a `meta` text file holding `n C H W` and a
//! `data.f32` blob of `n·C·H·W` little-endian `f32` values in `[0, 1]`.

use std::path::Path;

use super::{ImageDataset, ImageShape};
use crate::{Error, Result};

const META: &str = "meta";
const BLOB: &str = "data.f32";

pub fn load_raw_dir(dir: impl AsRef<Path>) -> Result<ImageDataset> {
    let dir = dir.as_ref();
    let meta = std::fs::read_to_string(dir.join(META))?;
    let dims: Vec<usize> = meta
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::format("raw meta", e.to_string()))?;
    let [n, c, h, w] = dims[..] else {
        return Err(Error::format("raw meta", format!("expected 4 integers, got {}", dims.len())));
    };
    let shape = ImageShape::new(c, h, w);
    let blob = std::fs::read(dir.join(BLOB))?;
    let expected = n * shape.len() * 4;
    if blob.len() != expected {
        return Err(Error::format(
            "raw blob",
            format!("expected {expected} bytes, found {}", blob.len()),
        ));
    }
    let pixels = blob
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    ImageDataset::new(name, shape, pixels)
}

pub fn write_raw_dir(dataset: &ImageDataset, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let s = dataset.shape();
    let meta = format!("{} {} {} {}\n", dataset.len(), s.channels, s.height, s.width);
    let mut blob = Vec::with_capacity(dataset.pixels().len() * 4);
    for v in dataset.pixels() {
        blob.extend(v.to_le_bytes());
    }
    crate::io::write_atomic(dir.join(BLOB), &blob)?;
    crate::io::write_atomic(dir.join(META), meta.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let tmp = tempfile::tempdir().unwrap();
        let ds = ImageDataset::new("rgb", ImageShape::new(3, 2, 2), (0..24).map(|v| v as f32 / 24.0).collect()).unwrap();
        write_raw_dir(&ds, tmp.path()).unwrap();
        let back = load_raw_dir(tmp.path()).unwrap();
        assert_eq!(back.pixels(), ds.pixels());
        assert_eq!(back.shape(), ds.shape());
    }

    #[test]
    fn rejects_bad_meta_and_blob() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(tmp.path().join(META), "2 1 2").unwrap();
        std::fs::write(tmp.path().join(BLOB), [0u8; 32]).unwrap();
        assert!(load_raw_dir(tmp.path()).is_err());
        std::fs::write(tmp.path().join(META), "2 1 2 2").unwrap();
        std::fs::write(tmp.path().join(BLOB), [0u8; 31]).unwrap();
        assert!(load_raw_dir(tmp.path()).is_err());
    }
}
