use std::path::Path;

use super::{ImageDataset, ImageShape, Split};
use crate::{Error, Result};

/// Big-endian magic of a 3-D unsigned-byte IDX file.
pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;

const HEADER_LEN: usize = 16;

pub fn load_idx(path: impl AsRef<Path>) -> Result<ImageDataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let split = if name.starts_with("train") {
        Split::Train
    } else {
        Split::Test
    };
    Ok(parse_idx(&bytes)?.with_name(name).with_split(split))
}

/// Decodes an IDX image file; each byte maps to `value / 255`.
pub fn parse_idx(bytes: &[u8]) -> Result<ImageDataset> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::IdxTruncated {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let word = |i: usize| u32::from_be_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
    let magic = word(0);
    if magic != IDX_IMAGE_MAGIC {
        return Err(Error::IdxMagic { found: magic });
    }
    let dims = [word(1), word(2), word(3)];
    let payload = (dims[0] as usize)
        .checked_mul(dims[1] as usize)
        .and_then(|v| v.checked_mul(dims[2] as usize))
        .filter(|&v| v <= isize::MAX as usize - HEADER_LEN)
        .ok_or(Error::IdxDimOverflow {
            dims: dims.to_vec(),
        })?;
    if dims[1] == 0 || dims[2] == 0 {
        return Err(Error::format("IDX", "zero image dimension"));
    }
    let body = &bytes[HEADER_LEN..];
    if body.len() < payload {
        return Err(Error::IdxTruncated {
            expected: payload,
            actual: body.len(),
        });
    }
    if body.len() > payload {
        return Err(Error::IdxTrailing {
            extra: body.len() - payload,
        });
    }
    let pixels = body.iter().map(|&b| b as f32 / 255.0).collect();
    ImageDataset::new(
        "",
        ImageShape::new(1, dims[1] as usize, dims[2] as usize),
        pixels,
    )
}

/// Encodes `n` images of `rows × cols` bytes as an IDX file.
pub fn encode_idx(pixels: &[u8], n: usize, rows: usize, cols: usize) -> Result<Vec<u8>> {
    if pixels.len() != n * rows * cols {
        return Err(Error::ShapeMismatch {
            context: "encode_idx",
            expected: vec![n, rows, cols],
            actual: vec![pixels.len()],
        });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + pixels.len());
    for v in [IDX_IMAGE_MAGIC, n as u32, rows as u32, cols as u32] {
        out.extend(v.to_be_bytes());
    }
    out.extend_from_slice(pixels);
    Ok(out)
}
