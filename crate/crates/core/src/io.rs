//! File output helpers: atomic writes and 8-bit PGM images.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

/// Writes `bytes` to `path` through a sibling temporary file and a rename,
/// so readers never observe a partially written file.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// A single-channel 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::ShapeMismatch {
                context: "gray image",
                expected: vec![height, width],
                actual: vec![pixels.len()],
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Quantizes values in `[0, 1]` with round-half-up: `floor(255 v + 0.5)`.
    pub fn from_unit(width: usize, height: usize, values: &[f64]) -> Result<Self> {
        let pixels = values.iter().map(|&v| quantize_unit(v)).collect();
        Self::new(width, height, pixels)
    }

    /// Binary PGM (`P5`, maxval 255) encoding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn from_pgm(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let magic = pgm_token(bytes, &mut pos)?;
        if magic != "P5" {
            return Err(Error::format("PGM", format!("unsupported magic {magic:?}")));
        }
        let width = pgm_number(bytes, &mut pos)?;
        let height = pgm_number(bytes, &mut pos)?;
        let maxval = pgm_number(bytes, &mut pos)?;
        if maxval == 0 || maxval > 255 {
            return Err(Error::format("PGM", format!("unsupported maxval {maxval}")));
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let raster = bytes
            .get(pos..pos + width * height)
            .ok_or_else(|| Error::format("PGM", "raster shorter than header dimensions"))?;
        let pixels = if maxval == 255 {
            raster.to_vec()
        } else {
            raster
                .iter()
                .map(|&p| ((p as usize * 255 + maxval / 2) / maxval) as u8)
                .collect()
        };
        Self::new(width, height, pixels)
    }
}

pub fn quantize_unit(v: f64) -> u8 {
    (255.0 * v.clamp(0.0, 1.0) + 0.5).floor() as u8
}

fn pgm_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::format("PGM", "truncated header"));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn pgm_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    let tok = pgm_token(bytes, pos)?;
    tok.parse()
        .map_err(|_| Error::format("PGM", format!("bad header field {tok:?}")))
}
