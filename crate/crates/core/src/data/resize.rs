use super::{ImageDataset, ImageShape};
use crate::{Error, Result};

/// Nearest-neighbour resize to `target`. A 1-channel target averages the
/// source channels; a 1-channel source is replicated across target channels.
pub fn resize_nearest(ds: &ImageDataset, target: ImageShape) -> Result<ImageDataset> {
    let src = ds.shape();
    if target.is_empty() {
        return Err(Error::InvalidArgument(format!("empty target shape {target:?}")));
    }
    if src == target {
        return Ok(ds.clone());
    }
    if src.channels != target.channels && src.channels != 1 && target.channels != 1 {
        return Err(Error::ShapeMismatch {
            context: "channel conversion",
            expected: vec![target.channels],
            actual: vec![src.channels],
        });
    }
    let plane = src.height * src.width;
    let rows: Vec<usize> = (0..target.height).map(|y| y * src.height / target.height).collect();
    let cols: Vec<usize> = (0..target.width).map(|x| x * src.width / target.width).collect();
    let mut out = Vec::with_capacity(ds.len() * target.len());
    for i in 0..ds.len() {
        let img = ds.image(i);
        for c in 0..target.channels {
            for &sy in &rows {
                for &sx in &cols {
                    let at = sy * src.width + sx;
                    let v = if target.channels == 1 && src.channels > 1 {
                        (0..src.channels).map(|k| img[k * plane + at]).sum::<f32>() / src.channels as f32
                    } else {
                        let sc = if src.channels == 1 { 0 } else { c };
                        img[sc * plane + at]
                    };
                    out.push(v.clamp(0.0, 1.0));
                }
            }
        }
    }
    Ok(ImageDataset::new(ds.name(), target, out)?.with_split(ds.split()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upsample_repeats_pixels() {
        let ds = ImageDataset::new("x", ImageShape::new(1, 2, 2), vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        let up = resize_nearest(&ds, ImageShape::new(1, 4, 4)).unwrap();
        assert_eq!(&up.image(0)[..4], &[0.0, 0.0, 0.25, 0.25]);
        assert_eq!(&up.image(0)[12..], &[0.5, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn rgb_to_gray_averages() {
        let ds = ImageDataset::new("x", ImageShape::new(3, 1, 1), vec![0.3, 0.6, 0.9]).unwrap();
        let g = resize_nearest(&ds, ImageShape::new(1, 1, 1)).unwrap();
        assert!((g.image(0)[0] - 0.6).abs() < 1e-6);
        let back = resize_nearest(&g, ImageShape::new(3, 2, 2)).unwrap();
        assert_eq!(back.image(0).len(), 12);
        assert!(back.image(0).iter().all(|&v| (v - 0.6).abs() < 1e-6));
    }

    #[test]
    fn incompatible_channels() {
        let ds = ImageDataset::new("x", ImageShape::new(2, 1, 1), vec![0.3, 0.6]).unwrap();
        assert!(resize_nearest(&ds, ImageShape::new(3, 1, 1)).is_err());
    }
}
