use rand::seq::SliceRandom;

use super::ImageDataset;
use crate::rng::stream_rng;
use crate::TensorBuffer;

/// Seeded permutation of `0..n` for epoch `epoch`.
pub fn epoch_order(n: usize, seed: u64, epoch: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream_rng(seed, epoch.wrapping_add(1)));
    order
}

/// One shuffled pass over a dataset in `batch_size` chunks; the final batch
/// may be short.
pub struct BatchIter<'a> {
    dataset: &'a ImageDataset,
    order: Vec<usize>,
    batch_size: usize,
    pos: usize,
}

pub fn batch_iter(dataset: &ImageDataset, batch_size: usize, shuffle_seed: u64) -> BatchIter<'_> {
    assert!(batch_size >= 1, "batch_size must be at least 1");
    BatchIter {
        dataset,
        order: epoch_order(dataset.len(), shuffle_seed, 0),
        batch_size,
        pos: 0,
    }
}

impl Iterator for BatchIter<'_> {
    type Item = TensorBuffer;

    fn next(&mut self) -> Option<TensorBuffer> {
        if self.pos >= self.order.len() {
            return None;
        }
        let end = (self.pos + self.batch_size).min(self.order.len());
        let idx = &self.order[self.pos..end];
        self.pos = end;
        let shape = self.dataset.shape();
        let mut data = Vec::with_capacity(idx.len() * shape.len());
        for &i in idx {
            data.extend_from_slice(self.dataset.image(i));
        }
        Some(TensorBuffer::from_parts(
            vec![idx.len(), shape.channels, shape.height, shape.width],
            data,
        ))
    }
}
