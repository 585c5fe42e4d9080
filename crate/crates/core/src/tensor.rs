use ndarray::{ArrayView2, ArrayViewMut2};

use crate::{Error, Result};

/// Row-major `f32` buffer with an explicit shape.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorBuffer {
    shape: Vec<usize>,
    data: Vec<f32>,
}

impl TensorBuffer {
    pub fn new(shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "tensor dimensions must be positive, got {shape:?}"
            )));
        }
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::ShapeMismatch {
                context: "tensor construction",
                expected: vec![expected],
                actual: vec![data.len()],
            });
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite tensor entry {v}")));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let n = shape.iter().product();
        Self::new(shape, vec![0.0; n])
    }

    /// Internal constructor for buffers whose shape is known to be right.
    pub(crate) fn from_parts(shape: Vec<usize>, data: Vec<f32>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        Self { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Leading dimension (batch size).
    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    /// Product of all trailing dimensions.
    pub fn row_width(&self) -> usize {
        self.shape[1..].iter().product()
    }

    pub fn as_matrix(&self) -> ArrayView2<'_, f32> {
        ArrayView2::from_shape((self.rows(), self.row_width()), &self.data)
            .expect("shape invariant")
    }

    pub fn as_matrix_mut(&mut self) -> ArrayViewMut2<'_, f32> {
        let dims = (self.rows(), self.row_width());
        ArrayViewMut2::from_shape(dims, &mut self.data).expect("shape invariant")
    }

    pub fn row(&self, i: usize) -> &[f32] {
        let w = self.row_width();
        &self.data[i * w..(i + 1) * w]
    }
}
