use rand::Rng;

use crate::scalar::Scalar;

/// Row-major dense matrix; one row per word or document.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Entries uniform in `[-0.5/cols, 0.5/cols)`, the usual word2vec start.
    pub fn uniform_init<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let half_width = 0.5 / cols.max(1) as f64;
        let data = (0..rows * cols)
            .map(|_| T::c((rng.random::<f64>() * 2.0 - 1.0) * half_width))
            .collect();
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// `self += other - base`, elementwise.
    pub(crate) fn add_delta(&mut self, other: &Self, base: &Self) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for ((s, &o), &b) in self.data.iter_mut().zip(&other.data).zip(&base.data) {
            *s += o - b;
        }
    }
}
