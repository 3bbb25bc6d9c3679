//! Orthonormal frames and orthogonal matrices.
//!
//! A [`Frame`] is an element of the Stiefel manifold V(cols, rows): a
//! rows×cols real matrix with orthonormal columns. An [`OrthogonalMatrix`]
//! is the square case with its determinant sign cached.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance on `‖FᵀF − I‖_max` for accepting a matrix as a frame.
pub const FRAME_TOL: f64 = 1e-9;

/// Max-norm deviation of the column Gram matrix from the identity.
pub fn gram_deviation(entries: &DMatrix<f64>) -> f64 {
    let gram = entries.transpose() * entries;
    let mut dev = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev
}

/// A matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    entries: DMatrix<f64>,
}

impl Frame {
    /// Validates orthonormality; rejects matrices whose column Gram
    /// deviates from the identity by more than [`FRAME_TOL`].
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let deviation = gram_deviation(&entries);
        if deviation > FRAME_TOL {
            return Err(Error::NotAFrame { deviation });
        }
        Ok(Frame { entries })
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    /// Determinant of a square frame, which is ±1 up to rounding.
    pub fn det(&self) -> f64 {
        debug_assert_eq!(self.rows(), self.cols());
        self.entries.determinant()
    }
}

/// An element of O(n) with its determinant sign cached.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix {
    entries: DMatrix<f64>,
    det_sign: i8,
}

impl OrthogonalMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::InvalidArgument(format!(
                "orthogonal matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let deviation = gram_deviation(&entries);
        if deviation > FRAME_TOL {
            return Err(Error::NotAFrame { deviation });
        }
        let det_sign = if entries.determinant() < 0.0 { -1 } else { 1 };
        Ok(OrthogonalMatrix { entries, det_sign })
    }

    pub fn identity(size: usize) -> Self {
        OrthogonalMatrix {
            entries: DMatrix::identity(size, size),
            det_sign: 1,
        }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn det_sign(&self) -> i8 {
        self.det_sign
    }

    /// The inverse, i.e. the transpose.
    pub fn transposed(&self) -> Self {
        OrthogonalMatrix {
            entries: self.entries.transpose(),
            det_sign: self.det_sign,
        }
    }
}
