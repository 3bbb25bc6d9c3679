//! Core dataset type and its loading invariants.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance for accepting a distance matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// A dataset: a metric on n points plus the image of the base map in R^D.
///
/// `points` is optional; when present its recomputed Euclidean distances
/// need not match `distances` (the metric may be non-Euclidean, e.g. RMSD).
#[derive(Clone, Debug)]
pub struct Dataset {
    n_points: usize,
    points: Option<DMatrix<f64>>,
    distances: DMatrix<f64>,
    base_image: DMatrix<f64>,
    labels: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset, computing Euclidean distances from `points` when no
    /// matrix is given, and enforcing all metric invariants.
    pub fn new(
        points: Option<DMatrix<f64>>,
        distances: Option<DMatrix<f64>>,
        base_image: DMatrix<f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let distances = match (distances, &points) {
            (Some(d), _) => d,
            (None, Some(p)) => euclidean_distances(p),
            (None, None) => {
                return Err(Error::InvalidDataset(
                    "need points and/or a distance matrix".into(),
                ))
            }
        };
        let n = distances.nrows();
        if distances.ncols() != n {
            return Err(Error::InvalidDataset(format!(
                "distance matrix must be square, got {}x{}",
                n,
                distances.ncols()
            )));
        }
        if let Some(p) = &points {
            if p.nrows() != n {
                return Err(Error::InvalidDataset(format!(
                    "points has {} rows but the metric has {}",
                    p.nrows(),
                    n
                )));
            }
        }
        if base_image.nrows() != n {
            return Err(Error::InvalidDataset(format!(
                "base map has {} rows but the dataset has {} points",
                base_image.nrows(),
                n
            )));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "{} labels for {} points",
                    l.len(),
                    n
                )));
            }
        }
        validate_metric(&distances)?;
        Ok(Dataset {
            n_points: n,
            points,
            distances,
            base_image,
            labels,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn points(&self) -> Option<&DMatrix<f64>> {
        self.points.as_ref()
    }

    pub fn distances(&self) -> &DMatrix<f64> {
        &self.distances
    }

    pub fn base_image(&self) -> &DMatrix<f64> {
        &self.base_image
    }

    pub fn base_dim(&self) -> usize {
        self.base_image.ncols()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Same dataset with the distance matrix replaced (noise injection).
    pub fn with_distances(&self, distances: DMatrix<f64>) -> Result<Self> {
        Dataset::new(
            self.points.clone(),
            Some(distances),
            self.base_image.clone(),
            self.labels.clone(),
        )
    }

    /// Same dataset with the base map replaced (cut-unfold).
    pub fn with_base_image(&self, base_image: DMatrix<f64>) -> Result<Self> {
        Dataset::new(
            self.points.clone(),
            Some(self.distances.clone()),
            base_image,
            self.labels.clone(),
        )
    }
}

/// Symmetry within [`SYMMETRY_TOL`], zero diagonal, non-negative entries.
fn validate_metric(d: &DMatrix<f64>) -> Result<()> {
    let n = d.nrows();
    for i in 0..n {
        if d[(i, i)].abs() > 1e-12 {
            return Err(Error::InvalidDataset(format!(
                "distance matrix has non-zero diagonal entry d[{i}][{i}] = {}",
                d[(i, i)]
            )));
        }
        for j in (i + 1)..n {
            let delta = (d[(i, j)] - d[(j, i)]).abs();
            if delta > SYMMETRY_TOL {
                return Err(Error::Asymmetric { i, j, delta });
            }
            if d[(i, j)] < 0.0 || d[(j, i)] < 0.0 {
                return Err(Error::InvalidDataset(format!(
                    "negative distance d[{i}][{j}]"
                )));
            }
            if !d[(i, j)].is_finite() {
                return Err(Error::InvalidDataset(format!(
                    "non-finite distance d[{i}][{j}]"
                )));
            }
        }
    }
    Ok(())
}

/// Pairwise Euclidean distances between the rows of `points`.
pub fn euclidean_distances(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut s = 0.0;
            for c in 0..points.ncols() {
                let diff = points[(i, c)] - points[(j, c)];
                s += diff * diff;
            }
            let dist = s.sqrt();
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    d
}
