//! Orthogonal-matrix and Stiefel-manifold primitives.
//!
//! These back cocycle estimation (orthogonal Procrustes), the alignment
//! iteration (polar projection onto the Stiefel manifold), and random
//! frame initialization.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::frame::{Frame, OrthogonalMatrix};

/// Result of an orthogonal Procrustes fit.
#[derive(Clone, Debug)]
pub struct ProcrustesFit {
    pub omega: OrthogonalMatrix,
    /// Smallest singular value of the cross-covariance.
    pub smallest_singular: f64,
    /// Set when the solution is non-unique (smallest singular value < 1e-12).
    pub non_unique: bool,
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Solves `min_Ω Σ_x ‖Ω·source(x) − target(x)‖²` over the full orthogonal
/// group, one row per observation.
///
/// The minimizer is `U·Vᵀ` where `U·S·Vᵀ` is the SVD of the cross-covariance
/// `Σ_x target(x)·source(x)ᵀ`. Reflections are allowed: the cocycles must be
/// able to represent non-orientable bundles.
pub fn procrustes_fit(source: &DMatrix<f64>, target: &DMatrix<f64>) -> Result<ProcrustesFit> {
    if source.nrows() == 0 || source.shape() != target.shape() {
        return Err(Error::InvalidArgument(format!(
            "procrustes_fit needs equal-shape non-empty row sets, got {:?} and {:?}",
            source.shape(),
            target.shape()
        )));
    }
    let cross = target.transpose() * source;
    let svd = SVD::new(cross, true, true);
    let u = svd.u.expect("svd with u requested");
    let v_t = svd.v_t.expect("svd with v_t requested");
    let smallest_singular = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let omega = OrthogonalMatrix::new(u * v_t)?;
    Ok(ProcrustesFit {
        omega,
        smallest_singular,
        non_unique: smallest_singular < 1e-12,
    })
}

/// The Frobenius-nearest orthonormal frame to `m` (rows ≥ cols): the polar
/// factor `U·Vᵀ` of the thin SVD.
pub fn nearest_frame(m: &DMatrix<f64>) -> Result<Frame> {
    if m.nrows() < m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "nearest_frame needs rows >= cols, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if max_abs(m) == 0.0 {
        return Err(Error::DegenerateFrameProjection);
    }
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("svd with u requested");
    let v_t = svd.v_t.expect("svd with v_t requested");
    Frame::new(u * v_t)
}

/// The nearest special-orthogonal matrix to a square `m`: the polar factor
/// with the column of smallest singular value flipped when the plain polar
/// factor has negative determinant.
pub fn nearest_rotation(m: &DMatrix<f64>) -> Result<OrthogonalMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "nearest_rotation needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if max_abs(m) == 0.0 {
        return Err(Error::DegenerateFrameProjection);
    }
    let svd = SVD::new(m.clone(), true, true);
    let mut u = svd.u.expect("svd with u requested");
    let v_t = svd.v_t.expect("svd with v_t requested");
    if (&u * &v_t).determinant() < 0.0 {
        // Singular values are sorted descending, so the last column is the
        // cheapest one to flip.
        let last = u.ncols() - 1;
        for i in 0..u.nrows() {
            u[(i, last)] = -u[(i, last)];
        }
    }
    OrthogonalMatrix::new(u * v_t)
}

/// A random frame obtained by orthonormalizing a matrix of independent
/// standard normals (QR with the R-diagonal sign fix, so the distribution is
/// rotation-invariant). With `special` set and rows = cols, the determinant
/// is forced to +1 by negating the last column if needed.
pub fn random_frame<R: Rng>(rows: usize, cols: usize, special: bool, rng: &mut R) -> Result<Frame> {
    if rows < cols || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "random_frame needs rows >= cols >= 1, got {rows}x{cols}"
        )));
    }
    let gauss = DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gauss.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            for i in 0..rows {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if special && rows == cols && q.determinant() < 0.0 {
        let last = cols - 1;
        for i in 0..rows {
            q[(i, last)] = -q[(i, last)];
        }
    }
    Frame::new(q)
}

/// Symmetric eigendecomposition with eigenpairs sorted by descending
/// eigenvalue and a deterministic sign convention per eigenvector.
pub(crate) fn sym_eigen_desc(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(m.nrows(), n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let flip = col
            .iter()
            .find(|v| v.abs() > 1e-12)
            .map(|v| *v < 0.0)
            .unwrap_or(false);
        for i in 0..m.nrows() {
            vectors[(i, dst)] = if flip { -col[i] } else { col[i] };
        }
    }
    (values, vectors)
}

/// Largest singular value, used as the operator norm on small matrices.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::rng::{SeedSplitter, Stream};

    fn rows(data: &[&[f64]]) -> DMatrix<f64> {
        let r = data.len();
        let c = data[0].len();
        DMatrix::from_fn(r, c, |i, j| data[i][j])
    }

    /// Dense-grid search over rotations and reflections of the plane,
    /// independent of the SVD route.
    fn grid_procrustes_2d(source: &DMatrix<f64>, target: &DMatrix<f64>, steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        for reflect in [false, true] {
            for s in 0..steps {
                let theta = 2.0 * std::f64::consts::PI * (s as f64) / (steps as f64);
                let (c, n) = (theta.cos(), theta.sin());
                let m = if reflect {
                    rows(&[&[c, n], &[n, -c]])
                } else {
                    rows(&[&[c, -n], &[n, c]])
                };
                let obj = procrustes_objective(&m, source, target);
                best = best.min(obj);
            }
        }
        best
    }

    fn procrustes_objective(m: &DMatrix<f64>, source: &DMatrix<f64>, target: &DMatrix<f64>) -> f64 {
        let mapped = source * m.transpose();
        (mapped - target).iter().map(|v| v * v).sum()
    }

    #[test]
    fn identity_when_source_equals_target() {
        let s = rows(&[&[1.0, 2.0], &[-0.5, 0.25], &[3.0, -1.0]]);
        let fit = procrustes_fit(&s, &s).unwrap();
        assert_abs_diff_eq!(
            fit.omega.entries().clone(),
            DMatrix::identity(2, 2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn quarter_turn_recovered() {
        // e1 -> e2, e2 -> -e1 is the rotation [[0,-1],[1,0]].
        let source = rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let target = rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let fit = procrustes_fit(&source, &target).unwrap();
        let expected = rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert_abs_diff_eq!(fit.omega.entries().clone(), expected, epsilon = 1e-12);
        // Oracle: the grid search cannot beat the closed form.
        let grid = grid_procrustes_2d(&source, &target, 360 * 16);
        let closed = procrustes_objective(fit.omega.entries(), &source, &target);
        assert!(closed <= grid + 1e-9);
        assert_abs_diff_eq!(closed, 0.0, epsilon = 1e-18);
    }

    #[test]
    fn reflection_recovered() {
        let source = rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let target = rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let fit = procrustes_fit(&source, &target).unwrap();
        let expected = rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert_abs_diff_eq!(fit.omega.entries().clone(), expected, epsilon = 1e-12);
        assert_eq!(fit.omega.det_sign(), -1);
        let grid = grid_procrustes_2d(&source, &target, 360 * 16);
        let closed = procrustes_objective(fit.omega.entries(), &source, &target);
        assert!(closed <= grid + 1e-9);
    }

    #[test]
    fn rank_deficient_still_orthogonal() {
        let source = rows(&[&[1.0, 0.0], &[2.0, 0.0]]);
        let target = rows(&[&[0.0, 1.0], &[0.0, 2.0]]);
        let fit = procrustes_fit(&source, &target).unwrap();
        assert!(fit.non_unique);
        assert!(crate::frame::gram_deviation(fit.omega.entries()) <= 1e-9);
    }

    #[test]
    fn nearest_frame_fixes_frames() {
        let f = rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let out = nearest_frame(&f).unwrap();
        assert_abs_diff_eq!(out.entries().clone(), f, epsilon = 1e-12);
    }

    #[test]
    fn nearest_frame_of_diagonal() {
        let m = rows(&[&[2.0, 0.0], &[0.0, 0.5]]);
        let out = nearest_frame(&m).unwrap();
        assert_abs_diff_eq!(out.entries().clone(), DMatrix::identity(2, 2), epsilon = 1e-12);
    }

    #[test]
    fn nearest_frame_antidiagonal_oracle() {
        // Brute-force over parametrized 2x2 orthogonal matrices.
        let m = rows(&[&[0.0, 2.0], &[1.0, 0.0]]);
        let out = nearest_frame(&m).unwrap();
        let expected = rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_abs_diff_eq!(out.entries().clone(), expected, epsilon = 1e-12);
        let dist = |f: &DMatrix<f64>| (f - &m).iter().map(|v| v * v).sum::<f64>();
        let mut best = f64::INFINITY;
        for reflect in [false, true] {
            for s in 0..(360 * 32) {
                let theta = 2.0 * std::f64::consts::PI * (s as f64) / ((360 * 32) as f64);
                let (c, n) = (theta.cos(), theta.sin());
                let cand = if reflect {
                    rows(&[&[c, n], &[n, -c]])
                } else {
                    rows(&[&[c, -n], &[n, c]])
                };
                best = best.min(dist(&cand));
            }
        }
        assert!(dist(out.entries()) <= best + 1e-9);
    }

    #[test]
    fn nearest_frame_zero_is_degenerate() {
        let m = DMatrix::zeros(3, 2);
        assert!(matches!(
            nearest_frame(&m),
            Err(Error::DegenerateFrameProjection)
        ));
    }

    #[test]
    fn nearest_frame_is_a_projection() {
        let mut rng = SeedSplitter::new(11).stream(Stream::Alignment);
        for _ in 0..20 {
            let m = DMatrix::from_fn(5, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
            let once = nearest_frame(&m).unwrap();
            let twice = nearest_frame(once.entries()).unwrap();
            assert_abs_diff_eq!(
                once.entries().clone(),
                twice.entries().clone(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn procrustes_equivariance() {
        let mut rng = SeedSplitter::new(3).stream(Stream::Alignment);
        for _ in 0..10 {
            let source = DMatrix::from_fn(6, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
            let target = DMatrix::from_fn(6, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
            let r1 = random_frame(3, 3, false, &mut rng).unwrap();
            let r2 = random_frame(3, 3, false, &mut rng).unwrap();
            let base = procrustes_fit(&source, &target).unwrap();
            let fit = procrustes_fit(
                &(&source * r1.entries().transpose()),
                &(&target * r2.entries().transpose()),
            )
            .unwrap();
            let expected = r2.entries() * base.omega.entries() * r1.entries().transpose();
            assert_abs_diff_eq!(fit.omega.entries().clone(), expected, epsilon = 1e-8);
        }
    }

    #[test]
    fn special_random_frame_has_positive_det() {
        let mut rng = SeedSplitter::new(5).stream(Stream::Alignment);
        for _ in 0..50 {
            let f = random_frame(2, 2, true, &mut rng).unwrap();
            assert!(f.det() > 0.0);
        }
    }

    #[test]
    fn random_unit_vector() {
        let mut rng = SeedSplitter::new(6).stream(Stream::Alignment);
        let f = random_frame(3, 1, false, &mut rng).unwrap();
        let norm: f64 = f.entries().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn random_frame_entry_means_vanish() {
        // Monte-Carlo check of rotational symmetry.
        let mut rng = SeedSplitter::new(8).stream(Stream::Alignment);
        let mut sums = DMatrix::zeros(3, 2);
        let draws = 10_000;
        for _ in 0..draws {
            sums += random_frame(3, 2, false, &mut rng).unwrap().entries();
        }
        for v in (sums / draws as f64).iter() {
            assert!(v.abs() < 0.05, "entry mean {v} too large");
        }
    }

    #[test]
    fn nearest_rotation_never_reflects() {
        let mut rng = SeedSplitter::new(9).stream(Stream::Alignment);
        for _ in 0..30 {
            let m = DMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
            let r = nearest_rotation(&m).unwrap();
            assert_eq!(r.det_sign(), 1);
        }
    }

    #[test]
    fn operator_norm_of_diag() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -5.0]);
        assert_abs_diff_eq!(operator_norm(&m), 5.0, epsilon = 1e-12);
    }
}
