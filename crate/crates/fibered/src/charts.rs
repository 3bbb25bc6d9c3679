//! Per-cover-set chart construction: local MDS coordinates, tangent and
//! normal frames, and fiber coordinates extracted from the kernel of the
//! base regression.

use nalgebra::{DMatrix, DVector, SVD};
use serde::Serialize;

use crate::config::NormalizationMode;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{max_abs, operator_norm, sym_eigen_desc};

/// Relative tolerance for the kernel-frame residual ‖m_i·η_i‖_max.
pub const KERNEL_TOL_REL: f64 = 1e-8;

/// Everything the pipeline knows about one cover set.
#[derive(Clone, Debug)]
pub struct LocalChart {
    pub index: usize,
    /// Sorted dataset indices of the member points X_i.
    pub members: Vec<usize>,
    /// Mean-centered local MDS coordinates ℓ_i, one row per member.
    pub local_coords: DMatrix<f64>,
    /// The fitted base regression m_i : R^d → R^e.
    pub regression: DMatrix<f64>,
    /// Kernel frame η_i ∈ V(r, d).
    pub kernel_frame: Frame,
    /// Fiber coordinates f_i = ℓ_i·η_i, one row per member.
    pub fiber_coords: DMatrix<f64>,
    /// Normalized fiber coordinates f̄_i with row norms ≤ 1.
    pub normalized_fiber: DMatrix<f64>,
    /// Tangent frame Ψ_i ∈ V(e, D).
    pub tangent_frame: Frame,
    /// Normal frame α_i ∈ V(D−e, D), orthogonal to Ψ_i.
    pub normal_frame: Frame,
    /// ‖m_i·η_i‖_max, compared against [`KERNEL_TOL_REL`]·‖m_i‖.
    pub kernel_residual: f64,
}

impl LocalChart {
    /// Row position of a dataset point inside this chart.
    pub fn row_of(&self, point: usize) -> Option<usize> {
        self.members.binary_search(&point).ok()
    }
}

/// Classical multidimensional scaling of a distance submatrix.
///
/// Double-centers −½·J·∂²·J, keeps the top-d eigenpairs with eigenvectors
/// scaled by √eigenvalue (negative eigenvalues clamp their column to zero),
/// and mean-centers the result.
pub fn classical_mds(sub_distances: &DMatrix<f64>, d: usize) -> Result<DMatrix<f64>> {
    let m = sub_distances.nrows();
    if sub_distances.ncols() != m {
        return Err(Error::InvalidArgument(
            "classical_mds needs a square distance matrix".into(),
        ));
    }
    if d > m {
        return Err(Error::InvalidArgument(format!(
            "MDS target dimension {d} exceeds the {m} available points"
        )));
    }
    let sq = sub_distances.map(|v| v * v);
    let row_means: Vec<f64> = (0..m).map(|i| sq.row(i).sum() / m as f64).collect();
    let grand = row_means.iter().sum::<f64>() / m as f64;
    let gram = DMatrix::from_fn(m, m, |i, j| {
        -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand)
    });
    let (values, vectors) = sym_eigen_desc(&gram);
    let mut coords = DMatrix::zeros(m, d);
    for t in 0..d {
        if values[t] > 0.0 {
            let scale = values[t].sqrt();
            for i in 0..m {
                coords[(i, t)] = vectors[(i, t)] * scale;
            }
        }
        // Non-positive eigenvalues leave the column zeroed.
    }
    for t in 0..d {
        let mean = coords.column(t).sum() / m as f64;
        for i in 0..m {
            coords[(i, t)] -= mean;
        }
    }
    Ok(coords)
}

/// PCA frames of a cover set: Ψ_i spans the top-e principal directions of
/// the mean-centered points, α_i an orthonormal basis of the complement.
pub fn tangent_and_normal_frames(points: &DMatrix<f64>, e: usize) -> Result<(Frame, Frame)> {
    let m = points.nrows();
    let dim = points.ncols();
    if m < 2 {
        return Err(Error::InvalidArgument(
            "tangent estimation needs at least 2 points".into(),
        ));
    }
    if e > dim {
        return Err(Error::InvalidArgument(format!(
            "base dimension e = {e} exceeds the ambient dimension {dim}"
        )));
    }
    let mut centered = points.clone();
    for c in 0..dim {
        let mean = centered.column(c).sum() / m as f64;
        for i in 0..m {
            centered[(i, c)] -= mean;
        }
    }
    let cov = centered.transpose() * &centered;
    if max_abs(&cov) == 0.0 {
        return Err(Error::DegenerateChart { index: 0 });
    }
    let (_, vectors) = sym_eigen_desc(&cov);
    let tangent = Frame::new(vectors.columns(0, e).clone_owned())?;
    let normal = Frame::new(vectors.columns(e, dim - e).clone_owned())?;
    Ok((tangent, normal))
}

/// Fraction of variance explained by each principal direction, for choosing
/// e and d by inspection.
pub fn pca_explained_variance(points: &DMatrix<f64>) -> Vec<f64> {
    let m = points.nrows();
    let dim = points.ncols();
    if m == 0 || dim == 0 {
        return Vec::new();
    }
    let mut centered = points.clone();
    for c in 0..dim {
        let mean = centered.column(c).sum() / m as f64;
        for i in 0..m {
            centered[(i, c)] -= mean;
        }
    }
    let cov = centered.transpose() * &centered;
    let (values, _) = sym_eigen_desc(&cov);
    let total: f64 = values.iter().map(|v| v.max(0.0)).sum();
    if total == 0.0 {
        return vec![0.0; dim];
    }
    values.iter().map(|v| v.max(0.0) / total).collect()
}

/// Output of the fiber-coordinate fit for one chart.
#[derive(Clone, Debug)]
pub struct FiberFit {
    /// m_i, the minimal-Frobenius-norm least-squares map R^d → R^e.
    pub regression: DMatrix<f64>,
    /// η_i, the r right-singular directions of m_i with smallest singular
    /// values.
    pub kernel_frame: Frame,
    /// f_i = ℓ_i·η_i.
    pub fiber_coords: DMatrix<f64>,
    /// ‖m_i·η_i‖_max.
    pub kernel_residual: f64,
    /// False when the kept kernel directions are not numerically orthogonal
    /// to the base (residual above the relative tolerance).
    pub kernel_ok: bool,
}

/// Fits the base regression t ≈ m_i·ℓ and extracts fiber coordinates from
/// its numerical kernel.
///
/// `local_coords` holds ℓ_i rows, `tangent_proj` the rows t(x) = Ψᵀ(π(x)−b_i).
pub fn fiber_coordinates(
    local_coords: &DMatrix<f64>,
    tangent_proj: &DMatrix<f64>,
    r: usize,
) -> Result<FiberFit> {
    let m = local_coords.nrows();
    let d = local_coords.ncols();
    let e = tangent_proj.ncols();
    if tangent_proj.nrows() != m {
        return Err(Error::InvalidArgument(
            "local coordinates and tangent projections disagree on the point count".into(),
        ));
    }
    if r == 0 {
        return Err(Error::FiberRankZero);
    }
    if r > d {
        return Err(Error::InvalidArgument(format!(
            "fiber rank r = {r} exceeds local dimension d = {d}"
        )));
    }
    // Minimal-norm least squares: Mᵀ = L⁺·T via the SVD of L.
    let svd = SVD::new(local_coords.clone(), true, true);
    let u = svd.u.as_ref().expect("svd with u requested");
    let v_t = svd.v_t.as_ref().expect("svd with v_t requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = 1e-12 * sigma_max;
    let rank = svd.singular_values.len();
    let mut pinv_diag = DMatrix::zeros(rank, rank);
    for i in 0..rank {
        let s = svd.singular_values[i];
        if s > cutoff && s > 0.0 {
            pinv_diag[(i, i)] = 1.0 / s;
        }
    }
    let m_transpose = v_t.transpose() * pinv_diag * u.transpose() * tangent_proj; // d×e
    let regression = m_transpose.transpose(); // e×d

    // Kernel directions: eigenvectors of mᵀm for the r smallest eigenvalues.
    let gram = regression.transpose() * &regression; // d×d
    let (_, vectors) = sym_eigen_desc(&gram);
    let mut kernel = DMatrix::zeros(d, r);
    for (dst, src) in (d - r..d).rev().enumerate() {
        // Ascending singular value order: smallest direction first.
        for i in 0..d {
            kernel[(i, dst)] = vectors[(i, src)];
        }
    }
    let kernel_frame = Frame::new(kernel)?;
    let residual = max_abs(&(&regression * kernel_frame.entries()));
    let tol = KERNEL_TOL_REL * operator_norm(&regression);
    let fiber_coords = local_coords * kernel_frame.entries();
    let _ = e;
    Ok(FiberFit {
        regression,
        kernel_frame,
        fiber_coords,
        kernel_residual: residual,
        kernel_ok: residual <= tol,
    })
}

/// The scales applied by [`normalize_fibers`], recorded for diagnostics.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationScale {
    Global(f64),
    PerChart(Vec<f64>),
}

/// Scales fiber coordinates into the unit ball: one global scale (the max
/// row norm over all charts) or one per chart.
pub fn normalize_fibers(
    fibers: &[DMatrix<f64>],
    mode: NormalizationMode,
) -> Result<(Vec<DMatrix<f64>>, NormalizationScale)> {
    let chart_max = |f: &DMatrix<f64>| -> f64 {
        (0..f.nrows())
            .map(|i| f.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max)
    };
    match mode {
        NormalizationMode::Global => {
            let scale = fibers.iter().map(chart_max).fold(0.0f64, f64::max);
            if scale == 0.0 {
                return Err(Error::FlatFiber);
            }
            let out = fibers.iter().map(|f| f / scale).collect();
            Ok((out, NormalizationScale::Global(scale)))
        }
        NormalizationMode::PerChart => {
            let scales: Vec<f64> = fibers.iter().map(chart_max).collect();
            if scales.iter().all(|&s| s == 0.0) {
                return Err(Error::FlatFiber);
            }
            let out = fibers
                .iter()
                .zip(&scales)
                .map(|(f, &s)| if s > 0.0 { f / s } else { f.clone() })
                .collect();
            Ok((out, NormalizationScale::PerChart(scales)))
        }
    }
}

/// Rows t(x) = Ψᵀ(π(x) − b_i) for the members of a chart.
pub fn tangent_projections(
    base: &DMatrix<f64>,
    members: &[usize],
    center: &DVector<f64>,
    tangent: &Frame,
) -> DMatrix<f64> {
    let e = tangent.cols();
    let mut out = DMatrix::zeros(members.len(), e);
    for (row, &p) in members.iter().enumerate() {
        for t in 0..e {
            let mut s = 0.0;
            for c in 0..base.ncols() {
                s += tangent.entries()[(c, t)] * (base[(p, c)] - center[c]);
            }
            out[(row, t)] = s;
        }
    }
    out
}

/// Distance submatrix over a chart's members.
pub fn submatrix(distances: &DMatrix<f64>, members: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(members.len(), members.len(), |i, j| {
        distances[(members[i], members[j])]
    })
}
