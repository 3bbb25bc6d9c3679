//! Bundle-level estimation and alignment: reach, transition cocycles,
//! determinant-sign synchronization for the square case, the stochastic
//! fiber alignment, and obstruction-driven target-dimension selection.

use nalgebra::DMatrix;
use rand::Rng;
use rustc_hash::FxHashMap;

use crate::charts::LocalChart;
use crate::cover::{sorted_intersection, Cover, Nerve};
use crate::error::{Error, Result};
use crate::frame::{Frame, OrthogonalMatrix};
use crate::linalg::{nearest_frame, nearest_rotation, procrustes_fit, random_frame};

/// Orthogonal transition matrices over the nerve edges, stored once per
/// unordered edge for i < j with the convention Ω_ji = Ω_ijᵀ.
#[derive(Clone, Debug)]
pub struct DiscreteCocycle {
    rank: usize,
    edges: Vec<(usize, usize)>,
    matrices: Vec<OrthogonalMatrix>,
    lookup: FxHashMap<(usize, usize), usize>,
}

impl DiscreteCocycle {
    pub fn new(rank: usize, entries: Vec<((usize, usize), OrthogonalMatrix)>) -> Result<Self> {
        let mut edges = Vec::with_capacity(entries.len());
        let mut matrices = Vec::with_capacity(entries.len());
        let mut lookup = FxHashMap::default();
        for ((i, j), m) in entries {
            if i >= j {
                return Err(Error::InvalidArgument(format!(
                    "cocycle edges are stored with i < j, got ({i}, {j})"
                )));
            }
            if m.size() != rank {
                return Err(Error::InvalidArgument(format!(
                    "cocycle rank {rank} but edge ({i}, {j}) carries a {}x{} matrix",
                    m.size(),
                    m.size()
                )));
            }
            lookup.insert((i, j), edges.len());
            edges.push((i, j));
            matrices.push(m);
        }
        Ok(DiscreteCocycle {
            rank,
            edges,
            matrices,
            lookup,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The stored matrix for the unordered edge position.
    pub fn matrix_at(&self, pos: usize) -> &OrthogonalMatrix {
        &self.matrices[pos]
    }

    /// Ω_ij for an ordered pair, transposing the stored matrix when i > j.
    pub fn oriented(&self, i: usize, j: usize) -> Option<DMatrix<f64>> {
        if i < j {
            self.lookup
                .get(&(i, j))
                .map(|&p| self.matrices[p].entries().clone())
        } else {
            self.lookup
                .get(&(j, i))
                .map(|&p| self.matrices[p].entries().transpose())
        }
    }

    /// Determinant sign of Ω_ij; symmetric in the pair.
    pub fn det_sign(&self, i: usize, j: usize) -> Option<i8> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.lookup.get(&key).map(|&p| self.matrices[p].det_sign())
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.lookup.contains_key(&key)
    }
}

/// Reach estimate of the base image from the cover centers and their
/// tangent frames:
/// τ = inf_{i≠j} ‖b_j − b_i‖² / (2·√(‖b_j − b_i‖² − ‖Ψ_iᵀ(b_j − b_i)‖²)).
///
/// Ordered pairs whose displacement is numerically tangent (radicand below
/// 1e−14) carry no curvature information and are skipped.
pub fn estimate_reach(cover: &Cover, tangent_frames: &[Frame]) -> Result<f64> {
    let k = cover.center_points.len();
    if k < 2 {
        return Err(Error::InvalidArgument(
            "reach estimation needs at least two centers".into(),
        ));
    }
    let mut tau = f64::INFINITY;
    let mut any = false;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let diff = &cover.center_points[j] - &cover.center_points[i];
            let norm2 = diff.norm_squared();
            let proj = tangent_frames[i].entries().transpose() * &diff;
            let radicand = norm2 - proj.norm_squared();
            if radicand <= 1e-14 {
                continue;
            }
            any = true;
            tau = tau.min(norm2 / (2.0 * radicand.sqrt()));
        }
    }
    if !any {
        return Err(Error::ReachUndefined);
    }
    Ok(tau)
}

/// Per-edge estimation of Ω: orthogonal Procrustes over the normalized
/// fiber coordinates of the points shared by the two charts.
///
/// `members[i]` are chart i's sorted point indices, `fibers[i]` its fiber
/// rows. Also returns a warning per edge whose fit was non-unique.
pub fn estimate_omega(
    members: &[Vec<usize>],
    fibers: &[DMatrix<f64>],
    nerve: &Nerve,
) -> Result<(DiscreteCocycle, Vec<String>)> {
    let rank = fibers.first().map(|f| f.ncols()).unwrap_or_default();
    let mut entries = Vec::with_capacity(nerve.edges.len());
    let mut warnings = Vec::new();
    for edge in &nerve.edges {
        let (i, j) = (edge.i, edge.j);
        let shared = sorted_intersection(&members[i], &members[j]);
        assert!(
            !shared.is_empty(),
            "nerve edge ({i}, {j}) with empty overlap; nerve construction broken"
        );
        let mut source = DMatrix::zeros(shared.len(), rank);
        let mut target = DMatrix::zeros(shared.len(), rank);
        for (row, &p) in shared.iter().enumerate() {
            let ri = members[i].binary_search(&p).expect("member of chart i");
            let rj = members[j].binary_search(&p).expect("member of chart j");
            for c in 0..rank {
                source[(row, c)] = fibers[j][(rj, c)];
                target[(row, c)] = fibers[i][(ri, c)];
            }
        }
        let fit = procrustes_fit(&source, &target)?;
        if fit.non_unique {
            warnings.push(format!(
                "edge ({i}, {j}): fiber Procrustes solution non-unique \
                 (smallest singular value {:.3e})",
                fit.smallest_singular
            ));
        }
        entries.push(((i, j), fit.omega));
    }
    Ok((DiscreteCocycle::new(rank, entries)?, warnings))
}

/// Per-edge estimation of Θ: the nearest orthogonal matrix to α_iᵀ·α_j.
pub fn estimate_theta(normal_frames: &[Frame], nerve: &Nerve) -> Result<DiscreteCocycle> {
    let rank = normal_frames
        .first()
        .map(|f| f.cols())
        .unwrap_or_default();
    let mut entries = Vec::with_capacity(nerve.edges.len());
    for edge in &nerve.edges {
        let (i, j) = (edge.i, edge.j);
        let overlap_map =
            normal_frames[i].entries().transpose() * normal_frames[j].entries();
        entries.push(((i, j), nearest_rotation_free(&overlap_map)?));
    }
    Ok(DiscreteCocycle::new(rank, entries)?)
}

/// Both cocycles at once, from finished charts.
pub fn estimate_cocycles(
    charts: &[LocalChart],
    nerve: &Nerve,
) -> Result<(DiscreteCocycle, DiscreteCocycle, Vec<String>)> {
    let members: Vec<Vec<usize>> = charts.iter().map(|c| c.members.clone()).collect();
    let fibers: Vec<DMatrix<f64>> = charts.iter().map(|c| c.normalized_fiber.clone()).collect();
    let normals: Vec<Frame> = charts.iter().map(|c| c.normal_frame.clone()).collect();
    let (omega, warnings) = estimate_omega(&members, &fibers, nerve)?;
    let theta = estimate_theta(&normals, nerve)?;
    Ok((omega, theta, warnings))
}

/// Nearest orthogonal matrix (reflections allowed) to a square matrix.
fn nearest_rotation_free(m: &DMatrix<f64>) -> Result<OrthogonalMatrix> {
    let frame = nearest_frame(m)?;
    OrthogonalMatrix::new(frame.into_entries())
}

/// The synchronization output for the square case D = r + e.
#[derive(Clone, Debug)]
pub struct SyncSigns {
    /// Per-vertex signs λ_i ∈ {−1, +1}.
    pub lambda: Vec<i8>,
    /// Per-edge signs ω_ij = det(Ω_ij)·det(Θ_ij), aligned with the nerve
    /// edge list.
    pub omega_signs: Vec<i8>,
}

/// Spectral sign synchronization (square case only).
///
/// Builds W with W_ij = s_ij·ω_ij, extracts its top eigenvector by shifted
/// power iteration from the all-ones vector (1000 steps or relative
/// tolerance 1e−10), sets λ_i = sign(v_i) with sign(0) := +1, and replaces
/// every Θ_ij by M(λ_i)·Θ_ij·M(λ_j), where M(λ) flips the sign of the first
/// row and column.
pub fn synchronize_signs(
    nerve: &Nerve,
    omega: &DiscreteCocycle,
    theta: &DiscreteCocycle,
) -> Result<(SyncSigns, DiscreteCocycle)> {
    if !nerve.is_connected() {
        return Err(Error::NerveDisconnected);
    }
    let k = nerve.vertex_count;
    let mut w = DMatrix::zeros(k, k);
    let mut omega_signs = Vec::with_capacity(nerve.edges.len());
    for edge in &nerve.edges {
        let s = omega.det_sign(edge.i, edge.j).ok_or_else(|| {
            Error::InvalidArgument(format!("cocycle missing edge ({}, {})", edge.i, edge.j))
        })? * theta.det_sign(edge.i, edge.j).ok_or_else(|| {
            Error::InvalidArgument(format!("cocycle missing edge ({}, {})", edge.i, edge.j))
        })?;
        omega_signs.push(s);
        let val = edge.weight as f64 * s as f64;
        w[(edge.i, edge.j)] = val;
        w[(edge.j, edge.i)] = val;
    }
    // Power iteration on the raw indefinite W stalls (bipartite supports
    // have symmetric spectra), so it runs on the degree-normalized operator
    // D^{-1/2}·W·D^{-1/2} + I, whose top eigenvector carries the same signs
    // and whose spectrum lies in [0, 2].
    let deg: Vec<f64> = (0..k)
        .map(|i| w.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .collect();
    if deg.iter().any(|&d| d == 0.0) {
        return Err(Error::NerveDisconnected);
    }
    for i in 0..k {
        for j in 0..k {
            w[(i, j)] /= (deg[i] * deg[j]).sqrt();
        }
        w[(i, i)] += 1.0;
    }
    // All-ones start, tilted by a fixed index hash: symmetric instances can
    // make the plain all-ones vector exactly orthogonal to the top
    // eigenvector, which would lock the iteration onto the wrong one.
    let mut v = nalgebra::DVector::from_fn(k, |i, _| 1.0 + 0.125 * index_tilt(i));
    v /= v.norm();
    for _ in 0..1000 {
        let next = &w * &v;
        let norm = next.norm();
        if norm == 0.0 {
            break;
        }
        let next = next / norm;
        let delta = (&next - &v).norm();
        v = next;
        if delta <= 1e-10 {
            break;
        }
    }
    let lambda: Vec<i8> = v.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect();
    let mut updated = Vec::with_capacity(theta.edges().len());
    for (pos, &(i, j)) in theta.edges().iter().enumerate() {
        let mut m = theta.matrix_at(pos).entries().clone();
        if lambda[i] < 0 {
            flip_first_row(&mut m);
        }
        if lambda[j] < 0 {
            flip_first_col(&mut m);
        }
        updated.push(((i, j), OrthogonalMatrix::new(m)?));
    }
    Ok((
        SyncSigns {
            lambda,
            omega_signs,
        },
        DiscreteCocycle::new(theta.rank(), updated)?,
    ))
}

/// Deterministic value in (−0.5, 0.5) from an index (splitmix64 finalizer).
fn index_tilt(i: usize) -> f64 {
    let mut z = (i as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

fn flip_first_row(m: &mut DMatrix<f64>) {
    for c in 0..m.ncols() {
        m[(0, c)] = -m[(0, c)];
    }
}

fn flip_first_col(m: &mut DMatrix<f64>) {
    for r in 0..m.nrows() {
        m[(r, 0)] = -m[(r, 0)];
    }
}

/// Frames Φ_i ∈ V(r, D−e) aligned against the two cocycles, with the
/// objective trace.
#[derive(Clone, Debug)]
pub struct AlignmentResult {
    pub frames: Vec<Frame>,
    /// (iteration, objective) samples, recorded at iteration 0, every 25
    /// iterations, and at the end.
    pub objective_trace: Vec<(usize, f64)>,
    pub final_objective: f64,
}

/// The alignment objective Σ s_ij·‖Φ_i·Ω_ij − Θ_ij·Φ_j‖_F.
pub fn alignment_objective(
    nerve: &Nerve,
    omega: &DiscreteCocycle,
    theta: &DiscreteCocycle,
    frames: &[Frame],
) -> f64 {
    let mut total = 0.0;
    for edge in &nerve.edges {
        let o = omega
            .oriented(edge.i, edge.j)
            .expect("nerve edge present in cocycle");
        let t = theta
            .oriented(edge.i, edge.j)
            .expect("nerve edge present in cocycle");
        let diff = frames[edge.i].entries() * o - t * frames[edge.j].entries();
        total += edge.weight as f64 * diff.norm();
    }
    total
}

/// Stochastic minimization of the alignment objective.
///
/// Each step samples an unordered nerve edge with probability proportional
/// to its weight, picks a uniformly random orientation (i, j) so both
/// endpoints are updated in expectation, forms the closed-form minimizer
/// M = Θ_ij·Φ_j·Ω_ijᵀ of ‖M·Ω_ij − Θ_ij·Φ_j‖_F, and replaces Φ_i by the
/// nearest frame to (1−a)·Φ_i + a·M with the step size annealed as
/// a = 1 − n/n_iter.
///
/// With `special` set (square case after synchronization) frames are kept in
/// SO(r) by projecting onto the nearest rotation.
pub fn align_fibers<R: Rng>(
    nerve: &Nerve,
    omega: &DiscreteCocycle,
    theta: &DiscreteCocycle,
    n_iter: usize,
    special: bool,
    rng: &mut R,
) -> Result<AlignmentResult> {
    let k = nerve.vertex_count;
    let r = omega.rank();
    let ambient = theta.rank();
    if r > ambient {
        return Err(Error::InvalidArgument(format!(
            "fiber rank {r} exceeds normal rank {ambient}"
        )));
    }
    if nerve.edges.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot align over a nerve with no edges".into(),
        ));
    }
    let mut frames: Vec<Frame> = (0..k)
        .map(|_| random_frame(ambient, r, special, rng))
        .collect::<Result<_>>()?;

    let cumulative: Vec<f64> = nerve
        .edges
        .iter()
        .scan(0.0, |acc, e| {
            *acc += e.weight as f64;
            Some(*acc)
        })
        .collect();
    let total_weight = *cumulative.last().expect("nonempty edges");

    let mut trace = vec![(0usize, alignment_objective(nerve, omega, theta, &frames))];
    let mut a = 1.0f64;
    let mut consecutive_failures = 0usize;
    let mut n = 1usize;
    while n <= n_iter {
        let draw: f64 = rng.random_range(0.0..total_weight);
        let pos = cumulative.partition_point(|&c| c <= draw).min(nerve.edges.len() - 1);
        let edge = &nerve.edges[pos];
        let (i, j) = if rng.random::<bool>() {
            (edge.i, edge.j)
        } else {
            (edge.j, edge.i)
        };
        let o = omega.oriented(i, j).expect("nerve edge present in cocycle");
        let t = theta.oriented(i, j).expect("nerve edge present in cocycle");
        // ‖M·Ω − Θ·Φ_j‖_F = ‖M − Θ·Φ_j·Ωᵀ‖_F, so M is exactly this product
        // (already a frame).
        let m = t * frames[j].entries() * o.transpose();
        let combination = frames[i].entries() * (1.0 - a) + m * a;
        let projected = if special {
            nearest_rotation(&combination).map(|o| {
                Frame::new(o.entries().clone()).expect("rotation is a frame")
            })
        } else {
            nearest_frame(&combination)
        };
        match projected {
            Ok(f) => {
                frames[i] = f;
                consecutive_failures = 0;
            }
            Err(Error::DegenerateFrameProjection) => {
                consecutive_failures += 1;
                if consecutive_failures >= 10 {
                    return Err(Error::AlignmentDegenerate(consecutive_failures));
                }
                // Resample the edge without advancing the schedule.
                continue;
            }
            Err(e) => return Err(e),
        }
        a = 1.0 - n as f64 / n_iter as f64;
        if n % 25 == 0 {
            trace.push((n, alignment_objective(nerve, omega, theta, &frames)));
        }
        n += 1;
    }
    let final_objective = alignment_objective(nerve, omega, theta, &frames);
    if trace.last().map(|&(it, _)| it) != Some(n_iter) {
        trace.push((n_iter, final_objective));
    }
    Ok(AlignmentResult {
        frames,
        objective_trace: trace,
        final_objective,
    })
}

/// Target dimension from the first Stiefel–Whitney obstruction over a
/// circular base: D = r + 1 when w₁ is trivial, D = r + 2 when it is not.
/// Cut-unfold bases are contractible, so D = r + 1 unconditionally.
pub fn choose_target_dimension(
    r: usize,
    e: usize,
    w1_trivial: bool,
    cut_unfold: bool,
) -> Result<usize> {
    if cut_unfold {
        return Ok(r + 1);
    }
    if e != 1 {
        return Err(Error::ObstructionNeedsCircle(e));
    }
    Ok(if w1_trivial { r + 1 } else { r + 2 })
}

/// Product of det(Ω) signs along the cycle of cover centers ordered by base
/// angle; −1 characterizes a Möbius-type twist. Only meaningful for circular
/// bases whose consecutive centers overlap.
pub fn circle_holonomy(cover: &Cover, omega: &DiscreteCocycle) -> Result<i8> {
    let k = cover.center_points.len();
    if k < 3 {
        return Err(Error::InvalidArgument(
            "holonomy needs at least 3 centers".into(),
        ));
    }
    let mut order: Vec<usize> = (0..k).collect();
    let angle = |s: usize| {
        let b = &cover.center_points[s];
        b[1].atan2(b[0])
    };
    order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
    let mut sign = 1i8;
    for step in 0..k {
        let i = order[step];
        let j = order[(step + 1) % k];
        let s = omega.det_sign(i, j).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "consecutive centers {i} and {j} share no nerve edge; base not circular?"
            ))
        })?;
        sign *= s;
    }
    Ok(sign)
}
