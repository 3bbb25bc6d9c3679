//! Metric-ball cover of the base, its partition of unity, and the weighted
//! nerve.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A cover of the base image by k open balls of radius 3·cover_radius.
#[derive(Clone, Debug)]
pub struct Cover {
    /// Indices of the ball centers into the base point set.
    pub centers: Vec<usize>,
    /// Center coordinates b_i.
    pub center_points: Vec<DVector<f64>>,
    /// The greedy k-center radius; balls use 3× this value.
    pub cover_radius: f64,
    /// For each set, the sorted point indices with ‖b − b_i‖ < 3·cover_radius.
    pub membership: Vec<Vec<usize>>,
}

/// Row-sparse partition-of-unity weights: for each point, the (set, weight)
/// pairs of the sets covering it. Rows sum to 1.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    rows: Vec<Vec<(usize, f64)>>,
}

impl PartitionOfUnity {
    pub fn row(&self, point: usize) -> &[(usize, f64)] {
        &self.rows[point]
    }

    pub fn n_points(&self) -> usize {
        self.rows.len()
    }

    /// The weight ρ_i(x), zero when x is outside U_i.
    pub fn weight(&self, point: usize, set: usize) -> f64 {
        self.rows[point]
            .iter()
            .find(|(s, _)| *s == set)
            .map(|(_, w)| *w)
            .unwrap_or(0.0)
    }
}

/// An edge of the weighted 1-skeleton nerve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NerveEdge {
    pub i: usize,
    pub j: usize,
    /// s_ij = |U_i ∩ U_j|.
    pub weight: usize,
}

/// Weighted 1-skeleton of the nerve of a cover; each unordered pair appears
/// once with i < j.
#[derive(Clone, Debug)]
pub struct Nerve {
    pub vertex_count: usize,
    pub edges: Vec<NerveEdge>,
}

impl Nerve {
    pub fn total_weight(&self) -> usize {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Adjacency lists over the 1-skeleton.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// All 3-cliques (i < j < k) of the 1-skeleton; these are the triangles
    /// the nerve filtration uses.
    pub fn triangles(&self) -> Vec<(usize, usize, usize)> {
        let k = self.vertex_count;
        let mut adj = vec![vec![false; k]; k];
        for e in &self.edges {
            adj[e.i][e.j] = true;
            adj[e.j][e.i] = true;
        }
        let mut out = Vec::new();
        for a in 0..k {
            for b in (a + 1)..k {
                if !adj[a][b] {
                    continue;
                }
                for c in (b + 1)..k {
                    if adj[a][c] && adj[b][c] {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }
}

/// Farthest-first traversal over an arbitrary metric, shared by the cover
/// construction and landmark subsampling. Returns the chosen indices and the
/// covering radius (max distance of any point to its nearest pick).
pub fn farthest_first(
    n: usize,
    dist: impl Fn(usize, usize) -> f64,
    k: usize,
    start: usize,
) -> Result<(Vec<usize>, f64)> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if start >= n {
        return Err(Error::InvalidArgument(format!(
            "start index {start} out of range for {n} points"
        )));
    }
    let mut centers = vec![start];
    let mut nearest: Vec<f64> = (0..n).map(|i| dist(start, i)).collect();
    while centers.len() < k {
        let (next, _) = nearest
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (i, &d)| {
                if d > acc.1 {
                    (i, d)
                } else {
                    acc
                }
            });
        centers.push(next);
        for i in 0..n {
            let d = dist(next, i);
            if d < nearest[i] {
                nearest[i] = d;
            }
        }
    }
    let radius = nearest.iter().cloned().fold(0.0f64, f64::max);
    Ok((centers, radius))
}

/// Greedy k-center over the rows of the base image with Euclidean distances.
pub fn greedy_k_center(base: &DMatrix<f64>, k: usize, start: usize) -> Result<(Vec<usize>, f64)> {
    let dist = |a: usize, b: usize| row_distance(base, a, b);
    farthest_first(base.nrows(), dist, k, start)
}

fn row_distance(m: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    let mut s = 0.0;
    for c in 0..m.ncols() {
        let diff = m[(a, c)] - m[(b, c)];
        s += diff * diff;
    }
    s.sqrt()
}

/// Builds the metric-ball cover: greedy centers, then strict 3·radius balls.
/// The factor of 3 guarantees coverage and sizable intersections.
pub fn build_cover(base: &DMatrix<f64>, k: usize, start: usize) -> Result<Cover> {
    let n = base.nrows();
    let (centers, cover_radius) = greedy_k_center(base, k, start)?;
    if cover_radius == 0.0 {
        return Err(Error::DegenerateCover);
    }
    let ball = 3.0 * cover_radius;
    let mut membership = vec![Vec::new(); k];
    let mut covered = vec![false; n];
    for (s, &c) in centers.iter().enumerate() {
        for p in 0..n {
            if row_distance(base, c, p) < ball {
                membership[s].push(p);
                covered[p] = true;
            }
        }
    }
    // 3c > c, so the greedy guarantee already covers every point.
    assert!(covered.iter().all(|&c| c), "cover invariant violated");
    assert!(membership.iter().all(|m| !m.is_empty()));
    let center_points = centers
        .iter()
        .map(|&c| base.row(c).transpose().clone_owned())
        .collect();
    Ok(Cover {
        centers,
        center_points,
        cover_radius,
        membership,
    })
}

/// Bump-function partition of unity subordinate to the cover:
/// p_i(x) = exp(−1/(1 − (‖x − b_i‖/(3c))²)) inside U_i, zero outside,
/// normalized so every row sums to 1.
pub fn partition_of_unity(cover: &Cover, base: &DMatrix<f64>) -> Result<PartitionOfUnity> {
    let n = base.nrows();
    let ball = 3.0 * cover.cover_radius;
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (s, members) in cover.membership.iter().enumerate() {
        let b = &cover.center_points[s];
        for &p in members {
            let mut dist2 = 0.0;
            for c in 0..base.ncols() {
                let diff = base[(p, c)] - b[c];
                dist2 += diff * diff;
            }
            let t = dist2.sqrt() / ball;
            debug_assert!(t < 1.0);
            let raw = (-1.0 / (1.0 - t * t)).exp();
            rows[p].push((s, raw));
        }
    }
    for (p, row) in rows.iter_mut().enumerate() {
        let total: f64 = row.iter().map(|(_, w)| w).sum();
        assert!(
            total > 0.0,
            "point {p} has no covering set; coverage invariant violated"
        );
        for (_, w) in row.iter_mut() {
            *w /= total;
        }
        row.sort_by_key(|(s, _)| *s);
    }
    Ok(PartitionOfUnity { rows })
}

/// The weighted 1-skeleton nerve: an edge per non-empty pairwise
/// intersection, weighted by the intersection cardinality.
pub fn build_nerve(cover: &Cover) -> Nerve {
    let k = cover.membership.len();
    let mut edges = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let weight = sorted_intersection_size(&cover.membership[i], &cover.membership[j]);
            if weight > 0 {
                edges.push(NerveEdge { i, j, weight });
            }
        }
    }
    Nerve {
        vertex_count: k,
        edges,
    }
}

/// Sorted point indices shared by two cover sets.
pub fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
    out
}

fn sorted_intersection_size(a: &[usize], b: &[usize]) -> usize {
    sorted_intersection(a, b).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(values.len(), 1, |i, _| values[i])
    }

    #[test]
    fn collinear_greedy_trace() {
        // Farthest-first from 0 on {0,1,2,3} picks 3 next; radius 1.
        let base = line(&[0.0, 1.0, 2.0, 3.0]);
        let (centers, radius) = greedy_k_center(&base, 2, 0).unwrap();
        assert_eq!(centers, vec![0, 3]);
        assert_eq!(radius, 1.0);
        // Exhaustive check: no 2-center choice beats radius 1 by more than 2x.
        let mut optimal = f64::INFINITY;
        for a in 0..4 {
            for b in (a + 1)..4 {
                let r = (0..4)
                    .map(|p| {
                        let da = (p as f64 - a as f64).abs();
                        let db = (p as f64 - b as f64).abs();
                        da.min(db)
                    })
                    .fold(0.0f64, f64::max);
                optimal = optimal.min(r);
            }
        }
        assert!(radius <= 2.0 * optimal + 1e-12);
    }

    #[test]
    fn k_equals_n_zero_radius() {
        let base = line(&[0.0, 1.0, 2.0]);
        let (_, radius) = greedy_k_center(&base, 3, 0).unwrap();
        assert_eq!(radius, 0.0);
    }

    #[test]
    fn duplicates_k1_radius_is_max_distance() {
        let base = line(&[0.0, 0.0, 2.0]);
        let (centers, radius) = greedy_k_center(&base, 1, 0).unwrap();
        assert_eq!(centers, vec![0]);
        assert_eq!(radius, 2.0);
    }

    #[test]
    fn k_larger_than_n_rejected() {
        let base = line(&[0.0, 1.0]);
        assert!(greedy_k_center(&base, 3, 0).is_err());
    }

    #[test]
    fn degenerate_cover_rejected() {
        let base = line(&[1.0, 1.0, 1.0]);
        assert!(matches!(
            build_cover(&base, 2, 0),
            Err(Error::DegenerateCover)
        ));
    }

    #[test]
    fn every_point_covered() {
        let base = DMatrix::from_fn(40, 2, |i, c| {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / 40.0;
            if c == 0 {
                theta.cos()
            } else {
                theta.sin()
            }
        });
        let cover = build_cover(&base, 5, 0).unwrap();
        let mut covered = vec![false; 40];
        for m in &cover.membership {
            for &p in m {
                covered[p] = true;
            }
        }
        assert!(covered.iter().all(|&c| c));
    }

    #[test]
    fn distant_clusters_have_no_nerve_edge() {
        let mut vals = vec![0.0, 0.4, 0.8];
        vals.extend([100.0, 100.4, 100.8]);
        let base = line(&vals);
        let cover = build_cover(&base, 2, 0).unwrap();
        let nerve = build_nerve(&cover);
        assert_eq!(nerve.edges.len(), 0);
    }

    #[test]
    fn two_sets_on_a_circle_overlap() {
        let n = 200;
        let base = DMatrix::from_fn(n, 2, |i, c| {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64);
            if c == 0 {
                theta.cos()
            } else {
                theta.sin()
            }
        });
        let cover = build_cover(&base, 2, 0).unwrap();
        let nerve = build_nerve(&cover);
        assert_eq!(nerve.edges.len(), 1);
        assert!(nerve.edges[0].weight > 0);
    }

    #[test]
    fn partition_rows_sum_to_one() {
        let base = DMatrix::from_fn(60, 2, |i, c| {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / 60.0;
            if c == 0 {
                theta.cos()
            } else {
                theta.sin()
            }
        });
        let cover = build_cover(&base, 6, 0).unwrap();
        let part = partition_of_unity(&cover, &base).unwrap();
        for p in 0..60 {
            let sum: f64 = part.row(p).iter().map(|(_, w)| w).sum();
            assert!((sum - 1.0).abs() <= 1e-12, "row {p} sums to {sum}");
            for &(s, w) in part.row(p) {
                assert!(w >= 0.0);
                assert!(cover.membership[s].binary_search(&p).is_ok());
            }
        }
    }

    #[test]
    fn bump_value_at_center() {
        // x = b_i as sole covering set: rho = 1 while the raw bump is e^{-1}.
        let base = line(&[0.0, 0.1, 10.0, 10.1]);
        let cover = build_cover(&base, 2, 0).unwrap();
        let part = partition_of_unity(&cover, &base).unwrap();
        assert_eq!(part.row(0).len(), 1);
        assert!((part.weight(0, 0) - 1.0).abs() <= 1e-15);
        let t: f64 = 0.0;
        let raw = (-1.0 / (1.0 - t * t)).exp();
        assert!((raw - (-1.0f64).exp()).abs() < 1e-12);
        assert!((raw - 0.367_879_441_171_442_33).abs() < 1e-12);
    }

    #[test]
    fn equidistant_point_splits_evenly() {
        let base = line(&[0.0, 1.0, 2.0]);
        // Centers at 0 and 2 (greedy from 0), point 1 equidistant.
        let cover = build_cover(&base, 2, 0).unwrap();
        let part = partition_of_unity(&cover, &base).unwrap();
        let w0 = part.weight(1, 0);
        let w1 = part.weight(1, 1);
        assert!((w0 - 0.5).abs() <= 1e-12);
        assert!((w1 - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn bump_vanishes_at_ball_boundary() {
        let ball = 3.0;
        let p = |dist: f64| {
            let t = dist / ball;
            (-1.0 / (1.0 - t * t)).exp()
        };
        assert!(p(2.999_999) < 1e-6);
        assert!(p(2.9) < p(2.0));
        assert!(p(2.0) < p(0.0));
    }

    #[test]
    fn nested_sets_weight_is_smaller_cardinality() {
        let cover = Cover {
            centers: vec![0, 1],
            center_points: vec![DVector::zeros(1), DVector::zeros(1)],
            cover_radius: 1.0,
            membership: vec![vec![0, 1, 2], vec![0, 1, 2, 3, 4]],
        };
        let nerve = build_nerve(&cover);
        assert_eq!(nerve.edges.len(), 1);
        assert_eq!(nerve.edges[0].weight, 3);
    }

    #[test]
    fn ring_of_sets_gives_cycle_nerve() {
        // Sixteen sets around a circle, each sharing points only with its
        // two neighbors.
        let k = 16;
        let mut membership = Vec::new();
        for s in 0..k {
            // Set s owns points 10s..10s+12, overlapping the next set by 2.
            let begin = 10 * s;
            let end = 10 * s + 12;
            let members: Vec<usize> = (begin..end).map(|p| p % (10 * k)).collect();
            let mut sorted = members;
            sorted.sort_unstable();
            membership.push(sorted);
        }
        let cover = Cover {
            centers: (0..k).collect(),
            center_points: vec![DVector::zeros(1); k],
            cover_radius: 1.0,
            membership,
        };
        let nerve = build_nerve(&cover);
        let mut expected: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        for e in expected.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        expected.sort_unstable();
        let mut got: Vec<(usize, usize)> = nerve.edges.iter().map(|e| (e.i, e.j)).collect();
        got.sort_unstable();
        assert_eq!(got, expected);
        assert!(nerve.edges.iter().all(|e| e.weight == 2));
    }

    #[test]
    fn nerve_weight_total_matches_recount() {
        let base = DMatrix::from_fn(80, 2, |i, c| {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / 80.0;
            if c == 0 {
                theta.cos()
            } else {
                theta.sin()
            }
        });
        let cover = build_cover(&base, 8, 0).unwrap();
        let nerve = build_nerve(&cover);
        // Independent pairwise recount.
        let mut total = 0usize;
        for i in 0..8 {
            for j in (i + 1)..8 {
                for p in &cover.membership[i] {
                    if cover.membership[j].contains(p) {
                        total += 1;
                    }
                }
            }
        }
        assert_eq!(nerve.total_weight(), total);
    }
}
