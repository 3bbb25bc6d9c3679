//! First Stiefel–Whitney obstruction machinery: the weighted nerve
//! filtration, the approximate-cocycle death scale, dim-1 persistence of the
//! filtered nerve over Z/2, and the w₁ triviality test that drives target
//! dimension selection.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bundle::DiscreteCocycle;
use crate::cover::Nerve;
use crate::diagram::{PersistenceClass, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::linalg::operator_norm;

/// The nerve with birth values: vertices at 0, edge (ij) at 1 − s_ij/n,
/// triangles when all of their edges are present (max edge birth). Births
/// never exceed 1.
#[derive(Clone, Debug)]
pub struct NerveFiltration {
    pub vertex_count: usize,
    /// (i, j, birth) with i < j.
    pub edges: Vec<(usize, usize, f64)>,
    /// (i, j, k, birth) with i < j < k.
    pub triangles: Vec<(usize, usize, usize, f64)>,
}

impl NerveFiltration {
    /// Builds the filtration from a nerve and the dataset size.
    pub fn new(nerve: &Nerve, n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidArgument(
                "nerve filtration needs a non-empty dataset".into(),
            ));
        }
        let edges: Vec<(usize, usize, f64)> = nerve
            .edges
            .iter()
            .map(|e| {
                let birth = (1.0 - e.weight as f64 / n_points as f64).min(1.0);
                (e.i, e.j, birth)
            })
            .collect();
        let birth_of = |a: usize, b: usize| -> f64 {
            let key = (a.min(b), a.max(b));
            edges
                .iter()
                .find(|&&(i, j, _)| (i, j) == key)
                .map(|&(_, _, b)| b)
                .expect("triangle edge present")
        };
        let triangles = nerve
            .triangles()
            .into_iter()
            .map(|(i, j, k)| {
                let birth = birth_of(i, j).max(birth_of(j, k)).max(birth_of(i, k));
                (i, j, k, birth)
            })
            .collect();
        Ok(NerveFiltration {
            vertex_count: nerve.vertex_count,
            edges,
            triangles,
        })
    }
}

/// Largest filtration value at which Ω is still an ε-approximate cocycle:
/// every triangle present must satisfy ‖Ω_ij·Ω_jk − Ω_ik‖_op < epsilon.
/// Triangle births are scanned in order; with no violating triangle the
/// death is 1.
pub fn cocycle_death(
    filtration: &NerveFiltration,
    omega: &DiscreteCocycle,
    epsilon: f64,
) -> Result<f64> {
    let mut death = 1.0f64;
    for &(i, j, k, birth) in &filtration.triangles {
        let oij = omega
            .oriented(i, j)
            .ok_or_else(|| Error::InvalidArgument(format!("cocycle missing edge ({i}, {j})")))?;
        let ojk = omega
            .oriented(j, k)
            .ok_or_else(|| Error::InvalidArgument(format!("cocycle missing edge ({j}, {k})")))?;
        let oik = omega
            .oriented(i, k)
            .ok_or_else(|| Error::InvalidArgument(format!("cocycle missing edge ({i}, {k})")))?;
        let defect = operator_norm(&(oij * ojk - oik));
        if defect >= epsilon {
            death = death.min(birth);
        }
    }
    Ok(death)
}

/// A dim-1 persistent class of the nerve filtration together with a
/// representative cycle (edge positions into `NerveFiltration::edges`).
#[derive(Clone, Debug)]
pub(crate) struct NerveClass {
    pub birth: f64,
    /// Filtration value of the killing triangle; 1.0 with `infinite` set
    /// when the class survives.
    pub death: f64,
    pub infinite: bool,
    pub representative: Vec<usize>,
}

/// Standard Z/2 boundary-matrix reduction of the ≤2-skeleton, returning the
/// dim-1 classes. Kept separate from the Vietoris–Rips engine: the nerve is
/// tiny and this version also yields representative cycles for w₁ support.
pub(crate) fn nerve_persistence_classes(filtration: &NerveFiltration) -> Vec<NerveClass> {
    let k = filtration.vertex_count;
    let ne = filtration.edges.len();

    // Column order: all simplices by (birth, dim, index). Vertices enter
    // first at birth 0 and never pair with anything above dimension 0 except
    // through edges.
    #[derive(Clone, Copy)]
    enum Simplex {
        Vertex(usize),
        Edge(usize),
        Triangle(usize),
    }
    let mut order: Vec<(f64, u8, usize, Simplex)> = Vec::new();
    for v in 0..k {
        order.push((0.0, 0, v, Simplex::Vertex(v)));
    }
    for (pos, &(_, _, birth)) in filtration.edges.iter().enumerate() {
        order.push((birth, 1, pos, Simplex::Edge(pos)));
    }
    for (pos, &(_, _, _, birth)) in filtration.triangles.iter().enumerate() {
        order.push((birth, 2, pos, Simplex::Triangle(pos)));
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    // Global column index per simplex.
    let mut vertex_col = vec![usize::MAX; k];
    let mut edge_col = vec![usize::MAX; ne];
    let mut tri_col = vec![usize::MAX; filtration.triangles.len()];
    for (col, &(_, _, _, s)) in order.iter().enumerate() {
        match s {
            Simplex::Vertex(v) => vertex_col[v] = col,
            Simplex::Edge(p) => edge_col[p] = col,
            Simplex::Triangle(p) => tri_col[p] = col,
        }
    }
    let edge_pos_of = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        filtration
            .edges
            .iter()
            .position(|&(i, j, _)| (i, j) == key)
            .expect("triangle edge present")
    };

    // R = D·V reduction over Z/2 with columns as sorted index vectors.
    let total = order.len();
    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(total);
    let mut v_cols: Vec<Vec<usize>> = Vec::with_capacity(total);
    let mut pivot_owner: Vec<Option<usize>> = vec![None; total];
    for (col, &(_, _, _, s)) in order.iter().enumerate() {
        let mut r: Vec<usize> = match s {
            Simplex::Vertex(_) => Vec::new(),
            Simplex::Edge(p) => {
                let (i, j, _) = filtration.edges[p];
                let mut b = vec![vertex_col[i], vertex_col[j]];
                b.sort_unstable();
                b
            }
            Simplex::Triangle(p) => {
                let (i, j, k3, _) = filtration.triangles[p];
                let mut b = vec![
                    edge_col[edge_pos_of(i, j)],
                    edge_col[edge_pos_of(j, k3)],
                    edge_col[edge_pos_of(i, k3)],
                ];
                b.sort_unstable();
                b
            }
        };
        let mut v = vec![col];
        while let Some(&low) = r.last() {
            match pivot_owner[low] {
                Some(other) => {
                    r = symmetric_difference(&r, &reduced[other]);
                    v = symmetric_difference(&v, &v_cols[other]);
                }
                None => break,
            }
        }
        if let Some(&low) = r.last() {
            pivot_owner[low] = Some(col);
        }
        reduced.push(r);
        v_cols.push(v);
    }

    // Harvest dim-1 classes.
    let mut classes = Vec::new();
    for (col, &(birth, dim, _, s)) in order.iter().enumerate() {
        if dim != 1 {
            continue;
        }
        let edge_pos = match s {
            Simplex::Edge(p) => p,
            _ => unreachable!(),
        };
        let _ = edge_pos;
        if !reduced[col].is_empty() {
            continue; // negative edge: kills a 0-class
        }
        // Positive edge: born here. Either killed by some triangle whose
        // reduced column has this edge as its pivot, or essential.
        let killer = pivot_owner[col];
        match killer {
            Some(tcol) => {
                let (tbirth, tdim, _, _) = order[tcol];
                debug_assert_eq!(tdim, 2);
                if tbirth > birth {
                    let representative = reduced[tcol]
                        .iter()
                        .map(|&c| edge_pos_from_col(&order, c))
                        .collect();
                    classes.push(NerveClass {
                        birth,
                        death: tbirth,
                        infinite: false,
                        representative,
                    });
                }
            }
            None => {
                let representative = v_cols[col]
                    .iter()
                    .map(|&c| edge_pos_from_col(&order, c))
                    .collect();
                classes.push(NerveClass {
                    birth,
                    death: 1.0,
                    infinite: true,
                    representative,
                });
            }
        }
    }
    classes.sort_by(|a, b| {
        a.birth
            .total_cmp(&b.birth)
            .then(a.death.total_cmp(&b.death))
    });
    classes
}

fn edge_pos_from_col(order: &[(f64, u8, usize, impl Copy)], col: usize) -> usize {
    debug_assert_eq!(order[col].1, 1);
    order[col].2
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            std::cmp::Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
    out
}

/// Persistence diagram of H¹ of the filtered nerve over Z/2. Infinite deaths
/// are capped at 1 and flagged.
pub fn nerve_persistence(filtration: &NerveFiltration) -> Result<PersistenceDiagram> {
    let classes = nerve_persistence_classes(filtration)
        .into_iter()
        .map(|c| PersistenceClass {
            dim: 1,
            birth: c.birth,
            death: c.death,
            infinite: c.infinite,
        })
        .collect();
    PersistenceDiagram::new(2, classes)
}

/// Everything the obstruction computation reports.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    /// Sup filtration value at which Ω is a 2-approximate cocycle.
    pub death: f64,
    /// Dim-1 persistence of the nerve filtration over Z/2.
    pub nerve_pd: PersistenceDiagram,
    /// Sub-diagram of classes born before `death`.
    pub span: Vec<PersistenceClass>,
    pub w1_trivial: bool,
    /// When nontrivial: the persistent classes summing to w₁, in the
    /// earliest-born representative basis. The triviality flag is the
    /// contract; the support is reported for inspection.
    pub w1_support: Vec<PersistenceClass>,
}

/// The first Stiefel–Whitney test: forms the Z/2 edge cochain
/// w(ij) = [det(Ω_ij) < 0] on the subcomplex strictly below `death`,
/// verifies it is a cocycle there, and decides whether w = δ(g) is solvable
/// for a vertex cochain g by Gaussian elimination over Z/2.
pub fn first_sw_class(
    filtration: &NerveFiltration,
    omega: &DiscreteCocycle,
    death: f64,
) -> Result<(bool, Vec<PersistenceClass>)> {
    let k = filtration.vertex_count;
    // Edge cochain on the subcomplex strictly below the death scale.
    let mut w_edge = Vec::new();
    let mut active = Vec::new();
    for (pos, &(i, j, birth)) in filtration.edges.iter().enumerate() {
        if birth < death {
            let sign = omega.det_sign(i, j).ok_or_else(|| {
                Error::InvalidArgument(format!("cocycle missing edge ({i}, {j})"))
            })?;
            active.push(pos);
            w_edge.push(sign < 0);
        }
    }
    let w_of = |pos: usize| -> Option<bool> {
        active
            .iter()
            .position(|&p| p == pos)
            .map(|idx| w_edge[idx])
    };
    let edge_pos_of = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        filtration
            .edges
            .iter()
            .position(|&(i, j, _)| (i, j) == key)
            .expect("triangle edge present")
    };
    // Cocycle check on every triangle strictly below the death scale.
    for &(i, j, t, birth) in &filtration.triangles {
        if birth < death {
            let sum = [w_of(edge_pos_of(i, j)), w_of(edge_pos_of(j, t)), w_of(edge_pos_of(i, t))]
                .into_iter()
                .map(|b| b.expect("faces precede the triangle") as u8)
                .sum::<u8>();
            if sum % 2 != 0 {
                return Err(Error::InconsistentCocycle);
            }
        }
    }
    // Solve w = δg over Z/2: one equation g_i + g_j = w_ij per active edge.
    let solvable = z2_coboundary_solvable(k, active.iter().map(|&p| {
        let (i, j, _) = filtration.edges[p];
        (i, j, w_of(p).unwrap())
    }));
    if solvable {
        return Ok((true, Vec::new()));
    }
    // Express [w] in the persistent basis alive just below the death scale.
    let classes = nerve_persistence_classes(filtration);
    let mut support = Vec::new();
    for c in &classes {
        let alive = c.birth < death && (c.infinite || c.death >= death);
        if !alive {
            continue;
        }
        let eval: u8 = c
            .representative
            .iter()
            .map(|&pos| w_of(pos).map(|b| b as u8).unwrap_or(0))
            .sum::<u8>()
            % 2;
        if eval == 1 {
            support.push(PersistenceClass {
                dim: 1,
                birth: c.birth,
                death: c.death,
                infinite: c.infinite,
            });
        }
    }
    Ok((false, support))
}

/// Whether g_i + g_j = w_ij (mod 2) admits a solution, by elimination.
fn z2_coboundary_solvable(k: usize, equations: impl Iterator<Item = (usize, usize, bool)>) -> bool {
    // Rows are bitmasks over k variables plus an rhs bit.
    let words = k.div_ceil(64);
    let mut rows: Vec<(Vec<u64>, bool)> = Vec::new();
    for (i, j, rhs) in equations {
        let mut mask = vec![0u64; words];
        mask[i / 64] ^= 1 << (i % 64);
        mask[j / 64] ^= 1 << (j % 64);
        rows.push((mask, rhs));
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, var)
    for r in 0..rows.len() {
        // Reduce against existing pivots.
        for &(pr, pv) in &pivots {
            if rows[r].0[pv / 64] >> (pv % 64) & 1 == 1 {
                let (left, right) = if pr < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&a[pr], &mut b[0])
                } else {
                    unreachable!("pivot rows precede")
                };
                for w in 0..words {
                    right.0[w] ^= left.0[w];
                }
                right.1 ^= left.1;
            }
        }
        let var = (0..k).find(|&v| rows[r].0[v / 64] >> (v % 64) & 1 == 1);
        match var {
            Some(v) => pivots.push((r, v)),
            None => {
                if rows[r].1 {
                    return false; // 0 = 1
                }
            }
        }
    }
    true
}

/// Runs the full obstruction computation with the standard ε = 2.
pub fn obstruction_report(
    nerve: &Nerve,
    omega: &DiscreteCocycle,
    n_points: usize,
) -> Result<ObstructionReport> {
    let filtration = NerveFiltration::new(nerve, n_points)?;
    let death = cocycle_death(&filtration, omega, 2.0)?;
    let nerve_pd = nerve_persistence(&filtration)?;
    let span: Vec<PersistenceClass> = nerve_pd
        .classes
        .iter()
        .filter(|c| c.birth < death)
        .cloned()
        .collect();
    let (w1_trivial, w1_support) = first_sw_class(&filtration, omega, death)?;
    Ok(ObstructionReport {
        death,
        nerve_pd,
        span,
        w1_trivial,
        w1_support,
    })
}

/// Gauge transform Ω_ij ↦ G_i·Ω_ij·G_jᵀ for testing gauge invariance.
pub fn gauge_transform(
    omega: &DiscreteCocycle,
    gauges: &[DMatrix<f64>],
) -> Result<DiscreteCocycle> {
    let entries = omega
        .edges()
        .iter()
        .enumerate()
        .map(|(pos, &(i, j))| {
            let m = &gauges[i] * omega.matrix_at(pos).entries() * gauges[j].transpose();
            crate::frame::OrthogonalMatrix::new(m).map(|o| ((i, j), o))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteCocycle::new(omega.rank(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::NerveEdge;
    use crate::frame::OrthogonalMatrix;
    use approx::assert_abs_diff_eq;

    fn cycle_nerve(k: usize, weight: usize) -> Nerve {
        let mut edges: Vec<NerveEdge> = (0..k - 1)
            .map(|i| NerveEdge {
                i,
                j: i + 1,
                weight,
            })
            .collect();
        edges.push(NerveEdge {
            i: 0,
            j: k - 1,
            weight,
        });
        Nerve {
            vertex_count: k,
            edges,
        }
    }

    fn sign_cocycle(nerve: &Nerve, signs: &[i8]) -> DiscreteCocycle {
        let entries = nerve
            .edges
            .iter()
            .zip(signs)
            .map(|(e, &s)| {
                (
                    (e.i, e.j),
                    OrthogonalMatrix::new(DMatrix::from_element(1, 1, s as f64)).unwrap(),
                )
            })
            .collect();
        DiscreteCocycle::new(1, entries).unwrap()
    }

    #[test]
    fn filtration_births_monotone() {
        let nerve = cycle_nerve(6, 40);
        let filt = NerveFiltration::new(&nerve, 100).unwrap();
        for &(_, _, b) in &filt.edges {
            assert_abs_diff_eq!(b, 0.6, epsilon = 1e-12);
        }
        for &(i, j, k, b) in &filt.triangles {
            let edge_birth = |a: usize, c: usize| {
                filt.edges
                    .iter()
                    .find(|&&(x, y, _)| (x, y) == (a.min(c), a.max(c)))
                    .unwrap()
                    .2
            };
            assert!(b >= edge_birth(i, j).max(edge_birth(j, k)).max(edge_birth(i, k)));
        }
    }

    #[test]
    fn exact_cocycle_death_is_one() {
        // A triangle nerve with identity transitions: no violation anywhere.
        let nerve = Nerve {
            vertex_count: 3,
            edges: vec![
                NerveEdge { i: 0, j: 1, weight: 10 },
                NerveEdge { i: 1, j: 2, weight: 10 },
                NerveEdge { i: 0, j: 2, weight: 10 },
            ],
        };
        let omega = sign_cocycle(&nerve, &[1, 1, 1]);
        let filt = NerveFiltration::new(&nerve, 20).unwrap();
        assert_eq!(cocycle_death(&filt, &omega, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn violating_triangle_sets_death() {
        let nerve = Nerve {
            vertex_count: 3,
            edges: vec![
                NerveEdge { i: 0, j: 1, weight: 7 },
                NerveEdge { i: 1, j: 2, weight: 7 },
                NerveEdge { i: 0, j: 2, weight: 7 },
            ],
        };
        // Sign-inconsistent triangle: Ω_01·Ω_12 = −Ω_02, operator defect 2.
        let omega = sign_cocycle(&nerve, &[1, 1, -1]);
        let filt = NerveFiltration::new(&nerve, 10).unwrap();
        let death = cocycle_death(&filt, &omega, 2.0).unwrap();
        assert_abs_diff_eq!(death, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn cycle_without_triangles_death_one() {
        let nerve = cycle_nerve(8, 3);
        let omega = sign_cocycle(&nerve, &[1, -1, 1, 1, -1, 1, 1, 1]);
        let filt = NerveFiltration::new(&nerve, 10).unwrap();
        assert_eq!(cocycle_death(&filt, &omega, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn cycle_nerve_single_h1_class() {
        let nerve = cycle_nerve(16, 60);
        let filt = NerveFiltration::new(&nerve, 100).unwrap();
        let pd = nerve_persistence(&filt).unwrap();
        assert_eq!(pd.classes.len(), 1);
        let c = pd.classes[0];
        assert!(c.infinite);
        assert_abs_diff_eq!(c.birth, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn tree_nerve_empty_h1() {
        let nerve = Nerve {
            vertex_count: 5,
            edges: (0..4).map(|i| NerveEdge { i: 0, j: i + 1, weight: 2 }).collect(),
        };
        let filt = NerveFiltration::new(&nerve, 10).unwrap();
        let pd = nerve_persistence(&filt).unwrap();
        assert!(pd.classes.is_empty());
    }

    #[test]
    fn filled_triangle_class_dies_at_triangle_birth() {
        // Hand-built filtration with the triangle strictly after its last
        // edge: the loop born at the last edge dies exactly at the triangle.
        let filt = NerveFiltration {
            vertex_count: 3,
            edges: vec![(0, 1, 0.2), (1, 2, 0.4), (0, 2, 0.6)],
            triangles: vec![(0, 1, 2, 0.9)],
        };
        let pd = nerve_persistence(&filt).unwrap();
        assert_eq!(pd.classes.len(), 1);
        let c = pd.classes[0];
        assert!(!c.infinite);
        assert_abs_diff_eq!(c.birth, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(c.death, 0.9, epsilon = 1e-12);
        // Under the nerve convention the triangle enters with its last edge,
        // so the same complex built from weights has no dim-1 class at all
        // (zero persistence is dropped).
        let nerve = Nerve {
            vertex_count: 3,
            edges: vec![
                NerveEdge { i: 0, j: 1, weight: 8 },
                NerveEdge { i: 1, j: 2, weight: 6 },
                NerveEdge { i: 0, j: 2, weight: 4 },
            ],
        };
        let via_weights = NerveFiltration::new(&nerve, 10).unwrap();
        assert!(nerve_persistence(&via_weights).unwrap().classes.is_empty());
    }

    #[test]
    fn all_positive_dets_trivial() {
        let nerve = cycle_nerve(8, 4);
        let omega = sign_cocycle(&nerve, &[1; 8]);
        let report = obstruction_report(&nerve, &omega, 10).unwrap();
        assert!(report.w1_trivial);
        assert!(report.w1_support.is_empty());
    }

    #[test]
    fn odd_negative_cycle_nontrivial() {
        for k in 4..=16 {
            let nerve = cycle_nerve(k, 4);
            let mut signs = vec![1i8; k];
            signs[k / 2] = -1;
            let omega = sign_cocycle(&nerve, &signs);
            let report = obstruction_report(&nerve, &omega, 10).unwrap();
            assert!(!report.w1_trivial, "k = {k}");
            assert_eq!(report.w1_support.len(), 1, "k = {k}");
            // Exhaustive oracle over all vertex assignments.
            let mut any = false;
            for assign in 0..(1u32 << k) {
                let ok = nerve.edges.iter().zip(&signs).all(|(e, &s)| {
                    let gi = assign >> e.i & 1 == 1;
                    let gj = assign >> e.j & 1 == 1;
                    (gi ^ gj) == (s < 0)
                });
                if ok {
                    any = true;
                    break;
                }
            }
            assert!(!any, "oracle found a coboundary for k = {k}");
        }
    }

    #[test]
    fn even_negative_cycle_trivial() {
        let k = 10;
        let nerve = cycle_nerve(k, 4);
        let mut signs = vec![1i8; k];
        signs[2] = -1;
        signs[7] = -1;
        let omega = sign_cocycle(&nerve, &signs);
        let report = obstruction_report(&nerve, &omega, 10).unwrap();
        assert!(report.w1_trivial);
    }

    #[test]
    fn gauge_invariance_small() {
        use crate::linalg::random_frame;
        use crate::rng::{SeedSplitter, Stream};
        let nerve = cycle_nerve(9, 4);
        let mut signs = vec![1i8; 9];
        signs[4] = -1;
        let omega = sign_cocycle(&nerve, &signs);
        let base = obstruction_report(&nerve, &omega, 12).unwrap();
        let mut rng = SeedSplitter::new(3).stream(Stream::Alignment);
        for _ in 0..25 {
            let gauges: Vec<DMatrix<f64>> = (0..9)
                .map(|_| random_frame(1, 1, false, &mut rng).unwrap().into_entries())
                .collect();
            let transformed = gauge_transform(&omega, &gauges).unwrap();
            let report = obstruction_report(&nerve, &transformed, 12).unwrap();
            assert_eq!(report.w1_trivial, base.w1_trivial);
        }
    }

    #[test]
    fn inconsistent_cochain_rejected() {
        // A filled triangle with an odd number of negative edges present
        // below death: the cochain is not closed.
        let nerve = Nerve {
            vertex_count: 3,
            edges: vec![
                NerveEdge { i: 0, j: 1, weight: 5 },
                NerveEdge { i: 1, j: 2, weight: 5 },
                NerveEdge { i: 0, j: 2, weight: 5 },
            ],
        };
        let omega = sign_cocycle(&nerve, &[1, 1, -1]);
        let filt = NerveFiltration::new(&nerve, 10).unwrap();
        // Force death = 1 so the violating triangle is included.
        assert!(matches!(
            first_sw_class(&filt, &omega, 1.1),
            Err(Error::InconsistentCocycle)
        ));
    }
}
