//! Final representation: the partition-weighted blend of per-chart fiber
//! offsets around the base map, and the cut-unfold base transformation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::charts::LocalChart;
use crate::cover::PartitionOfUnity;
use crate::error::{Error, Result};
use crate::frame::Frame;

/// Where an embedding came from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub tau: f64,
    pub fiber_scale: f64,
    pub target_dim: usize,
}

/// The assembled output coordinates, one row per dataset point.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub coords: DMatrix<f64>,
    pub provenance: Provenance,
}

/// Assembles the embedding
/// x ↦ π(x) + fiber_scale·τ·Σ_i ρ_i(x)·α_i·Φ_i·f̄_i(x),
/// which is the partition-weighted blend of the per-chart formulas since
/// the partition rows sum to 1.
pub fn assemble(
    base: &DMatrix<f64>,
    charts: &[LocalChart],
    partition: &PartitionOfUnity,
    frames: &[Frame],
    tau: f64,
    fiber_scale: f64,
    provenance: Provenance,
) -> Result<Embedding> {
    let n = base.nrows();
    let dim = base.ncols();
    let scale = fiber_scale * tau;
    let mut coords = DMatrix::zeros(n, dim);
    // Per chart, the offset direction map α_i·Φ_i : R^r → R^D.
    let offset_maps: Vec<DMatrix<f64>> = charts
        .iter()
        .zip(frames)
        .map(|(c, phi)| c.normal_frame.entries() * phi.entries())
        .collect();
    for x in 0..n {
        let row = partition.row(x);
        assert!(
            !row.is_empty(),
            "point {x} has empty chart membership; cover invariant violated"
        );
        for c in 0..dim {
            coords[(x, c)] = base[(x, c)];
        }
        for &(set, rho) in row {
            let chart = &charts[set];
            let r = chart
                .row_of(x)
                .expect("partition support lies inside chart membership");
            let map = &offset_maps[set];
            for c in 0..dim {
                let mut offset = 0.0;
                for f in 0..chart.normalized_fiber.ncols() {
                    offset += map[(c, f)] * chart.normalized_fiber[(r, f)];
                }
                coords[(x, c)] += scale * rho * offset;
            }
        }
        for c in 0..dim {
            if !coords[(x, c)].is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite embedding coordinate at point {x}"
                )));
            }
        }
    }
    Ok(Embedding { coords, provenance })
}

/// Cut-unfold of a circular base: shifts angles (values mod 1) so that
/// `cut_point` maps to 0, returning interval coordinates in [0, 1) as an
/// n×1 base matrix and a mask of points within `band` of the cut, for
/// downstream gluing annotation.
pub fn cut_unfold(base_angles: &[f64], cut_point: f64, band: f64) -> (DMatrix<f64>, Vec<bool>) {
    let n = base_angles.len();
    let mut coords = DMatrix::zeros(n, 1);
    let mut mask = vec![false; n];
    for (i, &angle) in base_angles.iter().enumerate() {
        let shifted = (angle - cut_point).rem_euclid(1.0);
        coords[(i, 0)] = shifted;
        mask[i] = shifted < band || shifted > 1.0 - band;
    }
    (coords, mask)
}

/// Angles in [0, 1) of a circular base map read off its first two columns.
pub fn base_angles(base: &DMatrix<f64>) -> Result<Vec<f64>> {
    if base.ncols() < 2 {
        return Err(Error::InvalidArgument(
            "circular base angles need at least two base columns".into(),
        ));
    }
    Ok((0..base.nrows())
        .map(|i| {
            let theta = base[(i, 1)].atan2(base[(i, 0)]);
            (theta / (2.0 * std::f64::consts::PI)).rem_euclid(1.0)
        })
        .collect())
}
