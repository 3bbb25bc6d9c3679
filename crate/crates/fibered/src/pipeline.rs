//! The end-to-end pipeline: cover, nerve, charts, reach, cocycles,
//! synchronization when the square case applies, alignment, and assembly,
//! with target-dimension selection driven by the first Stiefel–Whitney
//! obstruction when requested.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::assembly::{assemble, base_angles, cut_unfold, Embedding, Provenance};
use crate::bundle::{
    align_fibers, choose_target_dimension, estimate_omega, estimate_reach, estimate_theta,
    synchronize_signs, AlignmentResult, DiscreteCocycle, SyncSigns,
};
use crate::charts::{
    classical_mds, fiber_coordinates, normalize_fibers, submatrix, tangent_and_normal_frames,
    tangent_projections, LocalChart, NormalizationScale,
};
use crate::config::PipelineConfig;
use crate::cover::{build_cover, build_nerve, partition_of_unity, Cover, Nerve, PartitionOfUnity};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::obstruction::{obstruction_report, ObstructionReport};
use crate::rng::{SeedSplitter, Stream};

/// How the target dimension is determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimensionRule {
    /// From the first Stiefel–Whitney obstruction (circular base only):
    /// D = r + 1 when trivial, r + 2 when not.
    Auto,
    /// User-supplied.
    Manual(usize),
    /// Interval base from cut-unfold: D = r + 1 unconditionally.
    CutUnfold,
}

/// Knobs that are not part of the core parameter set.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub dimension_rule: DimensionRule,
    /// Start index of the greedy cover traversal.
    pub cover_start: usize,
    /// Manual reach override, e.g. for flat bases.
    pub tau_override: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            dimension_rule: DimensionRule::Auto,
            cover_start: 0,
            tau_override: None,
        }
    }
}

/// Everything a pipeline run produces.
#[derive(Debug)]
pub struct PipelineOutput {
    pub embedding: Embedding,
    pub cover: Cover,
    pub partition: PartitionOfUnity,
    pub nerve: Nerve,
    pub charts: Vec<LocalChart>,
    pub omega: DiscreteCocycle,
    /// Θ as used by the alignment (post-synchronization in the square case).
    pub theta: DiscreteCocycle,
    pub sync: Option<SyncSigns>,
    pub alignment: AlignmentResult,
    pub tau: f64,
    pub target_dim: usize,
    pub fiber_rank: usize,
    /// Set when the obstruction computation ran (automatic D-selection).
    pub w1_trivial: Option<bool>,
    pub obstruction: Option<ObstructionReport>,
    pub normalization: NormalizationScale,
    pub warnings: Vec<String>,
}

/// Fallback reach for flat bases (cut-unfold intervals), as a fraction of
/// the base diameter measured over the cover centers.
const FLAT_BASE_TAU_FRACTION: f64 = 0.25;

/// Zero-pads the columns of `m` up to `dim`.
pub fn pad_columns(m: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    assert!(dim >= m.ncols());
    let mut out = DMatrix::zeros(m.nrows(), dim);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

/// Runs the full pipeline on a dataset whose base map is already in place.
pub fn run(dataset: &Dataset, config: &PipelineConfig, options: &RunOptions) -> Result<PipelineOutput> {
    config.validate()?;
    let n = dataset.n_points();
    let base_in = dataset.base_image();
    let base_dim = dataset.base_dim();
    let r = config.fiber_rank();
    if config.k > n {
        return Err(Error::InvalidConfig(format!(
            "k = {} exceeds the dataset size {n}",
            config.k
        )));
    }

    // Cover, partition of unity, nerve.
    let cover = build_cover(base_in, config.k, options.cover_start)
        .map_err(|e| e.at_stage("cover construction"))?;
    let partition =
        partition_of_unity(&cover, base_in).map_err(|e| e.at_stage("partition of unity"))?;
    let nerve = build_nerve(&cover);

    // Per-chart local models in the input base space.
    let mut warnings = Vec::new();
    let mut local_coords = Vec::with_capacity(config.k);
    let mut regressions = Vec::with_capacity(config.k);
    let mut kernels = Vec::with_capacity(config.k);
    let mut fibers = Vec::with_capacity(config.k);
    let mut residuals = Vec::with_capacity(config.k);
    for i in 0..config.k {
        let members = &cover.membership[i];
        let sub = submatrix(dataset.distances(), members);
        let coords = classical_mds(&sub, config.d).map_err(|e| e.at_stage("local charts"))?;
        let member_base = DMatrix::from_fn(members.len(), base_dim, |row, c| {
            base_in[(members[row], c)]
        });
        let (tangent_in, _) = tangent_and_normal_frames(&member_base, config.e)
            .map_err(|e| e.at_stage("local charts"))?;
        let t = tangent_projections(base_in, members, &cover.center_points[i], &tangent_in);
        let fit = fiber_coordinates(&coords, &t, r).map_err(|e| e.at_stage("local charts"))?;
        if !fit.kernel_ok {
            warnings.push(format!(
                "chart {i}: fiber not orthogonal to base (residual {:.3e})",
                fit.kernel_residual
            ));
        }
        local_coords.push(coords);
        regressions.push(fit.regression);
        kernels.push(fit.kernel_frame);
        fibers.push(fit.fiber_coords);
        residuals.push(fit.kernel_residual);
    }

    let (normalized, normalization) = normalize_fibers(&fibers, config.normalization_mode)
        .map_err(|e| e.at_stage("fiber normalization"))?;

    // Ω before the target dimension is fixed: the obstruction needs it.
    let (omega, omega_warnings) = estimate_omega(&cover.membership, &normalized, &nerve)
        .map_err(|e| e.at_stage("cocycle estimation"))?;
    warnings.extend(omega_warnings);

    // Target dimension.
    let mut w1_trivial = None;
    let mut obstruction = None;
    let target_dim = match options.dimension_rule {
        DimensionRule::Manual(dim) => dim,
        DimensionRule::CutUnfold => choose_target_dimension(r, config.e, true, true)
            .map_err(|e| e.at_stage("dimension selection"))?,
        DimensionRule::Auto => {
            if config.e != 1 {
                return Err(Error::ObstructionNeedsCircle(config.e)
                    .at_stage("dimension selection"));
            }
            let report =
                obstruction_report(&nerve, &omega, n).map_err(|e| e.at_stage("obstruction"))?;
            let trivial = report.w1_trivial;
            w1_trivial = Some(trivial);
            obstruction = Some(report);
            choose_target_dimension(r, config.e, trivial, false)
                .map_err(|e| e.at_stage("dimension selection"))?
        }
    };
    if target_dim < base_dim {
        return Err(Error::InvalidConfig(format!(
            "target dimension {target_dim} is below the base map dimension {base_dim}"
        )));
    }
    if target_dim < config.e + r {
        return Err(Error::InvalidConfig(format!(
            "target dimension {target_dim} cannot hold e + r = {} directions",
            config.e + r
        )));
    }

    // Frames in the target space.
    let base = pad_columns(base_in, target_dim);
    let mut charts = Vec::with_capacity(config.k);
    for i in 0..config.k {
        let members = cover.membership[i].clone();
        let member_base =
            DMatrix::from_fn(members.len(), target_dim, |row, c| base[(members[row], c)]);
        let (tangent, normal) = tangent_and_normal_frames(&member_base, config.e)
            .map_err(|e| e.at_stage("frame estimation"))?;
        charts.push(LocalChart {
            index: i,
            members,
            local_coords: std::mem::take(&mut local_coords[i]),
            regression: std::mem::take(&mut regressions[i]),
            kernel_frame: kernels[i].clone(),
            fiber_coords: std::mem::take(&mut fibers[i]),
            normalized_fiber: normalized[i].clone(),
            tangent_frame: tangent,
            normal_frame: normal,
            kernel_residual: residuals[i],
        });
    }

    // Reach over the padded centers.
    let padded_cover = Cover {
        centers: cover.centers.clone(),
        center_points: cover
            .center_points
            .iter()
            .map(|b| {
                let mut v = nalgebra::DVector::zeros(target_dim);
                for c in 0..b.len() {
                    v[c] = b[c];
                }
                v
            })
            .collect(),
        cover_radius: cover.cover_radius,
        membership: cover.membership.clone(),
    };
    let tangent_frames: Vec<_> = charts.iter().map(|c| c.tangent_frame.clone()).collect();
    let tau = match options.tau_override {
        Some(t) => t,
        None => match estimate_reach(&padded_cover, &tangent_frames) {
            Ok(t) => t,
            Err(Error::ReachUndefined)
                if options.dimension_rule == DimensionRule::CutUnfold =>
            {
                // Flat interval base: no curvature information at all. Scale
                // the fibers to a fraction of the base diameter instead.
                let mut diameter = 0.0f64;
                for a in 0..padded_cover.center_points.len() {
                    for b in (a + 1)..padded_cover.center_points.len() {
                        diameter = diameter.max(
                            (&padded_cover.center_points[a] - &padded_cover.center_points[b])
                                .norm(),
                        );
                    }
                }
                warnings.push(format!(
                    "reach undefined on the flat base; using {FLAT_BASE_TAU_FRACTION} of the \
                     base diameter"
                ));
                FLAT_BASE_TAU_FRACTION * diameter
            }
            Err(e) => return Err(e.at_stage("reach estimation")),
        },
    };

    // Θ, synchronization in the square case, alignment.
    let normal_frames: Vec<_> = charts.iter().map(|c| c.normal_frame.clone()).collect();
    let theta = estimate_theta(&normal_frames, &nerve)
        .map_err(|e| e.at_stage("cocycle estimation"))?;
    let square = target_dim == config.e + r;
    let (sync, theta) = if square {
        let (signs, updated) = synchronize_signs(&nerve, &omega, &theta)
            .map_err(|e| e.at_stage("synchronization"))?;
        (Some(signs), updated)
    } else {
        (None, theta)
    };
    let mut rng = SeedSplitter::new(config.seed).stream(Stream::Alignment);
    let alignment = align_fibers(&nerve, &omega, &theta, config.n_iter, square, &mut rng)
        .map_err(|e| e.at_stage("alignment"))?;

    // Assembly.
    let provenance = Provenance {
        config_hash: config.config_hash(),
        tau,
        fiber_scale: config.fiber_scale,
        target_dim,
    };
    let embedding = assemble(
        &base,
        &charts,
        &partition,
        &alignment.frames,
        tau,
        config.fiber_scale,
        provenance,
    )
    .map_err(|e| e.at_stage("assembly"))?;

    Ok(PipelineOutput {
        embedding,
        cover,
        partition,
        nerve,
        charts,
        omega,
        theta,
        sync,
        alignment,
        tau,
        target_dim,
        fiber_rank: r,
        w1_trivial,
        obstruction,
        normalization,
        warnings,
    })
}

/// Cut-unfold driver: reads circle angles off the base map, cuts at
/// `cut_point`, and re-runs the pipeline over the interval base with
/// D = r + 1. Returns the output plus the cut-adjacency mask.
pub fn run_cut_unfold(
    dataset: &Dataset,
    config: &PipelineConfig,
    options: &RunOptions,
    cut_point: f64,
    band: f64,
) -> Result<(PipelineOutput, Vec<bool>)> {
    let angles = base_angles(dataset.base_image())?;
    let (interval_base, mask) = cut_unfold(&angles, cut_point, band);
    let cut_dataset = dataset.with_base_image(interval_base)?;
    let cut_options = RunOptions {
        dimension_rule: DimensionRule::CutUnfold,
        ..*options
    };
    let output = run(&cut_dataset, config, &cut_options)?;
    Ok((output, mask))
}

/// The diagnostics JSON payload written next to each embedding.
#[derive(Debug, Serialize)]
pub struct RunDiagnostics<'a> {
    pub config: &'a PipelineConfig,
    pub tau: f64,
    pub target_dim: usize,
    pub w1_trivial: Option<bool>,
    pub objective_trace: &'a [(usize, f64)],
    pub runtime_ms: u64,
    pub final_objective: f64,
    pub fiber_rank: usize,
    pub normalization: &'a NormalizationScale,
    pub obstruction: Option<&'a ObstructionReport>,
    pub warnings: &'a [String],
}

impl PipelineOutput {
    /// Assembles the diagnostics payload for this run.
    pub fn diagnostics<'a>(
        &'a self,
        config: &'a PipelineConfig,
        runtime_ms: u64,
    ) -> RunDiagnostics<'a> {
        RunDiagnostics {
            config,
            tau: self.tau,
            target_dim: self.target_dim,
            w1_trivial: self.w1_trivial,
            objective_trace: &self.alignment.objective_trace,
            runtime_ms,
            final_objective: self.alignment.final_objective,
            fiber_rank: self.fiber_rank,
            normalization: &self.normalization,
            obstruction: self.obstruction.as_ref(),
            warnings: &self.warnings,
        }
    }
}
