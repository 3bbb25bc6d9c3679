//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by dataset loading, pipeline stages, and validation tools.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: String,
        row: usize,
        message: String,
    },

    #[error("asymmetric distance matrix: |d[{i}][{j}] - d[{j}][{i}]| = {delta:.3e} exceeds 1e-9")]
    Asymmetric { i: usize, j: usize, delta: f64 },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not an orthonormal frame: max deviation {deviation:.3e} exceeds 1e-9")]
    NotAFrame { deviation: f64 },

    #[error("degenerate frame projection")]
    DegenerateFrameProjection,

    #[error("degenerate cover: greedy radius is zero")]
    DegenerateCover,

    #[error("degenerate chart: zero covariance in set {index}")]
    DegenerateChart { index: usize },

    #[error("fiber rank zero: d = e leaves no fiber directions")]
    FiberRankZero,

    #[error("flat fiber: all fiber coordinates are zero")]
    FlatFiber,

    #[error("reach undefined (flat or degenerate)")]
    ReachUndefined,

    #[error("nerve disconnected; synchronization undefined")]
    NerveDisconnected,

    #[error("inconsistent cocycle; decrease death or increase overlaps")]
    InconsistentCocycle,

    #[error("k-NN graph disconnected; component sizes: {0:?}")]
    GraphDisconnected(Vec<usize>),

    #[error("duplicate-only point: index {0} is at distance zero from every other point")]
    DuplicateOnlyPoint(usize),

    #[error("fiber alignment degenerate: {0} consecutive rank-deficient convex combinations")]
    AlignmentDegenerate(usize),

    #[error(
        "obstruction-driven dimension selection needs a circular base (e = 1); \
         got e = {0}: set the target dimension manually with --dim"
    )]
    ObstructionNeedsCircle(usize),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches the pipeline stage that produced the error.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The underlying error with stage wrappers stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
