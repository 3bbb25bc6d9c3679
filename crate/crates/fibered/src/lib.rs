//! Fiberwise dimensionality reduction.
//!
//! Given a dataset with a distance matrix and an initial low-dimensional
//! base map capturing its large-scale topology, this crate estimates a
//! discrete vector bundle over the base, aligns local linear fibers
//! globally, and assembles a topologically faithful embedding in a target
//! dimension selected through first Stiefel–Whitney obstructions. It also
//! carries its own validation machinery: geodesic metric estimation,
//! Vietoris–Rips persistent homology over Z/2 and Z/3, and embedding
//! distortion diagnostics.

pub mod assembly;
pub mod bundle;
pub mod charts;
pub mod config;
pub mod cover;
pub mod data;
pub mod diagram;
pub mod error;
pub mod frame;
pub mod generators;
pub mod linalg;
pub mod obstruction;
pub mod pipeline;
pub mod rng;

pub use config::{NormalizationMode, PipelineConfig};
pub use data::Dataset;
pub use diagram::{PersistenceClass, PersistenceDiagram};
pub use error::{Error, Result};
pub use frame::{Frame, OrthogonalMatrix};
