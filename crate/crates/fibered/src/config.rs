//! Pipeline configuration.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// How normalized fiber coordinates are scaled into the unit ball.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// One scale for all charts: max fiber norm over every chart and point.
    /// Per-chart scaling would break the fiberwise-isometry premise behind
    /// the transition-map fit and bias the cocycle estimate, so this is the
    /// default.
    #[default]
    Global,
    /// Each chart scaled by its own max fiber norm.
    PerChart,
}

fn default_fiber_scale() -> f64 {
    0.5
}

fn default_n_iter() -> usize {
    1000
}

/// Parameters of a pipeline run.
///
/// `r` (fiber rank) defaults to `d − e` and `target_dim` is selected from
/// the first Stiefel–Whitney obstruction when left unset.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Number of sets in the cover of the base.
    pub k: usize,
    /// Intrinsic dimension of the base.
    pub e: usize,
    /// Local MDS target dimension (intrinsic dimension of the data).
    pub d: usize,
    /// Fiber rank; derived as `d − e` when unset.
    #[serde(default)]
    pub r: Option<usize>,
    /// Target embedding dimension; obstruction-driven when unset.
    #[serde(default, alias = "D")]
    pub target_dim: Option<usize>,
    /// The constant c in the assembly formula, in (0, 1).
    #[serde(default = "default_fiber_scale")]
    pub fiber_scale: f64,
    /// Iterations of the fiber alignment sampler.
    #[serde(default = "default_n_iter")]
    pub n_iter: usize,
    /// Master seed for all stochastic subroutines.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub normalization_mode: NormalizationMode,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fiber_scale > 0.0 && self.fiber_scale < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fiber_scale must lie in (0, 1), got {}",
                self.fiber_scale
            )));
        }
        if self.d < self.e {
            return Err(Error::InvalidConfig(format!(
                "d must be at least e, got d = {} < e = {}",
                self.d, self.e
            )));
        }
        if self.k < 2 {
            return Err(Error::InvalidConfig(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        if self.e == 0 {
            return Err(Error::InvalidConfig("e must be at least 1".into()));
        }
        if self.n_iter == 0 {
            return Err(Error::InvalidConfig("n_iter must be at least 1".into()));
        }
        match self.r {
            Some(0) => return Err(Error::FiberRankZero),
            Some(r) if r > self.d => {
                return Err(Error::InvalidConfig(format!(
                    "fiber rank r = {r} exceeds local dimension d = {}",
                    self.d
                )))
            }
            _ => {}
        }
        if self.r.is_none() && self.d == self.e {
            return Err(Error::FiberRankZero);
        }
        Ok(())
    }

    /// Fiber rank: user-set or the default `d − e`.
    pub fn fiber_rank(&self) -> usize {
        self.r.unwrap_or(self.d - self.e)
    }

    /// Stable short hash of the configuration, recorded in provenance.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
