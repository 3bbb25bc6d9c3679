//! Persistence diagrams and prominence scoring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One persistent class. `death` holds the cap value (filtration threshold)
/// when `infinite` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceClass {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub infinite: bool,
}

impl PersistenceClass {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// A multiset of (dimension, birth, death) triples over a prime field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub field_char: u32,
    pub classes: Vec<PersistenceClass>,
}

impl PersistenceDiagram {
    pub fn new(field_char: u32, classes: Vec<PersistenceClass>) -> Result<Self> {
        if field_char != 2 && field_char != 3 {
            return Err(Error::InvalidArgument(format!(
                "field characteristic must be 2 or 3, got {field_char}"
            )));
        }
        for c in &classes {
            if !c.infinite && c.death <= c.birth {
                return Err(Error::InvalidArgument(format!(
                    "finite class in dim {} with death {} <= birth {}",
                    c.dim, c.death, c.birth
                )));
            }
        }
        Ok(PersistenceDiagram {
            field_char,
            classes,
        })
    }

    pub fn classes_in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistenceClass> {
        self.classes.iter().filter(move |c| c.dim == dim)
    }

    /// Classes sorted by (dim, birth, death) for stable comparison.
    pub fn sorted(&self) -> Vec<PersistenceClass> {
        let mut out = self.classes.clone();
        out.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
                .then(a.infinite.cmp(&b.infinite))
        });
        out
    }
}

/// Sorted persistences of one dimension together with consecutive gap
/// ratios, quantifying how sharply the leading classes stand out.
#[derive(Clone, Debug, Serialize)]
pub struct ProminenceScore {
    pub persistences: Vec<f64>,
    pub gap_ratios: Vec<f64>,
}

/// Prominence data for `dim`, with infinite deaths clipped to `clip`
/// (normally the enclosing radius of the filtration).
pub fn prominence(pd: &PersistenceDiagram, dim: usize, clip: f64) -> ProminenceScore {
    let mut persistences: Vec<f64> = pd
        .classes_in_dim(dim)
        .map(|c| {
            let death = if c.infinite { clip } else { c.death.min(clip) };
            (death - c.birth).max(0.0)
        })
        .collect();
    persistences.sort_by(|a, b| b.total_cmp(a));
    let gap_ratios = persistences
        .windows(2)
        .map(|w| if w[1] > 0.0 { w[0] / w[1] } else { f64::INFINITY })
        .collect();
    ProminenceScore {
        persistences,
        gap_ratios,
    }
}

impl ProminenceScore {
    /// Number of leading classes separated from the rest: the smallest j such
    /// that p_j ≥ bar · max(p_{j+1}, floor), where `floor` is an absolute
    /// noise level (a fraction of the enclosing radius) and a missing
    /// successor counts as the floor. Zero when no prefix separates.
    pub fn prominent_count(&self, bar: f64, floor: f64) -> usize {
        for (j, &p) in self.persistences.iter().enumerate() {
            let next = self
                .persistences
                .get(j + 1)
                .copied()
                .unwrap_or(0.0)
                .max(floor);
            if p >= bar * next {
                return j + 1;
            }
        }
        0
    }

    /// Ratio of the largest persistence to the second largest.
    pub fn top_gap(&self) -> f64 {
        self.gap_ratios.first().copied().unwrap_or(f64::INFINITY)
    }
}
