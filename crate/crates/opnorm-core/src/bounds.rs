//! Two-sided bounds on an operator norm, tagged with how they were obtained.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsMethod {
    /// Potential sandwich from the fixed-point iteration.
    Sandwich,
    /// Two-segment interpolation between the exactly computable anchors.
    Interpolation,
    /// Best value found (or proven) by an oracle search.
    Oracle,
}

/// `lower <= ‖A‖_{q↦p} <= upper`, with provenance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CertifiedBounds {
    pub lower: f64,
    pub upper: f64,
    pub method: BoundsMethod,
}

impl CertifiedBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}
