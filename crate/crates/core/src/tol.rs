//! Comparison tolerances for the floating-point paths.

use serde::{Deserialize, Serialize};

/// Slack for bounds that pass through a rescaling by a `p`-th root.
pub const BOUND: f64 = 1e-9;

/// Relative slack for inequalities evaluated directly in `f64`.
pub const RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub bound: f64,
    pub relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { bound: BOUND, relative: RELATIVE }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        if self.bound > 0.0 && self.relative > 0.0 && self.bound.is_finite() && self.relative.is_finite() {
            Ok(())
        } else {
            Err(crate::Error::Parameter("tolerances must be positive and finite".into()))
        }
    }
}
