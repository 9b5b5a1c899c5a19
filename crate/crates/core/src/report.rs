//! Verification records: one entry per identity/theorem check, serialized to
//! JSON by the CLI and the acceptance suite.

use serde::{Deserialize, Serialize};

/// Repository-wide residual convention:
/// `|lhs - rhs| / max(1, |lhs|, |rhs|)`.
pub fn rel_residual(lhs: num_complex::Complex64, rhs: num_complex::Complex64) -> f64 {
    (lhs - rhs).norm() / 1.0f64.max(lhs.norm()).max(rhs.norm())
}

/// Same convention for matrix comparisons, in the entrywise max-norm.
pub fn rel_matrix_residual(lhs: &crate::cmatrix::Matrix2, rhs: &crate::cmatrix::Matrix2) -> f64 {
    (*lhs - *rhs).max_norm() / 1.0f64.max(lhs.max_norm()).max(rhs.max_norm())
}

/// And for the 4x4 objects of the reflection equations.
pub fn rel_matrix4_residual(lhs: &crate::cmatrix::Matrix4, rhs: &crate::cmatrix::Matrix4) -> f64 {
    (lhs.clone() - rhs.clone()).max_norm() / 1.0f64.max(lhs.max_norm()).max(rhs.max_norm())
}

/// One identity/theorem check: sample counts, worst residual, verdict.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerificationRecord {
    pub suite: String,
    pub tag: String,
    pub samples_attempted: u64,
    pub samples_accepted: u64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    /// Milliseconds; excluded from determinism comparisons.
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params_digest: Option<String>,
}

impl VerificationRecord {
    pub fn new(
        suite: &str,
        tag: &str,
        attempted: u64,
        accepted: u64,
        max_residual: f64,
        tolerance: f64,
        seed: u64,
    ) -> Self {
        VerificationRecord {
            suite: suite.to_string(),
            tag: tag.to_string(),
            samples_attempted: attempted,
            samples_accepted: accepted,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance && accepted > 0,
            seed,
            wall_time_ms: 0.0,
            params_digest: None,
        }
    }

    pub fn with_digest(mut self, digest: String) -> Self {
        self.params_digest = Some(digest);
        self
    }

    /// Invariants demanded of every record.
    pub fn is_consistent(&self) -> bool {
        self.samples_accepted <= self.samples_attempted
            && (self.pass == (self.max_residual <= self.tolerance && self.samples_accepted > 0))
    }
}

/// FNV-1a over the parameter bytes; stable across platforms and runs, used
/// for the params_digest field of gauge/theorem records.
pub fn params_digest(values: &[num_complex::Complex64]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    let mut eat = |x: f64| {
        for b in x.to_le_bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    };
    for v in values {
        eat(v.re);
        eat(v.im);
    }
    format!("{hash:016x}")
}

/// Strip timing fields for byte-identical determinism comparisons.
pub fn clear_timings(records: &mut [VerificationRecord]) {
    for r in records.iter_mut() {
        r.wall_time_ms = 0.0;
    }
}
