//! Error type shared by every evaluation routine in the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum EllaxError {
    /// Torus construction rejected: the nome series are only guaranteed to
    /// converge within the hard term cap for Im tau >= 0.05.
    #[error("invalid torus: Im tau = {im_tau} (require Im tau >= 0.05)")]
    InvalidTorus { im_tau: f64 },

    /// A theta tail hit the hard term cap before reaching the relative
    /// truncation tolerance.
    #[error("theta series did not converge within the term cap")]
    NonConvergent,

    /// An argument landed within the pole tolerance of the period lattice
    /// (after lattice reduction).
    #[error("argument {arg} is within {dist:e} of the period lattice")]
    NearPole { arg: Complex64, dist: f64 },

    /// A 2x2 inversion was requested for a matrix with |det| below
    /// 1e-10 * norm^2.
    #[error("matrix is numerically singular (|det| = {det_abs:e})")]
    Singular { det_abs: f64 },

    /// A lambda/phi_alpha(z) term was requested at a zero of phi_alpha.
    #[error("zero denominator in a 1/phi_alpha term")]
    ZeroDenominator,

    /// nu_breve_0 (or its barred copy) vanished where a formula divides by it.
    #[error("coupling nu_breve_0 vanishes")]
    ZeroCoupling,

    /// A trajectory came too close to a pole; integration aborted at `step`.
    #[error("trajectory approached a pole at step {step}")]
    PoleApproach { step: usize },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, EllaxError>;
