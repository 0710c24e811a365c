//! Gaussian states over labeled bosonic modes and the symplectic channels,
//! homodyne conditioning and feedback displacements acting on them.
//!
//! Conventions used throughout the crate:
//! * quadrature ordering is `(X1, P1, X2, P2, ...)`,
//! * `[X, P] = i`, so the vacuum variance is 1/2 per quadrature.

mod channel;
mod metrics;
mod state;

pub mod linalg;

pub use channel::GaussianChannel;
pub use metrics::{eof_from_concurrence, eof_from_epr, epr_variance, gaussian_fidelity};
pub use state::{GaussianState, HomodyneOutcome, MeasurementRecord, Quadrature};

/// Tolerance below which a measured quadrature counts as degenerate.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

/// Slack allowed on the uncertainty bound `nu >= 1/2`.
pub const PHYSICALITY_TOL: f64 = 1e-9;
