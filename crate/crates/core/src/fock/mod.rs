//! Truncated photon-number-space simulation of the probabilistic
//! (photon-counting) protocols: write pulses, heralded entanglement,
//! entanglement swapping, conditional photon statistics and two-qubit
//! entanglement measures.

mod density;
mod herald;
mod state;
mod two_mode;

pub use density::{concurrence, DensityMatrix, DensityTwoQubit};
pub use herald::{entanglement_swap, herald_entangle, DetectorModel, DetectorPort, HeraldOutcome};
pub use state::FockVec;
pub use two_mode::{dlcz_write, g2_conditional, g2_of_distribution, TwoModeFock};

/// Acceptance bar on the truncated weight of a write state.
pub const TRUNCATION_TAIL_LIMIT: f64 = 1e-6;
