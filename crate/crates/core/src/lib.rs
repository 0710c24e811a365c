//! Simulation toolkit for quantum interfaces between light and atomic ensembles.
//!
//! The crate covers the standard Gaussian description of collective atomic
//! spins and travelling light modes (states, symplectic channels, homodyne
//! conditioning and feedback), the coupled 1D Maxwell-Bloch equations for the
//! beam-splitter, parametric-gain and Faraday interactions, truncated
//! Fock-space simulation of heralded (DLCZ-style) protocols, and the
//! hyperfine polarizability coefficients entering the effective couplings.
//!
//! Protocol drivers (spin squeezing, deterministic entanglement, quantum
//! memory, teleportation) live in [`protocols`] and are exercised end to end
//! by the `acceptance` test suite.

pub mod acceptance;
pub mod atomic;
pub mod couplings;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod mb;
pub mod protocols;

pub use error::{Error, Result};
