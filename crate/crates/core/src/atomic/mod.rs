//! Hyperfine-structure coefficients: Wigner 6j symbols in exact rational
//! arithmetic and the detuning-dependent scalar/vector/tensor polarizability
//! weights for an alkali ground level.

mod polarizability;
mod wigner;

pub use polarizability::{asymptotic_coeffs, polarizability_coeffs, LevelSpec, TensorCoeffs};
pub use wigner::{wigner_6j, HalfInt};
