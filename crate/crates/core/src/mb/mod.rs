//! 1D space-time integration of the coupled light / spin-wave equations for
//! the beam-splitter, parametric-gain and Faraday interactions, in the
//! co-moving frame (time measured as `t - z/c`).
//!
//! The solver is a characteristics-aligned implicit box scheme, second order
//! in both steps and unconditionally stable; the analytic Bessel-kernel
//! solution of the beam-splitter equations serves as its oracle.

mod dimensionless;
mod eit;
mod grid;
mod kernel;
mod scheme;
mod systems;

pub use dimensionless::{from_dimensionless, to_dimensionless};
pub use eit::{
    eit_transfer, iterate_optimal_input, slow_light_delay, EitResult, EitSetup, RetrievalDirection,
};
pub use grid::{mode_overlap, Coords, PulseGrid};
pub use kernel::{
    analytic_bs_kernel, bessel_i0_scaled, h_function, retrieve_with_kernel, storage_bs_kernel,
    KernelEval,
};
pub use scheme::MbSolution;
pub use systems::{
    integrate_beam_splitter, integrate_beam_splitter_full, integrate_faraday,
    integrate_faraday_two_cell, integrate_parametric, resolution_bound, TwoCellResult,
};
