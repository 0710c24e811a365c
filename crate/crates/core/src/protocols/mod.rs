//! End-to-end protocol drivers: spin squeezing, deterministic entanglement
//! of two ensembles, QND+feedback quantum memory, teleportation onto atoms,
//! and the classical benchmark fidelities they are measured against.

mod benchmark;
mod entangle;
mod memory;
mod result;
mod squeeze;
mod teleport;

pub use benchmark::classical_benchmark;
pub use entangle::{entangle_ensembles, EntangleScheme};
pub use memory::{memory_average_fidelity, memory_store, memory_store_coherent_mc};
pub use result::{InputClass, LossBudget, ProtocolResult, TraceStep};
pub use squeeze::{optimal_squeezing_for_depth, spin_squeeze, SqueezeGain};
pub use teleport::{
    qubit_teleport_fidelity, resource_epr_closed_form, teleport, teleport_fidelity_from_measured,
    teleport_resource_epr, teleport_with_resource, TeleportInput,
};
