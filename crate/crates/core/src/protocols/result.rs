use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, Quadrature};

/// Ordered record of what a protocol did, replayable for determinism
/// checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TraceStep {
    Channel { name: String, kappa: f64 },
    Measurement { mode: String, quadrature: Quadrature, outcome: f64 },
    Feedback { mode: String, quadrature: Quadrature, gain: f64, outcome: f64 },
    Rotation { mode: String, angle: f64 },
}

/// Outcome of one protocol run: the final Gaussian state, the named scalar
/// figures of merit, and the step trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub final_state: GaussianState,
    pub figures: BTreeMap<String, f64>,
    pub trace: Vec<TraceStep>,
}

impl ProtocolResult {
    pub fn figure(&self, name: &str) -> Result<f64> {
        self.figures
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("no figure named {name}")))
    }
}

/// Loss parameters of a single-pass interface.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct LossBudget {
    /// Spontaneous-emission probability per atom.
    pub eta_a: f64,
    /// External light loss (windows, detection).
    pub epsilon: f64,
}

impl LossBudget {
    pub fn lossless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.eta_a, self.epsilon] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::LossOutOfRange { value: v });
            }
        }
        Ok(())
    }
}

/// Input-state families used for benchmark fidelities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum InputClass {
    /// Coherent states with Gaussian-distributed amplitude of mean photon
    /// number `n_bar`.
    CoherentGaussian { n_bar: f64 },
    /// Arbitrary unknown qubit states (vacuum/one-photon superpositions).
    Qubit,
    /// Pure squeezed states of variance `s` (vacuum units), arbitrary
    /// orientation and displacement.
    Squeezed { s: f64 },
}

impl InputClass {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InputClass::CoherentGaussian { n_bar } if n_bar < 0.0 => Err(Error::InvalidArgument(
                format!("n_bar must be >= 0, got {n_bar}"),
            )),
            InputClass::Squeezed { s } if s <= 0.0 => Err(Error::InvalidArgument(format!(
                "squeezed variance must be positive, got {s}"
            ))),
            _ => Ok(()),
        }
    }
}
