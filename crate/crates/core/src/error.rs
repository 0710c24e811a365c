use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unphysical variance: {0}")]
    UnphysicalVariance(String),

    #[error("unphysical state: smallest symplectic eigenvalue {nu_min} < 1/2")]
    UnphysicalState { nu_min: f64 },

    #[error("channel is not completely positive (min eigenvalue {min_eig})")]
    NotCompletelyPositive { min_eig: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown mode {0}")]
    UnknownMode(String),

    #[error("degenerate quadrature: variance {var} too small to condition on")]
    DegenerateQuadrature { var: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("loss parameter {value} outside [0, 1]")]
    LossOutOfRange { value: f64 },

    #[error("grid too coarse: need at least {nz_min} x {nt_min} points, got {nz} x {nt}")]
    GridTooCoarse {
        nz: usize,
        nt: usize,
        nz_min: usize,
        nt_min: usize,
    },

    #[error("pulse bandwidth {bw:.3e} exceeds the interface limit d*gamma = {limit:.3e}")]
    BandwidthTooLarge { bw: f64, limit: f64 },

    #[error("detuning hits the {fprime} resonance")]
    ResonancePole { fprime: String },

    #[error("angular momenta must be non-negative half-integers: {0}")]
    BadHalfInteger(String),

    #[error("Fock truncation tail {tail:.3e} exceeds {limit:.3e}; raise the cutoff")]
    TruncationTail { tail: f64, limit: f64 },

    #[error("zero success probability: {0}")]
    ZeroSuccessProbability(String),

    #[error("config error: {0}")]
    Config(String),
}
