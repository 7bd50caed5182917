use thiserror::Error;

/// Errors reported by the library.
///
/// User and carrier numbers inside messages are 1-based, matching how channels are
/// usually written down; the fields themselves are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("carrier {}: gain h[{}][{}] is zero or non-finite", .carrier + 1, .rx + 1, .tx + 1)]
    InvalidGain { carrier: usize, rx: usize, tx: usize },

    #[error("a parallel channel needs at least one carrier")]
    NoCarriers,

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid beamforming scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("position ({}, {}) is not an off-diagonal entry", .rx + 1, .tx + 1)]
    NotOffDiagonal { rx: usize, tx: usize },

    #[error("infeasible genie parameters: {0}")]
    InfeasibleGenie(String),

    #[error("power allocation did not converge: {0}")]
    NonConvergence(String),

    #[error("carrier {}: no finite-SNR sum-capacity bound is available ({reason})", .carrier + 1)]
    NoCarrierBound { carrier: usize, reason: String },

    #[error("rate function returned a non-finite value {value} at {snr_db} dB")]
    NonFiniteRate { snr_db: f64, value: f64 },

    #[error("channel file: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
