use thiserror::Error;

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("associated Legendre function undefined for L={l}, M={m}, x={x}")]
    LegendreDomain { l: usize, m: usize, x: f64 },

    #[error("matrix is not a proper rotation (orthogonality defect {defect:.3e}, det {det:.6})")]
    NotARotation { defect: f64, det: f64 },

    #[error("no catalog entry for N={0} (available: 2..=7)")]
    UnsupportedCopies(usize),

    #[error("all outcome directions are collinear")]
    CollinearOutcomes,

    #[error("POVM has no outcomes")]
    EmptyPovm,

    #[error("invalid zero vector")]
    ZeroVector,

    #[error("certificate precondition failed: moment equation q={q} violated by {residual:.3e}")]
    MomentPrecondition { q: usize, residual: f64 },

    #[error("certificate for this ansatz requires N={expected}, got N={actual}")]
    WrongCopies { expected: usize, actual: usize },

    #[error("outcome probabilities sum to {sum}, not 1: POVM is not complete")]
    NotNormalized { sum: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
