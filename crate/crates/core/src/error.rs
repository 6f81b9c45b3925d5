use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin: two_s must be at least 1, got {0}")]
    InvalidSpin(u32),
    #[error("generator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("slot index {index} out of range for {len} slots")]
    SlotOutOfRange { index: usize, len: usize },
    #[error("dimension {dim} exceeds the dense limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },
    #[error("selector matches no spin in the register: {0}")]
    UnresolvedSelector(String),
    #[error("invalid chain pattern {0:?}: must be non-empty and strictly alternating A/B")]
    InvalidPattern(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown library entry {0:?}")]
    UnknownEntry(String),
    #[error("unknown gate {0:?}")]
    UnknownGate(String),
    #[error("free evolution needs a register built from a chain spec")]
    NoHamiltonian,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
