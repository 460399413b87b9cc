use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin count mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operators are in different bases")]
    BasisMismatch,
    #[error("dense conversion of {n} spins exceeds the limit of {limit}")]
    DenseLimit { n: usize, limit: usize },
    #[error("spin index {spin} out of range for {n} spins")]
    SpinIndex { spin: usize, n: usize },
    #[error("spin count {0} unsupported (1..=64)")]
    SpinCount(usize),
    #[error("generator is not Hermitian")]
    NonHermitian,
    #[error("partial trace needs at least one kept spin")]
    EmptyKeep,
    #[error("state vector is not normalized (norm {0})")]
    Unnormalized(f64),
    #[error("operator is not diagonal")]
    NotDiagonal,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("spin {0} used more than once")]
    IndexClash(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("sequence contains a non-unitary event")]
    NonUnitary,
    #[error("linear system is rank deficient (rank {rank}, needed {needed})")]
    RankDeficient { rank: usize, needed: usize },
    #[error("calibration spectrum has no usable signal")]
    SingularCalibration,
    #[error("missing measurement combination {0}")]
    MissingCombo(String),
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
