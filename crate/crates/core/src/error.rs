use thiserror::Error;

/// Errors raised by the lattice, decoding and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator matrix is rank deficient (|det| = {0:e})")]
    RankDeficient(f64),
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("coefficient constraint admits no integer vector")]
    EmptyConstraint,
    #[error("coarse lattice is not a sublattice of the fine lattice")]
    NotNested,
    #[error("enumeration too large: {size} exceeds cap {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("codebook is empty")]
    EmptyCodebook,
    #[error("codebook second moment {moment} exceeds the power bound {power}")]
    PowerExceeded { moment: f64, power: f64 },
    #[error("both gcd arguments are zero")]
    BothZero,
    #[error("no integer solution: gcd {gcd} does not divide {target}")]
    NoSolution { gcd: i64, target: i64 },
    #[error("network code vector must be nonzero")]
    ZeroCodeVector,
    #[error("network code vector {0:?} is not primitive (gcd != 1)")]
    NotCoprime(Vec<i64>),
    #[error("target is not a point of the lattice")]
    NotInLattice,
    #[error("degenerate likelihood geometry: |gamma| = {0:e}")]
    DegenerateGeometry(f64),
    #[error("pairwise error probability needs positive probabilities")]
    ZeroProbability,
    #[error("pairwise error probability needs two distinct points")]
    IdenticalPair,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("HNF block layout mismatch: {0}")]
    BlockLayout(String),
}

pub type Result<T> = std::result::Result<T, LatticeError>;
