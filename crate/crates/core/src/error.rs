use thiserror::Error;

/// Errors raised by the number-system library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GnsError {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("minimal polynomial has the rational root {0}")]
    RationalRootFound(String),
    #[error("could not certify enclosures within {0} bits of precision")]
    EnclosureFailure(u32),
    #[error("exact division failed: quotient is not integral")]
    NotDivisible,
    #[error("modulus has norm zero")]
    ZeroModulus,
    #[error("domain does not tile: {0}")]
    NotTiling(String),
    #[error("hypothesis flags are only available for built-in domain families")]
    UnsupportedDomain,
    #[error("modulus is a unit; the digit set is {{0}}")]
    DegenerateModulus,
    #[error("set size {size} exceeds cap {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("step cap {0} exceeded without revisiting a state")]
    StepCapExceeded(usize),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, GnsError>;
