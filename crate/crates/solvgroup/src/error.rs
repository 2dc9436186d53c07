use thiserror::Error;

/// Errors produced by the library. Every fallible operation reports the
/// precise failure; nothing is silently truncated or coerced.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("zero denominator in rational input")]
    ZeroDenominator,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not upper triangular")]
    NotUpperTriangular,
    #[error("dimension {0} too small for this operation")]
    DimensionTooSmall(usize),
    #[error("growth cap exceeded at {stage}: budget {budget} elements")]
    CapExceeded { stage: &'static str, budget: usize },
    #[error("tuple budget exceeded: {evaluated} chains evaluated, budget {budget}")]
    BudgetExceeded { evaluated: u64, budget: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 precondition, 3 cap, 4 parse,
    /// 1 failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } | Error::BudgetExceeded { .. } => 3,
            Error::Parse(_) => 4,
            Error::Verification(_) => 1,
            _ => 2,
        }
    }
}
