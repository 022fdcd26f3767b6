use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BggError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("not exact: {0}")]
    NotExact(String),
    #[error("window insufficient: {0}")]
    WindowInsufficient(String),
    #[error("start too small: {0}")]
    StartTooSmall(String),
    #[error("support meets center: {0}")]
    SupportMeetsCenter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl BggError {
    /// True for failures of a mathematical precondition, false for malformed input.
    pub fn is_mathematical(&self) -> bool {
        !matches!(
            self,
            BggError::InvalidField(_) | BggError::InvalidInput(_) | BggError::DegreeMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, BggError>;
