use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("field order {p}^{m} exceeds 256")]
    FieldTooLarge { p: u32, m: u32 },

    #[error("invalid modulus: {0}")]
    BadModulus(String),

    #[error("modulus is reducible: divisible by {factor:?} (coefficients low to high)")]
    ReducibleModulus { factor: Vec<u8> },

    #[error("element {value} out of range for GF({q})")]
    ElementOutOfRange { value: u32, q: usize },

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("code has no certified minimum distance")]
    Uncertified,

    #[error("budget exceeded: {what} needs {needed} steps, budget is {budget}")]
    Budget {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("design infeasible: {0}")]
    Infeasible(String),

    #[error("best design reached d_min = {found}, below the requested floor {floor}")]
    BelowFloor { found: usize, floor: usize },

    #[error("received values are inconsistent with every information vector")]
    Inconsistent,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no analytic formula for {0}; use the exact enumeration")]
    NoFormula(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for refusals caused by an enumeration or trial budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
