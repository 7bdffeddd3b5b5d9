use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("probability P_{component} = {value} is negative")]
    NegativeComponent { component: char, value: String },

    #[error("state probabilities sum to {0}, expected exactly 1")]
    NotNormalized(String),

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("invalid symbol {symbol:?} at position {position}")]
    InvalidSymbol { symbol: char, position: usize },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("n = {n} exceeds the {engine} cap of {cap}")]
    CapExceeded { engine: &'static str, n: u64, cap: u64 },

    #[error("invalid probability table: {0}")]
    InvalidMass(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
