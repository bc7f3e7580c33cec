use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("illegal decomposition: {0}")]
    IllegalDecomposition(String),

    #[error("instance too large: {count} decompositions exceeds the limit of {limit}")]
    InstanceTooLarge { count: u128, limit: u128 },

    #[error("value outside the domain of the formula: {0}")]
    OutOfDomain(String),

    #[error("enumeration produced value {value} more than once")]
    DuplicateValue { value: u64 },

    #[error("enumeration produced value {value} outside [0, {size})")]
    ValueOutOfRange { value: u64, size: u64 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
