use thiserror::Error;

/// Errors raised by evaluation, construction and sampling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function
    /// (non-positive shape, probability outside (0,1), k > m, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller broke a structural precondition: mismatched lengths,
    /// a count total that disagrees with `m`, an empty input.
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

pub(crate) fn ensure_len(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(contract(format!(
            "{what}: expected length {expected}, got {got}"
        )))
    }
}
