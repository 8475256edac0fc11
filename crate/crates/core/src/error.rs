use thiserror::Error;

/// Errors raised by scenario validation and the numerical routines.
///
/// Unidentifiable parameter pairs are not errors; they come back as a
/// [`CrbResult`](crate::fim::CrbResult) with `identifiable == false`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the formula or model.
    #[error("domain error: {0}")]
    Domain(String),
    /// The target sits where a `1/cos(theta)` factor blows up.
    #[error("singular geometry: {0}")]
    SingularGeometry(String),
    /// The target coincides with an array reference point.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    /// Inconsistent or invalid configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A linear-algebra step failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
