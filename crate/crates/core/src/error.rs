use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpectrumError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    /// Physical parameters violate the attractive, sub-critical regime.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A derived quantity left its domain, e.g. `l <= xi * Z` so that `lambda^2 <= 0`.
    #[error("domain error: {0}")]
    Domain(String),

    /// The turning-point cubic has no classically allowed interval at this energy.
    #[error("no classical region: {0}")]
    NoClassicalRegion(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// No sign change of the defining equation was found for the requested level.
    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("integration overflow: {0}")]
    IntegrationOverflow(String),

    /// No eigenvalue with the requested node count exists in (0, m).
    #[error("eigenvalue not found: {0}")]
    NotFound(String),

    #[error("configuration error: {0}")]
    Config(String),
}
