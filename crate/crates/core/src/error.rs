use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Dimension mismatches, unparsable data, out-of-range parameters.
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    /// A matrix that does not respect the relations of its source.
    #[error("ill-defined morphism: {0}")]
    IllDefined(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Something that must be impossible happened; always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
