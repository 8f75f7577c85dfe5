use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("r must be at least 2, got {0}")]
    InvalidSpin(i64),

    #[error("invalid grading: a_i = {value} is outside [0, {max}]")]
    InvalidGrading { value: i64, max: u32 },

    #[error("invalid bracket structure: {0}")]
    Structure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("underdetermined: WDVV elimination leaves {key} free")]
    Underdetermined { key: String },

    #[error("reduction stalled on {key}")]
    ReductionStalled { key: String },

    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),

    #[error("non-canonical key {given:?} (canonical form is {canonical:?})")]
    NonCanonicalKey { given: String, canonical: String },

    #[error("malformed key {0:?}")]
    MalformedKey(String),

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("cache parse error at {context}: {message}")]
    CacheParse { context: String, message: String },

    #[error("unsupported cache schema version {0}")]
    SchemaVersion(u64),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
