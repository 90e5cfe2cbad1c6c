use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arithmetic overflow computing {0}")]
    Overflow(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate point: Γₙ(z) = {gamma:e}")]
    DegeneratePoint { gamma: f64 },

    /// `⟨a, β(z)⟩ = 0`: the point lies on the zero set and the log term is −∞.
    #[error("point lies on the zero set (zero inner product)")]
    OnZeroSet,

    #[error("Gram matrix numerically singular at member {index} (condition estimate {condition:e})")]
    SingularGram { index: usize, condition: f64 },

    #[error("basis member {0} vanishes identically on the grid")]
    ZeroMember(usize),

    #[error("no closed form: {0}; use extremal_numeric")]
    NoClosedForm(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// The system has a positive-dimensional common zero locus.
    #[error("non-generic system: {0}")]
    NonGeneric(String),

    #[error("unsupported pairing: {0}")]
    UnsupportedPairing(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
