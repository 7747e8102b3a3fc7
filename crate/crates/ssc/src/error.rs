use thiserror::Error;

/// Crate-wide error type. Scene loading maps each variant to a stable
/// error code so the CLI can report machine-readable failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown anchor id {0}")]
    UnknownAnchor(usize),

    #[error("coordinate {index}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("point anchor {got} does not match function anchor {expected}")]
    AnchorMismatch { expected: usize, got: usize },

    #[error("radius must be strictly positive, got {0}")]
    RadiusNonpositive(f64),

    #[error("coordinate index must be >= 1")]
    ZeroIndex,

    #[error("non-finite coordinate value {0}")]
    NonFinite(f64),

    #[error("union of ball products must be nonempty")]
    EmptyUnion,

    #[error("set is not nearly open near the base point: margin {margin} at trace horizon {horizon}")]
    NotNearlyOpen { horizon: usize, margin: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no grid point satisfies the predicate")]
    Infeasible,

    #[error("unresolved reference `{0}`")]
    UnresolvedRef(String),

    #[error("scene schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable error code for reports and CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownAnchor(_) => "UNKNOWN_ANCHOR",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::AnchorMismatch { .. } => "ANCHOR_MISMATCH",
            Error::RadiusNonpositive(_) => "RADIUS_NONPOSITIVE",
            Error::ZeroIndex => "ZERO_INDEX",
            Error::NonFinite(_) => "NON_FINITE",
            Error::EmptyUnion => "EMPTY_UNION",
            Error::NotNearlyOpen { .. } => "NOT_NEARLY_OPEN",
            Error::Precondition(_) => "PRECONDITION",
            Error::Infeasible => "INFEASIBLE",
            Error::UnresolvedRef(_) => "UNRESOLVED_REF",
            Error::Schema { .. } => "SCHEMA",
            Error::InvalidParameter(_) => "INVALID_PARAMETER",
            Error::Io(_) => "IO",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
