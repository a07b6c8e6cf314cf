use thiserror::Error;

/// Errors raised across the reconstruction pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate simplex (height {height:.3e} <= tolerance {tolerance:.3e})")]
    DegenerateSimplex { height: f64, tolerance: f64 },

    #[error("point is not in the affine hull (residual {residual:.3e})")]
    NotInAffineHull { residual: f64 },

    #[error("simplex not found in complex: {0:?}")]
    NotFound(Vec<usize>),

    #[error("sample specification is infeasible: {0}")]
    InfeasibleSpec(String),

    #[error("only {found} neighbours in ball, need at least {needed}")]
    InsufficientNeighbors { found: usize, needed: usize },

    #[error("orientation undefined: angle {angle:.4} rad to reference is too close to pi/2")]
    OrientationUndefined { angle: f64 },

    #[error("no candidate simplices at this scale")]
    NoCandidates,

    #[error("missing weight for simplex {0:?}")]
    MissingWeight(Vec<usize>),

    #[error("load point is not generic: minimum barycentric coordinate {min_bary:.3e} on simplex {simplex:?}")]
    GenericityViolation { simplex: Vec<usize>, min_bary: f64 },

    #[error("normalization row stayed empty after {attempts} attempts")]
    DegenerateNormalization { attempts: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("unsupported export: {0}")]
    UnsupportedFormat(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl ReconError {
    /// Short stable identifier used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            ReconError::InvalidInput(_) => "InvalidInput",
            ReconError::DegenerateSimplex { .. } => "DegenerateSimplex",
            ReconError::NotInAffineHull { .. } => "NotInAffineHull",
            ReconError::NotFound(_) => "NotFound",
            ReconError::InfeasibleSpec(_) => "InfeasibleSpec",
            ReconError::InsufficientNeighbors { .. } => "InsufficientNeighbors",
            ReconError::OrientationUndefined { .. } => "OrientationUndefined",
            ReconError::NoCandidates => "NoCandidates",
            ReconError::MissingWeight(_) => "MissingWeight",
            ReconError::GenericityViolation { .. } => "GenericityViolation",
            ReconError::DegenerateNormalization { .. } => "DegenerateNormalization",
            ReconError::NumericalFailure(_) => "NumericalFailure",
            ReconError::UnsupportedFormat(_) => "UnsupportedFormat",
            ReconError::Parse { .. } => "ParseError",
            ReconError::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for ReconError {
    fn from(err: std::io::Error) -> Self {
        ReconError::Io(err.to_string())
    }
}

pub type Result<T, E = ReconError> = std::result::Result<T, E>;
