use thiserror::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by precondition checks across the crate.
///
/// Constraint *violations* of an otherwise well-formed grid are not errors;
/// they are reported through [`crate::copula::ValidationReport`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mesh resolution k must be at least 2, got {k}")]
    MeshTooSmall { k: u32 },

    #[error("grid point ({i}, {j}) is outside the (k+1)x(k+1) mesh for k={k}")]
    PointOutOfRange { k: u32, i: u32, j: u32 },

    #[error("point ({u}, {v}) lies outside the unit square")]
    OutsideUnitSquare { u: String, v: String },

    #[error("({u}, {v}) is not a mesh point for k={k}")]
    NotAMeshPoint { k: u32, u: String, v: String },

    #[error("rectangle corner ({x}, {y}) does not lie on the mesh for k={k}")]
    OffMeshRect { k: u32, x: String, y: String },

    #[error("grid has {rows} rows x {cols} columns, expected {expected} x {expected}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("matrix is not bistochastic: {axis} {index} sums to {sum}, expected 1")]
    NotBistochastic {
        axis: &'static str,
        index: usize,
        sum: String,
    },

    #[error("no perfect matching on the positive support; residual row sums {residual:?}")]
    NoPerfectMatching { residual: Vec<String> },

    #[error("copula failed validation: {summary}")]
    InvalidCopula { summary: String },

    #[error("k={k} exceeds this operation's capacity of k={max} ({hint})")]
    CapacityExceeded {
        k: u32,
        max: u32,
        hint: &'static str,
    },

    #[error("level {level} is outside the support of the value law at ({i}, {j}) for k={k}")]
    LevelOutOfSupport { k: u32, i: u32, j: u32, level: i64 },

    #[error("parameter {name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: String,
    },

    #[error("cannot parse {input:?} as a rational: {reason}")]
    BadRational { input: String, reason: String },

    #[error("input is empty")]
    EmptyInput,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("encoding error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
