use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("need at least {required} samples, got {found}")]
    TooFewSamples { required: usize, found: usize },

    #[error("CSV parse error at row {row}, column {column}: {message}")]
    ParseError { row: usize, column: String, message: String },
    #[error("label column `{column}` is not binary: found levels {levels:?}")]
    NonBinaryLabel { column: String, levels: Vec<String> },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("column `{0}` has zero variance")]
    ZeroVarianceColumn(String),
    #[error("fold generation needs at least {required} members of class {class}, found {found}")]
    TooFewClassMembers { class: u8, required: usize, found: usize },
    #[error("fold plan does not match data: {0}")]
    FoldPlanMismatch(String),

    #[error("training loss became non-finite at epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("curvature matrix contains non-finite entries")]
    NonFiniteCurvature,
    #[error("leading eigenvalue {0:e} is not positive")]
    NonPositiveLeadingEigenvalue(f64),

    #[error("eigenvector index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("only one class present")]
    SingleClass,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("combined data has zero variance")]
    ZeroOverallVariance,
    #[error("identity is degenerate: 1 - lambda is zero")]
    ZeroDenominator,
    #[error("projection vector has zero first component")]
    DegenerateProjection,
    #[error("class means coincide")]
    ZeroMeanDifference,
    #[error("method `{0}` requires a trained model")]
    MissingModel(String),
    #[error("within-class scatter matrix is singular")]
    SingularScatterMatrix,
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::DivergedLoss { .. }
                | Error::NonFiniteCurvature
                | Error::NonFinite { .. }
        )
    }

    pub fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch { expected: expected.to_string(), found: found.to_string() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
