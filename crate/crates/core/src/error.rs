use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("matrix rows have different lengths")]
    NonRectangular,
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("operator is not degree-filtration preserving: order {order}, entry ({row},{col}) has degree {degree:?}")]
    NotFiltrationPreserving {
        order: usize,
        row: usize,
        col: usize,
        degree: Option<usize>,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("moment of order {0} does not exist for these parameters")]
    MomentDoesNotExist(usize),
    #[error("block Hankel system is singular at degree {0}")]
    SingularHankel(usize),
    #[error("parse error at line {line}, column {col} (offset {offset}): {msg}")]
    Parse {
        line: usize,
        col: usize,
        offset: usize,
        msg: String,
    },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("no generator of order <= {0}")]
    NoGenerator(usize),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("certificate `{name}` failed: {residual}")]
    Certificate { name: String, residual: String },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("eigenvalue undetermined at degree {0}: leading terms cancel identically")]
    EigenvalueUndetermined(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
