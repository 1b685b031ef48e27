use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ring declaration: {0}")]
    RingSpec(String),

    #[error("non-invertible denominator: {0}")]
    NonInvertible(String),

    #[error("unassigned parameter(s) in evaluation: {}", .0.join(", "))]
    UnassignedParameter(Vec<String>),

    #[error("point rejected: {0}")]
    PointRejected(String),

    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,

    #[error("forms live on different frames")]
    FrameMismatch,

    #[error("Jacobi identity fails: d(d e^{index}) = {residual}")]
    Jacobi { index: usize, residual: String },

    #[error("splitting is not reductive: {0}")]
    NonReductive(String),

    #[error("representation is not a Lie algebra homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("representation not orthogonal: {0}")]
    NotOrthogonal(String),

    #[error("setup validation failed: {}", .0.join("; "))]
    SetupInvalid(Vec<String>),

    #[error("form is not basic: {0}")]
    NotBasic(String),

    #[error("result not basic: {0}")]
    ResultNotBasic(String),

    #[error("letter `{letter}` is not equivariant under gauge element {element}")]
    Equivariance { letter: String, element: String },

    #[error("invalid letter `{0}`: {1}")]
    InvalidLetter(String, String),

    #[error("contraction `{0}` is not invariant: {1}")]
    ContractionNotInvariant(String, String),

    #[error("arity mismatch: contraction `{name}` takes {expected} letters, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("transitive-sphere hypothesis violated: {0}")]
    TransitiveSphere(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("residual expression for: {}", .0.join(", "))]
    Residual(Vec<String>),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
