use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid variable context: {0}")]
    InvalidContext(String),

    #[error("variable context mismatch: [{left}] vs [{right}]")]
    ContextMismatch { left: String, right: String },

    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },

    #[error("operation `{op}` is not supported over {field}")]
    UnsupportedField { op: &'static str, field: String },

    #[error("polynomial is not divisible: {0}")]
    NotDivisible(String),

    #[error("zero input to {0}")]
    ZeroInput(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("derivation is not nilpotent within {0} iterations")]
    NotNilpotentWithin(usize),

    #[error("no inverse with components of degree at most {0}")]
    NoInverseWithinDegree(u32),

    #[error("map does not have the required shape: {0}")]
    ShapeMismatch(String),

    #[error("determinant is not 1")]
    DeterminantNotOne,

    #[error("point is not on the variety: {0}")]
    PointOffVariety(String),

    #[error("point is singular: {0}")]
    SingularPoint(String),

    #[error("points are not pairwise distinct")]
    DuplicatePoint,

    #[error("could not find {wanted} points on the fiber p = {value}")]
    FiberPointsNotFound { wanted: usize, value: String },

    #[error("transversality violated: {0}")]
    TransversalityViolated(String),

    #[error("enumeration budget exceeded: {needed} cells > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("unknown gallery entry `{0}`")]
    UnknownGallery(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// The variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "Syntax",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::InvalidContext(_) => "InvalidContext",
            Error::ContextMismatch { .. } => "ContextMismatch",
            Error::FieldMismatch { .. } => "FieldMismatch",
            Error::UnsupportedField { .. } => "UnsupportedField",
            Error::NotDivisible(_) => "NotDivisible",
            Error::ZeroInput(_) => "ZeroInput",
            Error::InvalidInput(_) => "InvalidInput",
            Error::CertificationFailed(_) => "CertificationFailed",
            Error::NotNilpotentWithin(_) => "NotNilpotentWithin",
            Error::NoInverseWithinDegree(_) => "NoInverseWithinDegree",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::DeterminantNotOne => "DeterminantNotOne",
            Error::PointOffVariety(_) => "PointOffVariety",
            Error::SingularPoint(_) => "SingularPoint",
            Error::DuplicatePoint => "DuplicatePoint",
            Error::FiberPointsNotFound { .. } => "FiberPointsNotFound",
            Error::TransversalityViolated(_) => "TransversalityViolated",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::UnknownGallery(_) => "UnknownGallery",
            Error::Unsupported(_) => "Unsupported",
        }
    }

    /// Documented heuristic or budget limits rather than bad input.
    pub fn is_incomplete(&self) -> bool {
        matches!(
            self,
            Error::FiberPointsNotFound { .. }
                | Error::NotNilpotentWithin(_)
                | Error::NoInverseWithinDegree(_)
                | Error::BudgetExceeded { .. }
        )
    }
}
