use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("variable count mismatch: expected {expected}, found {found}")]
    VariableMismatch { expected: usize, found: usize },

    #[error("bad degree {degree} for operation on a form of degree {form_degree}")]
    BadDegree { degree: usize, form_degree: usize },

    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("the zero form has no decomposition")]
    ZeroForm,

    #[error("plane has dimension {0}, expected 3")]
    DimensionCollapse(usize),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("form is not in V0+V1+V2 (relative residual {residual:.3e})")]
    MembershipFailure { residual: f64 },

    #[error("case analysis exhausted: {0}")]
    CaseAnalysisExhausted(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("classification disagrees with the rank stratification: {0}")]
    Classification(String),

    #[error("decomposition failed after {attempts} attempts: {diagnostics}")]
    DecompositionFailure { attempts: usize, diagnostics: String },

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("inhomogeneous polynomial: term of degree {found} in a form of degree {expected}")]
    Inhomogeneous { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
