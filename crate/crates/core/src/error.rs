use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid base: {0}")]
    InvalidBase(String),
    #[error("coefficient is not in normal form for this base: {0}")]
    NotNormal(String),
    #[error("term {term} is not divisible by {divisor}")]
    NotDivisible { term: String, divisor: String },
    #[error("leading term is not invertible")]
    SingularLeadingTerm,
    #[error("leading term is not injective")]
    NotInjective,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inputs are not composable: {0}")]
    NotComposable(String),
    #[error("arity {arity} exceeds the declared bound {bound}")]
    ArityExceeded { arity: usize, bound: usize },
    #[error("result would need arity {needed} beyond the cochain bound {bound}")]
    ArityOverflow { needed: usize, bound: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("element is not infinitesimal: {0}")]
    NotInfinitesimal(String),
    #[error("cochain does not satisfy the Maurer-Cartan equation")]
    NotMaurerCartan,
    #[error("structure fails its relation checks: {0}")]
    RelationsUnverified(String),
    #[error("curvature is not optimal at object {0}")]
    NotOptimalCurvature(String),
    #[error("deformation is curved at object {0}")]
    NotCurvatureFree(String),
    #[error("invalid data: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
