use thiserror::Error;

/// Every failure the library can report.
///
/// Variants other than [`Error::Internal`] describe bad input; `Internal`
/// means an invariant that should hold for all valid inputs was violated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid minimal polynomial: {0}")]
    InvalidMinPoly(String),
    #[error("invalid root box: {0}")]
    InvalidRootBox(String),
    #[error("inconsistent conjugation: {0}")]
    InvalidConjugation(String),
    #[error("the field does not contain the imaginary unit: {0}")]
    NoImaginaryUnit(String),
    #[error("minimal polynomial is reducible: {0}")]
    ReducibleMinPoly(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("not a finite-index sublattice: column {column} {reason}")]
    NotSublattice { column: usize, reason: String },
    #[error("multiplier must be nonzero")]
    ZeroMultiplier,
    #[error("lambda is not a rational endomorphism of Γ⊗ℚ")]
    NotRationalEndomorphism,
    #[error("subspace is not complex: {0}")]
    NotComplex(String),
    #[error("subtori do not separate: {0}")]
    SubtoriDoNotSeparate(String),
    #[error("invalid hyperplane form: {0}")]
    InvalidForm(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidMinPoly(_) => "invalid_min_poly",
            Error::InvalidRootBox(_) => "invalid_root_box",
            Error::InvalidConjugation(_) => "invalid_conjugation",
            Error::NoImaginaryUnit(_) => "no_imaginary_unit",
            Error::ReducibleMinPoly(_) => "reducible_min_poly",
            Error::DivisionByZero => "division_by_zero",
            Error::DegenerateLattice(_) => "degenerate_lattice",
            Error::Dimension(_) => "dimension_mismatch",
            Error::FieldMismatch(_) => "field_mismatch",
            Error::NotSublattice { .. } => "not_sublattice",
            Error::ZeroMultiplier => "zero_multiplier",
            Error::NotRationalEndomorphism => "not_rational_endomorphism",
            Error::NotComplex(_) => "not_complex",
            Error::SubtoriDoNotSeparate(_) => "subtori_do_not_separate",
            Error::InvalidForm(_) => "invalid_form",
            Error::Internal(_) => "internal",
        }
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
