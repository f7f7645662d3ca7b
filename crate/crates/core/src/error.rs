use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("values belong to different radical bases")]
    BasisMismatch,
    #[error("radicand {0} is listed twice")]
    DuplicateRadicand(u64),
    #[error("radicand {0} is not a squarefree positive integer")]
    NotSquarefree(u64),
    #[error("sqrt({0}) is not in the radical basis")]
    RadicandNotInBasis(u64),
    #[error("expected {expected} coefficients, found {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("cannot parse value at offset {position}: {message}")]
    Parse { position: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live over different variable lists")]
    VariableMismatch,
    #[error("negative power of `{0}`, whose image is not a unit monomial")]
    NonInvertibleSubstitution(String),
    #[error("negative exponent on `{0}`")]
    NegativeExponent(String),
    #[error("no image given for variable `{0}`")]
    MissingImage(String),
    #[error("cannot parse polynomial at offset {position}: {message}")]
    Parse { position: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator {0} is not positive")]
    NonPositiveGenerator(usize),
    #[error("value is not in the group")]
    NotInGroup,
    #[error("value is not in the semigroup")]
    NotInSemigroup,
    #[error("integer overflow in lattice computation")]
    Overflow,
    #[error("index {index} is outside the constructed range")]
    IndexOutOfRange { index: usize },
    #[error(transparent)]
    Value(#[from] ValueError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("valuation of the zero polynomial")]
    ValuationOfZero,
    #[error("residue requested for elements of different values")]
    NotEqualValues,
    #[error("invalid valuation model: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// Failures of the jumping polynomial construction. All of them mean that the
/// input model violates the standing hypotheses or that an internal invariant
/// broke; bounded searches never produce an error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Value(#[from] ValueError),
}

impl ChainError {
    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        ChainError::Consistency(msg.into())
    }
}
