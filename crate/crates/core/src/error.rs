use thiserror::Error;

/// Errors raised across the library.
///
/// The variants are grouped loosely into input errors (malformed curves,
/// divisors or records), geometric degeneracies (special divisors, points at
/// infinity) and numerical failures (non-convergence).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series expansion failed: {0}")]
    Series(String),

    #[error("special divisor: interpolation of weight {weight} is singular ({hint})")]
    SpecialDivisor { weight: u32, hint: String },

    #[error("polynomial function shares a component with the curve")]
    SharedComponent,

    #[error("inconsistent divisors: {0}")]
    Inconsistent(String),

    #[error("degenerate complement: {0}")]
    DegenerateComplement(String),

    #[error("inconsistent basis record: {0}")]
    InconsistentRecord(String),

    #[error("ambiguous point selection: {0}")]
    AmbiguousSelection(String),

    #[error("singular Abel Jacobian: {0}")]
    SingularJacobian(String),

    #[error("derivative did not converge: {0}")]
    Derivative(String),

    #[error("p2 vanishes, the rational representation has a pole")]
    PoleOfRepresentation,

    #[error("incomplete record: missing {0}")]
    IncompleteRecord(String),

    #[error("degenerate pair: {0}")]
    DegeneratePair(String),

    #[error("identity degeneration: {0}")]
    IdentityDegeneration(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("quadrature did not converge (achieved {achieved:e}): {context}")]
    Precision { achieved: f64, context: String },

    #[error("theta summation: {0}")]
    Theta(String),

    #[error("Riemann characteristic search failed: {0}")]
    CharacteristicSearch(String),

    #[error("integration path hits a branch point: {0}")]
    Path(String),

    #[error("point lies on the theta divisor: {0}")]
    ThetaDivisor(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for errors caused by malformed input rather than numerics or geometry.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidCurve(_)
                | Error::InvalidInput(_)
                | Error::IncompleteRecord(_)
                | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
