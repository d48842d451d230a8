use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { position: usize, name: String },

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("root iteration did not converge after {iterations} iterations (residual {residual:e})")]
    RootsDidNotConverge { iterations: usize, residual: f64 },

    #[error("curve has identically vanishing torsion")]
    DegenerateTorsion,

    #[error("torsion vanishes at t = {t}")]
    SingularPoint { t: f64 },

    #[error("dimension {d} is not supported by this operation")]
    Dimension { d: usize },

    #[error("degree {degree} exceeds the supported maximum 16")]
    Degree { degree: usize },

    #[error("coincident evaluation points")]
    CoincidentPoints,

    #[error("empty root set")]
    EmptyRootSet,

    #[error("piece center {re}+{im}i is not real")]
    ComplexCenter { re: f64, im: f64 },

    #[error("piece center {center} lies in the interior of the piece")]
    CenterInterior { center: f64 },

    #[error("empty dyadic piece")]
    EmptyPiece,

    #[error("curve is not normalized at 0 (deviation {deviation:e})")]
    NotNormalized { deviation: f64 },

    #[error("aliasing: phase step {step:.4} exceeds {limit:.4} ({context})")]
    Aliasing { step: f64, limit: f64, context: &'static str },

    #[error("degenerate data: {0}")]
    DegenerateData(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent out of range: {0}")]
    ExponentRange(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
