use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("root order n = {0} must be at least 2")]
    InvalidOrder(u32),
    #[error("binomial [{a}; {b}] needs a - b to be an integer in [0, n-1]")]
    NonIntegerDifference { a: Complex64, b: Complex64 },
    #[error("log-sine sum up to k = {k} hits a vanishing sine for n = {n}")]
    ZeroFactor { k: u32, n: u32 },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("color {0} is (within tolerance) a half-integer")]
    HalfIntegerColor(Complex64),
    #[error("color mismatch: expected {expected:?}, found {found:?}")]
    ColorMismatch { expected: Vec<Complex64>, found: Vec<Complex64> },
    #[error("matrix is singular: {0}")]
    SingularMatrix(String),
    #[error("triple ({a}, {b}, {c}) is not admissible: {why}")]
    InadmissibleTriple { a: Complex64, b: Complex64, c: Complex64, why: String },
    #[error("6j integrality violated: {0}")]
    IntegralityViolation(String),
    #[error("empty summation range m = {m} > M = {big_m}")]
    EmptyRange { m: i64, big_m: i64 },
    #[error("angle constraint violated: {0}")]
    AngleSumViolation(String),
    #[error("Gram matrix is not hyperbolic (det G = {0} >= 0)")]
    NonHyperbolicGram(f64),
    #[error("root of the zeta quadratic is off the unit circle (|z| = {0})")]
    RootOffUnitCircle(f64),
    #[error("no zeta root lands in the interval ({lo}, {hi})")]
    IntervalViolation { lo: f64, hi: f64 },
    #[error("tangle operator is not scalar (off-scalar norm {0:e})")]
    NonScalarOperator(f64),
    #[error("no admissible state: {0}")]
    NoStates(String),
    #[error("Richardson extrapolation unstable: spread {0:e}")]
    ExtrapolationUnstable(f64),
    #[error("diagram error: {0}")]
    Diagram(String),
}

impl QError {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            QError::InvalidOrder(_) => "INVALID_ORDER",
            QError::NonIntegerDifference { .. } => "NON_INTEGER_DIFFERENCE",
            QError::ZeroFactor { .. } => "ZERO_FACTOR",
            QError::OutOfRange(_) => "OUT_OF_RANGE",
            QError::HalfIntegerColor(_) => "HALF_INTEGER_COLOR",
            QError::ColorMismatch { .. } => "COLOR_MISMATCH",
            QError::SingularMatrix(_) => "SINGULAR_MATRIX",
            QError::InadmissibleTriple { .. } => "INADMISSIBLE_TRIPLE",
            QError::IntegralityViolation(_) => "INTEGRALITY_VIOLATION",
            QError::EmptyRange { .. } => "EMPTY_RANGE",
            QError::AngleSumViolation(_) => "ANGLE_SUM_VIOLATION",
            QError::NonHyperbolicGram(_) => "NON_HYPERBOLIC_GRAM",
            QError::RootOffUnitCircle(_) => "ROOT_OFF_UNIT_CIRCLE",
            QError::IntervalViolation { .. } => "INTERVAL_VIOLATION",
            QError::NonScalarOperator(_) => "NON_SCALAR_OPERATOR",
            QError::NoStates(_) => "NO_STATES",
            QError::ExtrapolationUnstable(_) => "EXTRAPOLATION_UNSTABLE",
            QError::Diagram(_) => "DIAGRAM",
        }
    }
}
