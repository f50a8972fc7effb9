use thiserror::Error;

/// Errors raised by the entropic calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("entry {index} is not finite")]
    NonFinite { index: usize },

    #[error("entries sum to {sum}, not 1")]
    NotNormalized { sum: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("reference entry {index} is zero; the reference must have full rank")]
    ReferenceNotFullRank { index: usize },

    #[error("Rényi order must be nonnegative (got {0})")]
    NegativeAlpha(f64),

    #[error("reference eigenvalue must lie in (0, 1] (got {0})")]
    InvalidReferenceEigenvalue(f64),

    #[error("dimension {0} is too small")]
    DimensionTooSmall(usize),

    #[error("dimension {requested} exceeds the cap of {cap} entries")]
    DimensionCapExceeded { requested: usize, cap: usize },

    #[error("abscissa {0} lies outside [0, 1]")]
    OutOfRange(f64),

    #[error("smoothing parameter {0} is outside the admissible range")]
    InvalidEpsilon(f64),

    #[error("exact search over {0} entries exceeds the limit of 16")]
    ExactSearchTooLarge(usize),

    #[error("entropy gap {0} is not positive")]
    NonpositiveEntropyGap(f64),

    #[error("no positive rate certified: entropy ratio {ratio} does not exceed sqrt(k) = {sqrt_k}")]
    QuadraticInfeasible { ratio: f64, sqrt_k: f64 },

    #[error("initial and target dichotomies must share one reference")]
    DifferentReferences,

    #[error("target relative entropy is zero; rates are undefined")]
    ZeroTargetEntropy,

    #[error("number of copies must be at least 1")]
    ZeroCopies,

    #[error("delta {0} is outside [0, 1]")]
    InvalidDelta(f64),

    #[error("root finder did not converge after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("characteristic polynomial has a complex root {re}+{im}i; the input entropies are inconsistent")]
    ComplexRoots { re: f64, im: f64 },

    #[error("recovered eigenvalue {0} lies outside [0, 1]; the input entropies are inconsistent")]
    RootOutOfRange(f64),

    #[error("unknown property suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
