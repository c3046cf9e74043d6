use thiserror::Error;

/// Errors raised by the library. Each variant has a stable machine-readable
/// code (see [`Error::code`]) used by the CLI's JSON output and the C ABI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Dynkin type: {0}")]
    InvalidType(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("{value} is not a unit modulo {prime}")]
    NotAUnit { value: String, prime: u64 },

    #[error("precision {prime}^{precision} does not fit in 62 bits")]
    PrecisionOverflow { prime: u64, precision: u32 },

    #[error("mismatched p-adic context: ({0}) vs ({1})")]
    ContextMismatch(String, String),

    #[error("precision too low: {0}")]
    PrecisionTooLow(String),

    #[error("fixed-lattice rank is not stable under a precision increase ({at_k} at k, {at_k2} at k+2)")]
    PrecisionUnstableRank { at_k: usize, at_k2: usize },

    #[error("enumeration cap {cap} exceeded (reached {partial} elements)")]
    CapExceeded { cap: usize, partial: usize },

    #[error("permutation {0:?} is not a Dynkin diagram symmetry of this datum")]
    NotADiagramSymmetry(Vec<usize>),

    #[error("automorphism does not normalize the Weyl group: {0}")]
    NormalizationFailed(String),

    #[error("no consistent twisting eigenvalues: {0}")]
    NoConsistentEigenvalues(String),

    #[error("every lift of the twisting has order divisible by {0}")]
    NoPrimeOrderLift(u64),

    #[error("Springer consistency failed: {0}")]
    SpringerMismatch(String),

    #[error("twisting has order {order}, divisible by {prime}")]
    TauOrderDivisibleByEll { order: u64, prime: u64 },

    #[error("twisting has infinite order")]
    TauInfiniteOrder,

    #[error("valuation of q'-1 is at the working precision")]
    ValuationAtPrecision,

    #[error("datum carries no structured label")]
    UnlabeledDatum,

    #[error("cohomology is not polynomial: {0}")]
    NonpolynomialUnsupported(String),

    #[error("invariant ring is not polynomial (Molien series does not factor): {0}")]
    NotPolynomialInvariants(String),

    #[error("series has non-integral coefficients")]
    NonIntegralSeries,

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidType(_) => "INVALID_TYPE",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::NotPrime(_) => "NOT_PRIME",
            Error::NotAUnit { .. } => "NOT_A_UNIT",
            Error::PrecisionOverflow { .. } => "PRECISION_OVERFLOW",
            Error::ContextMismatch(..) => "CONTEXT_MISMATCH",
            Error::PrecisionTooLow(_) => "PRECISION_TOO_LOW",
            Error::PrecisionUnstableRank { .. } => "PRECISION_UNSTABLE_RANK",
            Error::CapExceeded { .. } => "CAP_EXCEEDED",
            Error::NotADiagramSymmetry(_) => "NOT_A_DIAGRAM_SYMMETRY",
            Error::NormalizationFailed(_) => "NORMALIZATION_FAILED",
            Error::NoConsistentEigenvalues(_) => "NO_CONSISTENT_EIGENVALUES",
            Error::NoPrimeOrderLift(_) => "NO_PRIME_ORDER_LIFT",
            Error::SpringerMismatch(_) => "SPRINGER_MISMATCH",
            Error::TauOrderDivisibleByEll { .. } => "TAU_ORDER_DIVISIBLE_BY_ELL",
            Error::TauInfiniteOrder => "TAU_INFINITE_ORDER",
            Error::ValuationAtPrecision => "VALUATION_AT_PRECISION",
            Error::UnlabeledDatum => "UNLABELED_DATUM",
            Error::NonpolynomialUnsupported(_) => "NONPOLYNOMIAL_UNSUPPORTED",
            Error::NotPolynomialInvariants(_) => "NOT_POLYNOMIAL_INVARIANTS",
            Error::NonIntegralSeries => "NON_INTEGRAL_SERIES",
            Error::Overflow(_) => "OVERFLOW",
            Error::Inconsistent(_) => "INCONSISTENT",
            Error::Parse(_) => "PARSE_ERROR",
            Error::Io(_) => "IO_ERROR",
        }
    }

    /// Errors caused by malformed user input rather than a failed check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidType(_)
                | Error::InvalidInput(_)
                | Error::NotPrime(_)
                | Error::NotAUnit { .. }
                | Error::PrecisionOverflow { .. }
                | Error::ContextMismatch(..)
                | Error::NotADiagramSymmetry(_)
                | Error::UnlabeledDatum
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
