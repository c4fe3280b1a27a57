use thiserror::Error;

use crate::padic::{NormValue, Order};
use crate::tree::TreeAddress;

/// Failures of the p-adic primitives.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("precision must be at least one digit")]
    ZeroPrecision,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is indeterminate at working precision (only known modulo p^{abs_precision})")]
    Indeterminate { abs_precision: i64 },
    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u32, u32),
    #[error("{op}: argument outside the domain ({detail})")]
    Domain { op: &'static str, detail: String },
    #[error("invalid digit expansion: {0}")]
    InvalidDigits(String),
    #[error("Hensel lifting not applicable: ord f(seed) = {residual}, ord f'(seed) = {derivative}")]
    NoConvergence { residual: Order, derivative: Order },
    #[error("contraction violated at step {step}: gap went from {previous} to {current}, bound {bound}")]
    ContractionViolation {
        step: usize,
        previous: Order,
        current: Order,
        bound: NormValue,
    },
    #[error("iteration did not settle within {0} steps")]
    IterationCap(usize),
}

/// Errors raised by the model, recursion, and CLI layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("{what} needs {requested}, above the cap of {limit}")]
    Resource {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("at vertex {vertex}: {source}")]
    AtVertex {
        vertex: TreeAddress,
        #[source]
        source: PadicError,
    },
    #[error("field value at {vertex} is outside the admissible ball ({detail})")]
    Inadmissible { vertex: TreeAddress, detail: String },
    #[error("refused: {0}")]
    Refused(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine-readable tag, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Padic(PadicError::Domain { .. }) => "domain",
            Error::Padic(PadicError::Indeterminate { .. }) => "indeterminate",
            Error::Padic(PadicError::NotPrime(_)) => "configuration",
            Error::Padic(_) => "padic",
            Error::Geometry(_) => "geometry",
            Error::Resource { .. } => "resource",
            Error::Config(_) => "configuration",
            Error::AtVertex { .. } => "domain",
            Error::Inadmissible { .. } => "domain",
            Error::Refused(_) => "refused",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
