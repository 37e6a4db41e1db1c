use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("minimal polynomial must be monic with integer coefficients and degree >= 1")]
    NotMonic,
    #[error("minimal polynomial has the rational root {0}")]
    RationalRoot(String),
    #[error("minimal polynomial has repeated roots")]
    NotSquarefree,
    #[error("root hint [{lo}, {hi}] isolates {count} real roots, expected exactly one")]
    BadHint { lo: String, hi: String, count: usize },
    #[error("could not certify disjoint enclosures for the complex roots")]
    RootCertification,
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("sign still undetermined at the {0}-bit precision cap")]
    PrecisionCap(u32),
    #[error("quotient is not representable in this ring")]
    NotDivisible,
    #[error("embedding index {index} out of range for degree {degree}")]
    BadEmbedding { index: usize, degree: usize },
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cut search exhausted: {0}")]
    SearchExhausted(String),
    #[error("window insufficient: {0}")]
    WindowInsufficient(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
