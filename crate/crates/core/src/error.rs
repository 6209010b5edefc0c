use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distance matrix is not symmetric at ({i}, {j}): {dij} vs {dji}")]
    NonSymmetricDistance { i: usize, j: usize, dij: f64, dji: f64 },

    #[error("triangle inequality violated by ({i}, {j}, {k}): d(i,k) exceeds d(i,j) + d(j,k) by {excess}")]
    TriangleViolation { i: usize, j: usize, k: usize, excess: f64 },

    #[error("invalid distance at ({i}, {j}): {value}")]
    InvalidDistance { i: usize, j: usize, value: f64 },

    #[error("distinct points {i} and {j} are at distance zero")]
    CoincidentPoints { i: usize, j: usize },

    #[error("negative or non-finite mass {value} at point {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("total mass is zero")]
    ZeroTotalMass,

    #[error("eps must be positive, got {0}")]
    NonPositiveEps(f64),

    #[error("snowflake exponent must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),

    #[error("bad generator descriptor: {0}")]
    BadDescriptor(String),

    #[error("radius grid is empty")]
    EmptyRadiusGrid,

    #[error("lambda must lie in [0, 1], got {0}")]
    LambdaOutOfRange(f64),

    #[error("chain endpoints do not match: end {end} vs start {start}")]
    EndpointMismatch { end: usize, start: usize },

    #[error("chain has zero length")]
    ZeroLengthChain,

    #[error("chain step {step} has length {length} above the bound {eps}")]
    StepTooLong { step: usize, length: f64, eps: f64 },

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("solver stalled: {0}")]
    SolverStall(String),

    #[error("no admissible density in the requested function class")]
    NoAdmissibleDensity,

    #[error("open ball B({radius}) around point {center} has zero mass")]
    ZeroBallMass { center: usize, radius: f64 },

    #[error("no chain from {from} to {to} within the length budget {budget}")]
    NoChainWithinBudget { from: usize, to: usize, budget: f64 },

    #[error("candidate set is not separating: {0}")]
    NotSeparating(String),

    #[error("seed set is empty")]
    EmptySeedSet,

    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("field has {got} values, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonSymmetricDistance { .. } => "NonSymmetricDistance",
            Error::TriangleViolation { .. } => "TriangleViolation",
            Error::InvalidDistance { .. } => "InvalidDistance",
            Error::CoincidentPoints { .. } => "CoincidentPoints",
            Error::NegativeMass { .. } => "NegativeMass",
            Error::ZeroTotalMass => "ZeroTotalMass",
            Error::NonPositiveEps(_) => "NonPositiveEps",
            Error::AlphaOutOfRange(_) => "AlphaOutOfRange",
            Error::BadDescriptor(_) => "BadDescriptor",
            Error::EmptyRadiusGrid => "EmptyRadiusGrid",
            Error::LambdaOutOfRange(_) => "LambdaOutOfRange",
            Error::EndpointMismatch { .. } => "EndpointMismatch",
            Error::ZeroLengthChain => "ZeroLengthChain",
            Error::StepTooLong { .. } => "StepTooLong",
            Error::DegenerateCurve(_) => "DegenerateCurve",
            Error::SolverStall(_) => "SolverStall",
            Error::NoAdmissibleDensity => "NoAdmissibleDensity",
            Error::ZeroBallMass { .. } => "ZeroBallMass",
            Error::NoChainWithinBudget { .. } => "NoChainWithinBudget",
            Error::NotSeparating(_) => "NotSeparating",
            Error::EmptySeedSet => "EmptySeedSet",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && !eps.is_nan() {
        Ok(())
    } else {
        Err(Error::NonPositiveEps(eps))
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::LambdaOutOfRange(lambda))
    }
}
