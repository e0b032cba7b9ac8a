use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every variant maps to one of the exit codes used by the command-line
/// front end through [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime {p} exceeds the configured bound {bound}")]
    PrimeTooLarge { p: u64, bound: u64 },

    #[error("root-of-unity order {d} must be below the configured bound {bound}")]
    RootOrderTooLarge { d: u64, bound: u64 },

    #[error("{d} is not coprime to the characteristic {p}")]
    NotCoprime { d: u64, p: u64 },

    #[error("field of order {p}^{degree} exceeds the configured size bound {bound}")]
    FieldTooLarge { p: u64, degree: u32, bound: u64 },

    #[error("no primitive {d}-th root of unity in a field of order {order}")]
    NoRootOfUnity { d: u64, order: u64 },

    #[error("operands live in different coefficient fields")]
    ContextMismatch,

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("series inverse needs a finite precision")]
    PrecisionRequired,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("working precision {given} is below the floor {floor}")]
    PrecisionBelowFloor { given: usize, floor: usize },

    #[error("invalid extension data: {0}")]
    InvalidExtension(String),

    #[error(
        "no Galois extension: the tame generator would send y^p - y = s^-{m} to a \
         non-F_{p} multiple (zeta^{m} is not in the prime field)"
    )]
    NotGalois { p: u64, m: u64 },

    #[error("malformed ramification breaks: {0}")]
    MalformedBreaks(String),

    #[error("group relation violated: {0}")]
    GroupRelation(String),

    #[error("linear system of dimension {dim} exceeds the bound {bound}")]
    DimensionOverflow { dim: usize, bound: usize },

    #[error("cohomology did not stabilize up to level {max_level}: {history}")]
    NoStabilization { max_level: usize, history: String },

    #[error("invalid job: {0}")]
    InvalidJob(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Exit code for the command-line front end: 2 for input problems,
    /// 3 for resource and stabilization failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PrecisionExhausted(_)
            | Error::DimensionOverflow { .. }
            | Error::NoStabilization { .. }
            | Error::FieldTooLarge { .. } => 3,
            _ => 2,
        }
    }

    /// Short machine-readable code for structured reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::PrimeTooLarge { .. } => "prime_too_large",
            Error::RootOrderTooLarge { .. } => "root_order_too_large",
            Error::NotCoprime { .. } => "not_coprime",
            Error::FieldTooLarge { .. } => "field_too_large",
            Error::NoRootOfUnity { .. } => "no_root_of_unity",
            Error::ContextMismatch => "context_mismatch",
            Error::ZeroInverse => "zero_inverse",
            Error::PrecisionRequired => "precision_required",
            Error::PrecisionExhausted(_) => "precision_exhausted",
            Error::PrecisionBelowFloor { .. } => "precision_below_floor",
            Error::InvalidExtension(_) => "invalid_extension",
            Error::NotGalois { .. } => "not_galois",
            Error::MalformedBreaks(_) => "malformed_breaks",
            Error::GroupRelation(_) => "group_relation",
            Error::DimensionOverflow { .. } => "dimension_overflow",
            Error::NoStabilization { .. } => "no_stabilization",
            Error::InvalidJob(_) => "invalid_job",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
