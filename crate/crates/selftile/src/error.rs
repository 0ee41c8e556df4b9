use num_bigint::BigInt;
use thiserror::Error;

/// Errors shared across the crate.
///
/// Search misses that are ordinary outcomes (`find_complement` past its
/// bound, recognition failures) are modelled as `Option`/dedicated enums,
/// not errors; this type is for contract violations and exhausted budgets.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid digit set: {0}")]
    InvalidDigitSet(String),

    #[error("sum is not direct: {value} = {a1} + {b1} = {a2} + {b2}")]
    NotDirectSum {
        value: BigInt,
        a1: BigInt,
        b1: BigInt,
        a2: BigInt,
        b2: BigInt,
    },

    #[error("invalid modulo lift: {0}")]
    InvalidModuloLift(String),

    #[error("factors do not form a complete residue set modulo {0}")]
    NotCompleteResidue(BigInt),

    #[error("sets do not sum directly to {{0,..,{0}-1}}")]
    NotZb(BigInt),

    #[error("no spectrum found: {0}")]
    SpectrumNotFound(String),

    #[error("digit set has {0} elements, expected {1}")]
    WrongCardinality(usize, usize),

    #[error("digit set is not canonical: {0}")]
    NotCanonical(String),

    #[error("invalid orthogonality candidate: {0}")]
    InvalidGamma(String),

    #[error("self-replication check failed: residue {uncovered} of the period {period} is not covered exactly once")]
    SelfReplicationFailed { uncovered: BigInt, period: BigInt },

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolated(String),

    #[error("structure is not strict")]
    NotStrict,

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
