use thiserror::Error;

/// Errors raised by precondition checks across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency {0} exceeds the cap |n| < 4^30")]
    FrequencyOutOfRange(i128),

    #[error("4-adic valuation of 0 is undefined")]
    ZeroValuation,

    #[error("invalid product configuration: {0}")]
    InvalidConfig(String),

    #[error("|t| = {t} exceeds the validated domain radius {radius}")]
    OutsideDomain { t: f64, radius: f64 },

    #[error("level {level} exceeds the maximum {max}")]
    LevelTooLarge { level: u32, max: u32 },

    #[error("level must be at least {min}, got {level}")]
    LevelTooSmall { level: u32, min: u32 },

    #[error("p must be an odd positive integer, got {0}")]
    InvalidScale(i64),

    #[error(
        "invalid digit set {{0, {0}}}: the nonzero digit must be positive and not divisible by 4"
    )]
    InvalidDigitSet(i64),

    #[error("digit system produces duplicate element {0} at level {1}")]
    DuplicateElement(i64, u32),

    #[error("label {label} is outside the domain of {op}")]
    NotInDomain { op: String, label: i64 },

    #[error("invalid operator {op}: {reason}")]
    InvalidOperator { op: String, reason: String },

    #[error("sum {op}: label {label} receives contributions from inputs {left} and {right}")]
    RangeCollision {
        op: String,
        label: i64,
        left: i64,
        right: i64,
    },

    #[error("{op}: input {input} has two images, {first} and {second}")]
    DoubleContribution {
        op: String,
        input: i64,
        first: i64,
        second: i64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid has no point pairs separated by {0}")]
    NoMatchedPairs(f64),

    #[error("unknown component {0:?}")]
    UnknownComponent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
