use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet must have at least {min} symbols, got {got}")]
    AlphabetTooSmall { got: usize, min: usize },

    #[error("probability at index {index} is invalid: {value}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities must sum to 1 within {tol:e}, got {sum}")]
    ProbabilitySum { sum: f64, tol: f64 },

    #[error("block table needs {required} entries, which exceeds the cap of {cap}")]
    BlockTableTooLarge { required: u128, cap: usize },

    #[error("code has {lengths} lengths but the block alphabet has {blocks} entries")]
    LengthMismatch { lengths: usize, blocks: usize },

    #[error("block {index} has positive probability but no codeword")]
    MissingCodeword { index: usize },

    #[error("need at least 2 positive-probability blocks, got {got}")]
    TooFewCodewords { got: usize },

    #[error("length limit {l_max} cannot satisfy Kraft for {blocks} blocks (need at least {min})")]
    LengthLimitTooSmall { l_max: u32, blocks: usize, min: u32 },

    #[error("penalty solver would create {items} items, which exceeds the cap of {cap}")]
    SolverTooLarge { items: u128, cap: u128 },

    #[error(
        "no stable code: minimum achievable E[L] is {min_mean_len} bits \
         but the channel delivers only B*R = {capacity} bits per block"
    )]
    NoStableCode { min_mean_len: f64, capacity: f64 },

    #[error("channel rate must be positive and finite, got {rate}")]
    InvalidRate { rate: f64 },

    #[error("blocklength must be at least 1")]
    InvalidBlocklength,

    #[error("rate {rate} has no small rational form p/u for bit-slot timing")]
    NotRational { rate: f64 },

    #[error("error exponent must be positive, got {value}")]
    InvalidExponent { value: f64 },

    #[error("short-codeword probability q must lie in (1/3, 1] for a stationary buffer, got {q}")]
    UnstableExample { q: f64 },

    #[error("decoding delay must be nonnegative, got {delta}")]
    NegativeDelay { delta: f64 },

    #[error("simulation needs at least {min} blocks, got {got}")]
    SimTooShort { got: u64, min: u64 },

    #[error("penalty weights must be nonnegative and not both zero, got ({alpha}, {beta})")]
    InvalidPenalty { alpha: f64, beta: f64 },

    #[error("codebook block_order must be \"lexicographic\", got {got:?}")]
    UnsupportedBlockOrder { got: String },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
