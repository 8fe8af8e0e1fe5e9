use thiserror::Error;

/// Errors raised by the demand model, history window and estimator.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("frat5 must be > 1, got {0}")]
    InvalidFrat5(f64),
    #[error("price sensitivity must be > 0, got {0}")]
    InvalidPhi(f64),
    #[error("arrival rate must be >= 0, got {0}")]
    InvalidArrivalRate(f64),
    #[error("fare ladder invalid: {0}")]
    InvalidFareLadder(String),
    #[error("fare {0} cents is not on the ladder")]
    FareNotOnLadder(i64),
    #[error("fare index {index} out of range for ladder of {n} fares")]
    FareIndexOutOfRange { index: usize, n: usize },
    #[error("record has {got} fares, window expects {expected}")]
    FareCountMismatch { got: usize, expected: usize },
    #[error("bookings present at fare index {0} with zero offers")]
    BookingsWithoutOffers(usize),
    #[error("sell date {got} does not follow newest sell date {newest}")]
    NonConsecutiveSellDate { got: u64, newest: u64 },
    #[error("last_k {last_k} exceeds window length {len}")]
    WindowRange { last_k: usize, len: usize },
    #[error("clamp range invalid: [{0}, {1}]")]
    InvalidClampRange(f64, f64),
    #[error("fisher information must be >= 0, got {0}")]
    NegativeInformation(f64),
    #[error("expected offer count for fare index {0} is negative")]
    NegativeExpectedOffers(usize),
    #[error("policy weights invalid: {0}")]
    InvalidPolicy(String),
    #[error("objective context invalid: {0}")]
    InvalidContext(String),
    #[error("episode config invalid: {0}")]
    InvalidEpisodeConfig(String),
    #[error("sweep spec invalid: {0}")]
    InvalidSweepSpec(String),
    #[error("oracle and random policies earn the same revenue at frat5 {0}; normalization is degenerate")]
    DegenerateNormalization(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
