use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A state strayed from the configured trading curve beyond tolerance.
    #[error("state ({x}, {y}) is off the trading curve (relative deviation {deviation:.3e})")]
    CurveViolation { x: f64, y: f64, deviation: f64 },

    /// Prices must be positive and finite.
    #[error("invalid price {0}")]
    InvalidPrice(f64),

    /// A swap would push a reserve to zero or below.
    #[error("swap would exhaust a pool reserve")]
    NegativeReserve,

    /// Order construction rejected the amounts.
    #[error("invalid order: {0}")]
    InvalidOrder(String),

    /// A bundle step failed validation before execution.
    #[error("invalid swap step: {0}")]
    InvalidStep(String),

    /// No positive-reserve limit state exists for the order.
    #[error("order has no limit state with positive reserves")]
    NoLimitState,

    /// The exhaustive search refuses instances it cannot enumerate.
    #[error("brute-force search supports at most {max} orders, got {got}")]
    TooManyOrders { max: usize, got: usize },

    /// A mechanism run requires at least one arbitrageur report.
    #[error("no arbitrageur reports")]
    NoReports,

    /// Order index not present in the slot input.
    #[error("order {0} is not part of the slot input")]
    UnknownOrder(usize),

    /// Arbitrageur index not present in the slot input.
    #[error("arbitrageur {0} did not participate in this slot")]
    UnknownArbitrageur(usize),

    /// A belief prior with empty or unusable support.
    #[error("belief prior has empty support")]
    InvalidPrior,

    /// Belief distribution parameters out of range.
    #[error("invalid belief distribution: {0}")]
    InvalidDistribution(String),

    /// Aggregation over an empty metrics list.
    #[error("empty input")]
    EmptyInput,

    /// A mechanism outcome failed an audit check.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// Input files disagree with the documented schema.
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
