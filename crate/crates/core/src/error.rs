//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by construction, series arithmetic, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An index is outside its valid range.
    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },

    /// A hard size cap was exceeded (e.g. the subset-sum form at large order).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Arithmetic on series is undefined (division by the zero series, log of
    /// a series with zero constant term, ...).
    #[error("series arithmetic error: {0}")]
    SeriesArithmetic(String),

    /// A series expected to be analytic at zero has a pole. This is always a
    /// construction bug upstream, never a user error.
    #[error("construction bug: series has negative valuation {valuation}")]
    NegativeValuation { valuation: i32 },

    /// A derivative order beyond the truncation window was requested.
    #[error("truncation window exceeded: order {order} not covered (window ends at {window_end})")]
    WindowExceeded { order: usize, window_end: i32 },

    /// Two spectral points share a gamma value, so the determinant
    /// representations degenerate.
    #[error("singular configuration: coincident gamma values at indices {0} and {1}")]
    SingularConfiguration(usize, usize),

    /// A matrix entry or evaluation input is not finite.
    #[error("input error: {0}")]
    Input(String),

    /// Division by a zero determinant or zero log-magnitude value.
    #[error("division by zero value (log-magnitude -inf)")]
    ZeroDenominator,

    /// A log-domain ratio does not fit the target exponent range.
    #[error("range error: exponent {exponent} not representable")]
    Range { exponent: f64 },

    /// The denominator determinant fell beneath the precision floor; signals
    /// precision exhaustion rather than a true pole.
    #[error("pole proximity / precision exhaustion: logdet(n)={logdet_n}, logdet(d)={logdet_d}, cancelled bits={lost_bits}")]
    PoleProximity {
        logdet_n: f64,
        logdet_d: f64,
        lost_bits: f64,
    },

    /// Wronskian magnitude underflowed beyond working precision.
    #[error("degenerate evaluation: |W| underflow, log-magnitude {log_mag}")]
    Underflow { log_mag: f64 },

    /// A parse failure in a file consumed by the tooling.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
