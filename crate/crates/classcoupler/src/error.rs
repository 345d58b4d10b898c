//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, sampling, and estimation.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or model parameter is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The data admit no usable likelihood (e.g. zero sample variance).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A density or ratio was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stored deviate record does not match the requested layout.
    #[error("deviate record at t={t} holds {stored} values, caller expected {expected}")]
    ArityMismatch {
        t: u64,
        stored: usize,
        expected: usize,
    },

    /// The backward horizon was exhausted before coalescence.
    #[error("no coalescence within backward horizon {max_horizon} ({mh_steps} kernel evaluations)")]
    HorizonExceeded { max_horizon: u64, mh_steps: u64 },

    /// The supplied lowest state is not minimal over the probed states.
    #[error(
        "lowest-state probe failed: probed state has log importance weight \
         {probe_log_weight:.6} above the supplied lowest state's {lowest_log_weight:.6}"
    )]
    LowestStateViolation {
        probe_log_weight: f64,
        lowest_log_weight: f64,
    },

    /// A coupler model violated its contract.
    #[error("model contract violation: {0}")]
    Contract(String),

    /// An estimator was handed an empty sample.
    #[error("empty input")]
    EmptyInput,

    /// A run configuration could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
