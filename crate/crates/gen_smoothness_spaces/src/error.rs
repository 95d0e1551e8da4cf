//! Error type for partition construction and norm evaluation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("partition: {0}")]
    Config(String),

    #[error("parameter {name} = {value} outside {allowed}")]
    BadParameter { name: &'static str, value: f64, allowed: &'static str },

    #[error("difference order m = {m} too low: the weight integral needs m >= {m0}")]
    DifferenceOrder { m: u32, m0: u32 },

    #[error("space-time norm needs at least two slices, got {got}")]
    TooFewSlices { got: usize },

    #[error(transparent)]
    Symbol(#[from] symbol_calculus::SymbolError),

    #[error(transparent)]
    Measure(#[from] levy_core::LevyError),
}
