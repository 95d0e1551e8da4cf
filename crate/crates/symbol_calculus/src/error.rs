//! Error type for grid construction, transforms and symbol tabulation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("grid: {0}")]
    BadGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("expected a {expected:?}-space field")]
    WrongSpace { expected: crate::grid::Space },

    #[error("symbol quadrature did not converge at xi = {xi:?} (rel change {rel:.3e})")]
    NotConverged { xi: Vec<f64>, rel: f64 },

    #[error("comparator symbol vanishes at xi = {xi:?}")]
    DegenerateComparator { xi: Vec<f64> },

    #[error("parameter {name} = {value} outside {allowed}")]
    BadParameter { name: &'static str, value: f64, allowed: &'static str },

    #[error("persisted multiplier does not match: {0}")]
    CacheMismatch(String),

    #[error(transparent)]
    Measure(#[from] levy_core::LevyError),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("sidecar: {0}")]
    Sidecar(#[from] serde_json::Error),
}

impl From<levy_core::QuadError> for SymbolError {
    fn from(e: levy_core::QuadError) -> Self {
        SymbolError::Measure(e.into())
    }
}

impl From<levy_core::MeasureError> for SymbolError {
    fn from(e: levy_core::MeasureError) -> Self {
        SymbolError::Measure(e.into())
    }
}
