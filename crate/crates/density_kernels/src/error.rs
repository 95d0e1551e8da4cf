//! Error type for density construction and kernel audits.

use levy_core::MeasureError;
use symbol_calculus::SymbolError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DensityError {
    /// Free-form configuration problem.
    #[error("config: {0}")]
    Config(String),

    #[error("parameter {name} = {value} outside {allowed}")]
    BadParameter { name: &'static str, value: f64, allowed: &'static str },

    /// The spectral factor has not decayed at the Nyquist shell, so the
    /// lattice would alias the result.  Enlarge the box or refine the
    /// lattice.
    #[error(
        "aliasing guard failed at t = {t:.6e}: Nyquist-shell decay {decay:.3e} > {required:.0e} \
         on the n = {n}, L = {period} grid; increase the box L or the point count n"
    )]
    Aliasing { t: f64, decay: f64, required: f64, n: usize, period: f64 },

    /// An integrability precheck failed: the named piece of the time
    /// integral diverges (fitted local exponent of t * integrand at the
    /// offending end).
    #[error("integrability hypothesis fails: the {piece} piece diverges (local exponent {exponent:.3})")]
    Integrability { piece: &'static str, exponent: f64 },

    /// A time quadrature ran out of panels before reaching its decay
    /// envelope.
    #[error(
        "time quadrature not converged by t = {t_max:.3e}: last-panel share {share:.3e} > {tol:.0e}"
    )]
    TimeTruncation { t_max: f64, share: f64, tol: f64 },

    #[error(transparent)]
    Symbol(#[from] SymbolError),

    #[error(transparent)]
    Measure(#[from] MeasureError),
}
