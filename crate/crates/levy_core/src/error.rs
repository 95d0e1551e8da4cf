//! Error types shared across the crate.
//!
//! Validation failures carry enough context to point at the offending
//! component (atom index, radius, regime) so that a config-level caller can
//! report a usable diagnostic without re-deriving anything.

use thiserror::Error;

/// Rejections raised while validating or evaluating a measure.
#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("dimension {0} unsupported, expected 1, 2 or 3")]
    BadDimension(usize),
    #[error("order sigma = {0} outside (0, 2)")]
    BadOrder(f64),
    #[error("atom {index} has nonpositive weight {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("atom {index} direction has norm {norm}, expected 1 within 1e-12")]
    BadDirection { index: usize, norm: f64 },
    #[error("radial support cut invalid: r_min = {r_min}, r_max = {r_max}")]
    BadSupport { r_min: f64, r_max: f64 },
    #[error("small-jump moment int_0^1 r^2 g(r) dr diverges (local order >= 2)")]
    LocalMomentDivergent,
    #[error("order sigma = {sigma} requires a finite first moment outside the unit ball, got local tail exponent {exponent}")]
    TailMomentDivergent { sigma: f64, exponent: f64 },
    #[error("order 1 requires shell-wise symmetry; atom {index} has no mirror of equal weight and profile")]
    AsymmetricAtOrderOne { index: usize },
    #[error("radial table is empty or not strictly increasing in r")]
    BadTable,
    #[error("expected a nonnegative measure, got a signed difference")]
    SignedMeasure,
    #[error("reference-measure atom {index} has no matching direction in the target measure")]
    AtomMismatch { index: usize },
    #[error("a-factor length {got} does not match atom count {want}")]
    BadAFactor { got: usize, want: usize },
    #[error("moment exponents (alpha1, alpha2) = ({alpha1}, {alpha2}) outside the regime for order {sigma}")]
    BadMomentExponents { alpha1: f64, alpha2: f64, sigma: f64 },
}

/// Failures of the radial quadrature layer.
#[derive(Debug, Error)]
pub enum QuadError {
    #[error("integral diverges at {place}: fitted local exponent {exponent} (needs {needed})")]
    Divergent {
        place: &'static str,
        exponent: f64,
        needed: &'static str,
    },
    #[error("panel refinement did not converge: relative change {rel_change} after doubling")]
    NotConverged { rel_change: f64 },
    #[error("empty integration range [{lo}, {hi}]")]
    EmptyRange { lo: f64, hi: f64 },
}

/// Failures while building or auditing a scaling triple.
#[derive(Debug, Error)]
pub enum ScalingError {
    #[error("scaling factor l is not nondecreasing near r = {0}")]
    FactorNotMonotone(f64),
    #[error("curve evaluates to a nonpositive value {value} at r = {radius}")]
    NonpositiveCurve { radius: f64, value: f64 },
    #[error("subadditivity kappa(eps r) <= l(eps) kappa(r) fails at eps = {eps}, r = {radius}: ratio {ratio}")]
    NotSubadditive { eps: f64, radius: f64, ratio: f64 },
    #[error("fitted order bounds degenerate: delta1 = {delta1}, delta2 = {delta2} (need 0 < delta1 <= delta2 < 1)")]
    OrderDegenerate { delta1: f64, delta2: f64 },
    #[error("curve has no finite positive values to invert")]
    EmptyCurve,
    #[error("no integer base N <= {0} with l(1/N) < 1")]
    NoContractionBase(u32),
    #[error("Bernstein function parameters out of range: {0}")]
    BadBernstein(&'static str),
}

/// Umbrella error for callers that mix the layers.
#[derive(Debug, Error)]
pub enum LevyError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
}
