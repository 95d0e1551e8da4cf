//! Scalable Levy measures and the admissibility checks built on them.
//!
//! A Levy measure pi on R^d \ {0} is admissible of order sigma when
//! int (|y|^2 /\ 1) pi(dy) < infty, with the usual extra constraints at the
//! endpoints: a first moment outside the unit ball for sigma in (1,2) and
//! shell-wise symmetry for sigma = 1.  Everything downstream (symbols,
//! function spaces, heat kernels, the Cauchy solver) consumes measures
//! through the types defined here.
//!
//! The crate also carries the scaling apparatus: a scaling function kappa
//! with factor l, the derived inverses gamma(t) = inf{r : l(r) >= t} and
//! a(t) = inf{r : kappa(r) >= t}, and the rescaled family
//! pi_R(Gamma) = kappa(R) int chi_Gamma(y/R) pi(dy).  The admissibility
//! checks (lower bound by a fixed reference measure, uniform moment bounds,
//! reference-measure regularity) quantify over that family, so they live
//! next to the scaling code rather than with any particular solver.
//!
//! Quadrature is one-dimensional throughout: measures are finite sums of
//! angular atoms times radial densities, so every integral reduces to a
//! radial one.  See [`quad`] for the panel scheme and the power-law
//! closures used on (0, r_min] and [r_max, infty).

pub mod assumptions;
pub mod bernstein;
pub mod error;
pub mod measure;
pub mod numeric;
pub mod oscillatory;
pub mod quad;
pub mod report;
pub mod scaling;

pub use assumptions::{
    check_assumption_a0, check_assumption_b, check_assumption_d, default_radius_grid,
    estimate_order, fit_reference_measure, AssumptionParams, OrderEstimate,
};
pub use error::{LevyError, MeasureError, QuadError, ScalingError};
pub use measure::{
    isotropic_atoms, scale_measure, AngularAtom, LevyMeasure, LogTable, RadialProfile,
    SimpleMeasure,
};
pub use report::CheckReport;
pub use scaling::{GenInverse, ScalarCurve, ScalingTriple};
