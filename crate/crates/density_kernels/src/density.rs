//! Transition densities p(t, .) of scalable Levy processes.
//!
//! The density is recovered spectrally: the engine-convention transform
//! of p(t, .) is exp(t conj psi(xi)) (the conjugate because the engine's
//! forward kernel is exp(-i 2 pi xi . x) while the exponent psi is
//! written against exp(+i 2 pi xi . y); the two coincide for symmetric
//! measures).  One inverse FFT then yields the density periodized onto
//! the torus.  Two structural facts come for free:
//!
//!   * the DC bin is psi(0) = 0, so the lattice mass dx^d sum p is
//!     exactly one;
//!   * p(t, x) = a(t)^{-d} p~(1, x / a(t)), where p~ is the density of
//!     the time-rescaled measure, holds exactly on a lattice whose box
//!     shrinks by a(t): both sides evaluate the same exponent at the
//!     same frequencies.
//!
//! The only failure mode is aliasing: if exp(t Re psi) has not decayed
//! at the Nyquist shell the inverse transform folds spectral mass back
//! onto the lattice.  [`density`] refuses such grids instead of
//! returning garbage.

use levy_core::{scale_measure, CheckReport, LevyMeasure, ScalingTriple};
use num_complex::Complex64;
use symbol_calculus::{symbol, Field, GridSpec};

use crate::error::DensityError;
use crate::ops;

/// Required Nyquist-shell decay of the heat factor exp(t Re psi).
pub const ALIAS_GUARD: f64 = 1e-12;

/// Box side resolving the density at time t: the bulk lives at scale
/// a(t), the floor keeps small times from collapsing the torus.
pub fn domain_size(triple: &ScalingTriple, t: f64) -> f64 {
    (32.0 * triple.a(t)).max(16.0)
}

/// Lattice values exp(t conj psi) with the DC bin pinned to one.
fn heat_values(sym_values: &[Complex64], t: f64, zero_index: usize) -> Vec<Complex64> {
    let mut values: Vec<Complex64> =
        sym_values.iter().map(|p| (p.conj() * t).exp()).collect();
    values[zero_index] = Complex64::new(1.0, 0.0);
    values
}

/// Density of Z_t on the torus: inverse transform of exp(t conj psi),
/// refused when the heat factor has not decayed at the Nyquist shell.
pub fn density(mu: &LevyMeasure, t: f64, grid: GridSpec) -> Result<Field, DensityError> {
    // A signed exponent generates no probability density.
    mu.as_simple()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(DensityError::BadParameter { name: "t", value: t, allowed: "(0, inf)" });
    }
    let sym = symbol(mu, grid)?;
    let values = heat_values(&sym.values, t, grid.zero_index());
    // The peak is the DC bin (|exp(t psi)| <= 1), so the relative guard
    // is the absolute decay exp(t Re psi(Nyquist)).
    ops::aliasing_guard(grid, &values, t, ALIAS_GUARD)?;
    Ok(ops::freq_field(grid, values).to_physical())
}

/// Worst relative L_1 discrepancy of p(t, x) against
/// a(t)^{-d} p~(1, x / a(t)) over `t_grid`, where p~ belongs to the
/// measure rescaled by a(t).  The rescaled density is evaluated on the
/// box shrunk by a(t), so both sides live on the same physical lattice
/// and the comparison carries no interpolation error.
pub fn density_scaling_check(
    mu: &LevyMeasure,
    triple: &ScalingTriple,
    t_grid: &[f64],
    grid: GridSpec,
    tol: f64,
) -> Result<CheckReport, DensityError> {
    if t_grid.is_empty() {
        return Err(DensityError::Config("scaling check needs at least one time".into()));
    }
    let dim = grid.dim as i32;
    let mut worst = 0.0f64;
    let mut worst_t = t_grid[0];
    // One base-symbol evaluation serves every time; the rescaled side
    // still goes through its own measure and quadrature.
    mu.as_simple().map_err(DensityError::from)?;
    let sym = symbol(mu, grid)?;
    for &t in t_grid {
        if !(t > 0.0 && t.is_finite()) {
            return Err(DensityError::BadParameter { name: "t", value: t, allowed: "(0, inf)" });
        }
        let a = triple.a(t);
        if !(a > 0.0 && a.is_finite()) {
            return Err(DensityError::BadParameter {
                name: "a(t)",
                value: a,
                allowed: "(0, inf): t outside the scaling window",
            });
        }
        let values = heat_values(&sym.values, t, grid.zero_index());
        ops::aliasing_guard(grid, &values, t, ALIAS_GUARD)?;
        let lhs = ops::freq_field(grid, values).to_physical();
        // kappa(a(t)) = t by construction of the generalized inverse.
        let scaled = scale_measure(mu, a, t);
        let unit_grid = GridSpec::new(grid.dim, grid.n, grid.period / a)?;
        let rhs = density(&scaled, 1.0, unit_grid)?;
        let factor = a.powi(-dim);
        let diff: Vec<f64> = lhs
            .values
            .iter()
            .zip(&rhs.values)
            .map(|(l, r)| (l - r * factor).norm())
            .collect();
        let num = levy_core::numeric::pairwise_sum(&diff) * grid.step().powi(dim);
        let rel = num / ops::field_l1(&lhs);
        if rel > worst {
            worst = rel;
            worst_t = t;
        }
    }
    Ok(CheckReport::upper("density_scaling_identity", worst, tol).at(vec![worst_t]))
}
