//! Lattice helpers shared by the density builders and kernel audits.
//!
//! Everything here works on the engine's transform convention: the
//! forward image of f is F(xi) = int f(x) exp(-i 2 pi xi . x) dx, so a
//! multiplier psi(xi) realizes the generator, exp(i 2 pi xi . h) realizes
//! f(. + h), and (i 2 pi xi)^k realizes D^k.

use num_complex::Complex64;
use symbol_calculus::{Field, GridSpec, Space};

use crate::error::DensityError;

/// Frequency-space field from raw multiplier values.
pub(crate) fn freq_field(grid: GridSpec, values: Vec<Complex64>) -> Field {
    let mut f = Field::zeros(grid, Space::Frequency);
    f.values = values;
    f
}

/// exp(i 2 pi xi . h) on the lattice: the translation f(. + h).
pub(crate) fn shift_phase(grid: GridSpec, h: &[f64]) -> Vec<Complex64> {
    assert_eq!(h.len(), grid.dim);
    let mut xi = vec![0.0; grid.dim];
    let mut out = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        grid.freqs(flat, &mut xi);
        let phase: f64 = xi.iter().zip(h).map(|(a, b)| a * b).sum();
        out.push(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase));
    }
    out
}

/// prod_a (i 2 pi xi_a)^{k_a}, the mixed derivative D^k.
pub(crate) fn deriv_phase(grid: GridSpec, k: &[u32]) -> Vec<Complex64> {
    assert_eq!(k.len(), grid.dim);
    let mut xi = vec![0.0; grid.dim];
    let mut out = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        grid.freqs(flat, &mut xi);
        let mut v = Complex64::new(1.0, 0.0);
        for (a, &ka) in k.iter().enumerate() {
            v *= Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi[a]).powu(ka);
        }
        out.push(v);
    }
    out
}

/// Largest |value| over the Nyquist shell (some axis at index 0, the
/// unpaired k = -n/2 row).  The decay there bounds what aliasing folds
/// back onto the lattice.
pub(crate) fn nyquist_shell_max(grid: GridSpec, values: &[Complex64]) -> f64 {
    let mut idx = vec![0usize; grid.dim];
    let mut worst = 0.0f64;
    for (flat, v) in values.iter().enumerate() {
        grid.unflatten(flat, &mut idx);
        if idx.iter().take(grid.dim).any(|&i| i == 0) {
            worst = worst.max(v.norm());
        }
    }
    worst
}

/// Max |value| over the whole lattice.
pub(crate) fn global_max(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Fail unless the multiplier has decayed to `rel_tol` of its peak on
/// the Nyquist shell.
pub(crate) fn aliasing_guard(
    grid: GridSpec,
    values: &[Complex64],
    t: f64,
    rel_tol: f64,
) -> Result<(), DensityError> {
    let peak = global_max(values);
    let shell = nyquist_shell_max(grid, values);
    if shell > rel_tol * peak.max(f64::MIN_POSITIVE) {
        return Err(DensityError::Aliasing {
            t,
            decay: shell / peak.max(f64::MIN_POSITIVE),
            required: rel_tol,
            n: grid.n,
            period: grid.period,
        });
    }
    Ok(())
}

/// dx^d sum over the lattice points with |x - center| > radius (or the
/// complement), of |values|.
pub(crate) fn masked_l1(field: &Field, center: &[f64], radius: f64, outside: bool) -> f64 {
    let grid = field.grid();
    assert_eq!(center.len(), grid.dim);
    let mut x = vec![0.0; grid.dim];
    let mut terms = Vec::with_capacity(grid.len());
    for (flat, v) in field.values.iter().enumerate() {
        grid.coords(flat, &mut x);
        let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
        if (d2 > radius * radius) == outside {
            terms.push(v.norm());
        }
    }
    levy_core::numeric::pairwise_sum(&terms) * grid.step().powi(grid.dim as i32)
}

/// Plain L_1 lattice integral of |values|.
pub(crate) fn field_l1(field: &Field) -> f64 {
    let grid = field.grid();
    let terms: Vec<f64> = field.values.iter().map(|v| v.norm()).collect();
    levy_core::numeric::pairwise_sum(&terms) * grid.step().powi(grid.dim as i32)
}

/// Circular convolution (int a(x - y) b(y) dy on the torus) of two
/// physical fields on one grid.
pub(crate) fn convolve(a: &Field, b: &Field) -> Result<Field, DensityError> {
    if a.grid() != b.grid() {
        return Err(DensityError::Config("convolution needs matching grids".into()));
    }
    let fa = a.to_frequency();
    let fb = b.to_frequency();
    let values: Vec<Complex64> =
        fa.values.iter().zip(&fb.values).map(|(x, y)| x * y).collect();
    Ok(freq_field(a.grid(), values).to_physical())
}
