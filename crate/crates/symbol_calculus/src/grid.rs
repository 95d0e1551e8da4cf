//! Centered periodic grids and the discrete Fourier transform on them.
//!
//! The torus [-L/2, L/2)^d is sampled at x_j = (j - n/2) dx, dx = L/n,
//! and the dual lattice is xi_k = (k - n/2)/L.  With both grids centered,
//! the transform picks up only sign flips relative to the raw DFT:
//!
//! ```text
//! F(xi_k) = dx^d (-1)^{sum k} DFT[ f (-1)^{sum j} ](k),
//! ```
//!
//! because exp(-i 2 pi (k - n/2)(j - n/2)/n) splits into the DFT kernel,
//! (-1)^j, (-1)^k and a constant phase exp(-i pi n/2) that equals 1 for
//! n divisible by 4 (n here is a power of two, at least 8).  The factor
//! dx^d makes the discrete transform consistent with the continuum one,
//! so symbols tabulated from integrals over R^d apply without rescaling.
//!
//! Axis index 0 varies fastest in the flat layout.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::SymbolError;

/// Uniform periodic grid: `n` points per axis (power of two, >= 8) on a
/// torus of side `period`, in `dim` <= 3 dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self, SymbolError> {
        if !(1..=3).contains(&dim) {
            return Err(SymbolError::BadGrid(format!("dim {dim} not in 1..=3")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(SymbolError::BadGrid(format!("n {n} must be a power of two >= 8")));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(SymbolError::BadGrid(format!("period {period} must be positive")));
        }
        Ok(GridSpec { dim, n, period })
    }

    /// Total number of lattice points n^dim.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Physical mesh width dx = L/n.
    pub fn step(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Highest resolved frequency n / (2L).
    pub fn nyquist(&self) -> f64 {
        self.n as f64 / (2.0 * self.period)
    }

    /// Physical coordinate of axis index j.
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.n as f64 / 2.0) * self.step()
    }

    /// Frequency of axis index k.
    pub fn freq(&self, k: usize) -> f64 {
        (k as f64 - self.n as f64 / 2.0) / self.period
    }

    /// Decompose a flat index into per-axis indices (axis 0 fastest).
    pub fn unflatten(&self, flat: usize, idx: &mut [usize]) {
        let mut rest = flat;
        for slot in idx.iter_mut().take(self.dim) {
            *slot = rest % self.n;
            rest /= self.n;
        }
    }

    /// Physical coordinates of a flat index.
    pub fn coords(&self, flat: usize, out: &mut [f64]) {
        let mut rest = flat;
        for slot in out.iter_mut().take(self.dim) {
            *slot = self.x(rest % self.n);
            rest /= self.n;
        }
    }

    /// Frequency coordinates of a flat index.
    pub fn freqs(&self, flat: usize, out: &mut [f64]) {
        let mut rest = flat;
        for slot in out.iter_mut().take(self.dim) {
            *slot = self.freq(rest % self.n);
            rest /= self.n;
        }
    }

    /// Flat index of the zero frequency (k = n/2 on every axis).
    pub fn zero_index(&self) -> usize {
        let mut flat = 0;
        for _ in 0..self.dim {
            flat = flat * self.n + self.n / 2;
        }
        flat
    }

    /// Stable hash for cache keys and persistence sidecars.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.dim as u64);
        eat(self.n as u64);
        eat(self.period.to_bits());
        h
    }
}

/// Which side of the transform a [`Field`] currently lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Physical,
    Frequency,
}

/// Complex lattice data tied to a grid and a side of the transform.
#[derive(Debug, Clone)]
pub struct Field {
    grid: GridSpec,
    space: Space,
    pub values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: GridSpec, space: Space) -> Field {
        Field { grid, space, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Sample a complex function of physical coordinates.
    pub fn from_physical_fn<F: Fn(&[f64]) -> Complex64>(grid: GridSpec, f: F) -> Field {
        let mut values = Vec::with_capacity(grid.len());
        let mut x = vec![0.0; grid.dim];
        for flat in 0..grid.len() {
            grid.coords(flat, &mut x);
            values.push(f(&x));
        }
        Field { grid, space: Space::Physical, values }
    }

    /// Sample a real function of physical coordinates.
    pub fn from_real_fn<F: Fn(&[f64]) -> f64>(grid: GridSpec, f: F) -> Field {
        Self::from_physical_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn expect_space(&self, expected: Space) -> Result<(), SymbolError> {
        if self.space == expected {
            Ok(())
        } else {
            Err(SymbolError::WrongSpace { expected })
        }
    }

    /// Forward transform (physical -> frequency); identity if already there.
    pub fn to_frequency(&self) -> Field {
        match self.space {
            Space::Frequency => self.clone(),
            Space::Physical => {
                let mut values = self.values.clone();
                checkerboard(&self.grid, &mut values);
                fft_all_axes(&self.grid, &mut values, false);
                checkerboard(&self.grid, &mut values);
                let scale = self.grid.step().powi(self.grid.dim as i32);
                for v in &mut values {
                    *v *= scale;
                }
                Field { grid: self.grid, space: Space::Frequency, values }
            }
        }
    }

    /// Inverse transform (frequency -> physical); identity if already there.
    pub fn to_physical(&self) -> Field {
        match self.space {
            Space::Physical => self.clone(),
            Space::Frequency => {
                let mut values = self.values.clone();
                checkerboard(&self.grid, &mut values);
                fft_all_axes(&self.grid, &mut values, true);
                checkerboard(&self.grid, &mut values);
                // Undo dx^d and the unnormalized inverse DFT's n^d.
                let scale = 1.0
                    / (self.grid.step().powi(self.grid.dim as i32)
                        * (self.grid.len() as f64));
                for v in &mut values {
                    *v *= scale;
                }
                Field { grid: self.grid, space: Space::Physical, values }
            }
        }
    }

    /// Largest deviation from F(-xi) = conj F(xi); zero (to roundoff) for
    /// transforms of real data.  The k = -n/2 rows pair with themselves
    /// through aliasing.
    pub fn conjugate_symmetry_defect(&self) -> Result<f64, SymbolError> {
        self.expect_space(Space::Frequency)?;
        let n = self.grid.n;
        let mut idx = vec![0usize; self.grid.dim];
        let mut worst = 0.0f64;
        for flat in 0..self.grid.len() {
            self.grid.unflatten(flat, &mut idx);
            let mut mirror = 0usize;
            for &i in idx.iter().rev() {
                let m = if i == 0 { 0 } else { n - i };
                mirror = mirror * n + m;
            }
            let d = (self.values[mirror] - self.values[flat].conj()).norm();
            worst = worst.max(d);
        }
        Ok(worst)
    }

    /// Discrete L_p norm (dx^d sum |v|^p)^{1/p} in physical space.
    pub fn lp_norm(&self, p: f64) -> Result<f64, SymbolError> {
        self.expect_space(Space::Physical)?;
        assert!(p >= 1.0 && p.is_finite());
        let terms: Vec<f64> = self.values.iter().map(|v| v.norm().powf(p)).collect();
        let sum = levy_core::numeric::pairwise_sum(&terms);
        Ok((sum * self.grid.step().powi(self.grid.dim as i32)).powf(1.0 / p))
    }

    /// Sup norm over the lattice.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Multiply by (-1)^{j_0 + ... + j_{d-1}} in place.
fn checkerboard(grid: &GridSpec, values: &mut [Complex64]) {
    let mut idx = vec![0usize; grid.dim];
    for flat in 0..values.len() {
        grid.unflatten(flat, &mut idx);
        let s: usize = idx.iter().sum();
        if s % 2 == 1 {
            values[flat] = -values[flat];
        }
    }
}

/// Unnormalized DFT along every axis (axis 0 fastest in memory).
fn fft_all_axes(grid: &GridSpec, values: &mut [Complex64], inverse: bool) {
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut lane = vec![Complex64::new(0.0, 0.0); n];
    let total = values.len();
    for axis in 0..grid.dim {
        let stride = n.pow(axis as u32);
        let block = stride * n;
        let lanes = total / n;
        for l in 0..lanes {
            // Lane l covers indices base + t*stride, t = 0..n.
            let base = (l / stride) * block + (l % stride);
            for (t, slot) in lane.iter_mut().enumerate() {
                *slot = values[base + t * stride];
            }
            fft.process(&mut lane);
            for (t, slot) in lane.iter().enumerate() {
                values[base + t * stride] = *slot;
            }
        }
    }
}
