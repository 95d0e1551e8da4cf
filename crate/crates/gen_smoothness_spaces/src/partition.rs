//! Littlewood-Paley partition of the frequency lattice.
//!
//! The base profile is the C^inf bump exp(-1/(1-u^2)) on |u| < 1,
//! applied to u = log_N |xi|, so the ring phi(N^{-j} xi) lives on
//! N^{j-1} < |xi| < N^{j+1}.  Normalizing by the log-periodic envelope
//! sum makes the rings sum to one away from the origin.  Two blocks
//! absorb remainders instead of being evaluated directly: block 0 takes
//! 1 minus the rings (the low end), and lattice points past the
//! coverage radius N^{j_max} route their remainder to the last block
//! and are counted in `beyond_coverage`.  The partition-of-unity
//! identity therefore holds to a rounding (re-summing 1 - acc with acc
//! costs an ulp when acc < 1/2) rather than by quadrature accuracy.

use crate::error::SpaceError;
use num_complex::Complex64;
use symbol_calculus::{GridSpec, MultiplierKey, SpectralMultiplier};

/// Unnormalized C^inf bump on (-1, 1).
fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// One normalized ring, evaluated at u = log_N(|xi| / N^j).  The
/// envelope sum has at most two live terms; scanning four neighbors
/// covers every rounding of the integer offset.
fn ring(u: f64) -> f64 {
    let num = bump(u);
    if num == 0.0 {
        return 0.0;
    }
    let base = u.floor();
    let mut den = 0.0;
    for k in -1..=2 {
        den += bump(u - (base + k as f64));
    }
    num / den
}

/// Smooth dyadic-type frequency decomposition with base N.
#[derive(Debug, Clone)]
pub struct LPPartition {
    n_base: u32,
    grid: GridSpec,
    blocks: Vec<SpectralMultiplier>,
    tilde: Vec<SpectralMultiplier>,
    /// Lattice points past the coverage radius N^{j_max} whose mass was
    /// absorbed by the last block.  Zero when j_max covers the corner.
    pub beyond_coverage: usize,
}

/// Build the partition covering the corner radius of the lattice.
pub fn build_partition(n_base: u32, grid: GridSpec) -> Result<LPPartition, SpaceError> {
    if n_base < 2 {
        return Err(SpaceError::BadParameter {
            name: "n_base",
            value: n_base as f64,
            allowed: "integers >= 2",
        });
    }
    let nb = n_base as f64;
    let radius = (grid.dim as f64).sqrt() * grid.nyquist();
    let j_max = radius.log(nb).ceil();
    if !(j_max >= 2.0) {
        return Err(SpaceError::Config(format!(
            "base {n_base} yields {} blocks on a grid with corner radius {radius:.3}; \
             at least 3 are needed",
            j_max.max(0.0) + 1.0
        )));
    }
    let j_max = j_max as usize;
    let coverage = nb.powi(j_max as i32);

    let len = grid.len();
    let mut vals = vec![vec![Complex64::new(0.0, 0.0); len]; j_max + 1];
    let mut xi = vec![0.0; grid.dim];
    let mut beyond = 0usize;
    for flat in 0..len {
        grid.freqs(flat, &mut xi);
        let s = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s == 0.0 {
            vals[0][flat] = Complex64::new(1.0, 0.0);
            continue;
        }
        let t = s.log(nb);
        let mut acc = 0.0;
        for (j, col) in vals.iter_mut().enumerate().skip(1) {
            let v = ring(t - j as f64);
            col[flat] = Complex64::new(v, 0.0);
            acc += v;
        }
        let rem = 1.0 - acc;
        if s > coverage {
            beyond += 1;
            vals[j_max][flat] += rem;
        } else {
            vals[0][flat] = Complex64::new(rem, 0.0);
        }
    }

    let tilde_vals: Vec<Vec<Complex64>> = (0..=j_max)
        .map(|j| {
            (0..len)
                .map(|flat| {
                    let lo = j.saturating_sub(1);
                    let hi = (j + 1).min(j_max);
                    (lo..=hi).map(|k| vals[k][flat]).sum()
                })
                .collect()
        })
        .collect();

    let wrap = |family: &str, j: usize, v: Vec<Complex64>| {
        let key = MultiplierKey::new(n_base as u64, &grid, family, Some(j as f64));
        SpectralMultiplier::new(grid, key, v)
    };
    let blocks = vals
        .into_iter()
        .enumerate()
        .map(|(j, v)| wrap("lp_block", j, v))
        .collect();
    let tilde = tilde_vals
        .into_iter()
        .enumerate()
        .map(|(j, v)| wrap("lp_tilde", j, v))
        .collect();
    Ok(LPPartition { n_base, grid, blocks, tilde, beyond_coverage: beyond })
}

impl LPPartition {
    pub fn n_base(&self) -> u32 {
        self.n_base
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Number of blocks, j_max + 1.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn j_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, j: usize) -> &SpectralMultiplier {
        &self.blocks[j]
    }

    pub fn tilde(&self, j: usize) -> &SpectralMultiplier {
        &self.tilde[j]
    }

    pub fn blocks(&self) -> &[SpectralMultiplier] {
        &self.blocks
    }

    /// Worst deviation of the block sum from one over the lattice.
    pub fn partition_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for flat in 0..self.grid.len() {
            let sum: Complex64 = self.blocks.iter().map(|b| b.values[flat]).sum();
            worst = worst.max((sum - Complex64::new(1.0, 0.0)).norm());
        }
        worst
    }

    /// Worst block mass outside the annulus N^{j-1} <= |xi| <= N^{j+1},
    /// for j >= 1.  The last block is open above by construction.
    pub fn support_defect(&self) -> f64 {
        let nb = self.n_base as f64;
        let mut xi = vec![0.0; self.grid.dim];
        let mut worst = 0.0f64;
        for (j, block) in self.blocks.iter().enumerate().skip(1) {
            let lo = nb.powi(j as i32 - 1);
            let hi = if j == self.j_max() { f64::INFINITY } else { nb.powi(j as i32 + 1) };
            for flat in 0..self.grid.len() {
                self.grid.freqs(flat, &mut xi);
                let s = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
                if s < lo || s > hi {
                    worst = worst.max(block.values[flat].norm());
                }
            }
        }
        worst
    }

    /// Worst deviation from phi~_j phi_j = phi_j over blocks and lattice.
    pub fn tilde_identity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (b, t) in self.blocks.iter().zip(&self.tilde) {
            for (bv, tv) in b.values.iter().zip(&t.values) {
                worst = worst.max((tv * bv - bv).norm());
            }
        }
        worst
    }
}
