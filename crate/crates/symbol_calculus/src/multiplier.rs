//! Spectral multipliers: tabulated functions of frequency applied through
//! the transform, plus an in-memory cache and a binary persistence format.
//!
//! A multiplier is data, not a closure, so it can be hashed, cached and
//! shipped to disk: solvers reuse the same symbol across thousands of
//! time steps and across processes.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SymbolError;
use crate::grid::{Field, GridSpec, Space};

/// Identity of a tabulated multiplier: which measure, which grid, which
/// family, and the family parameter when there is one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplierKey {
    pub measure: u64,
    pub grid: u64,
    pub family: String,
    pub param_bits: u64,
}

impl MultiplierKey {
    pub fn new(measure: u64, grid: &GridSpec, family: &str, param: Option<f64>) -> Self {
        MultiplierKey {
            measure,
            grid: grid.fingerprint(),
            family: family.to_owned(),
            param_bits: param.map_or(0, f64::to_bits),
        }
    }
}

/// A function of frequency tabulated on the dual lattice of a grid.
#[derive(Debug, Clone)]
pub struct SpectralMultiplier {
    grid: GridSpec,
    key: MultiplierKey,
    pub values: Vec<Complex64>,
}

impl SpectralMultiplier {
    pub fn new(grid: GridSpec, key: MultiplierKey, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.len());
        SpectralMultiplier { grid, key, values }
    }

    /// Tabulate a function of the frequency vector.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(
        grid: GridSpec,
        key: MultiplierKey,
        f: F,
    ) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        let mut xi = vec![0.0; grid.dim];
        for flat in 0..grid.len() {
            grid.freqs(flat, &mut xi);
            values.push(f(&xi));
        }
        SpectralMultiplier { grid, key, values }
    }

    pub fn constant(grid: GridSpec, c: Complex64) -> Self {
        let key = MultiplierKey::new(0, &grid, "constant", Some(c.re));
        SpectralMultiplier { grid, key, values: vec![c; grid.len()] }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn key(&self) -> &MultiplierKey {
        &self.key
    }

    /// Value at the zero frequency.
    pub fn at_zero(&self) -> Complex64 {
        self.values[self.grid.zero_index()]
    }

    /// Largest |Im| over the lattice; zero for symmetric real measures.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Transform, multiply pointwise, transform back to the input's
    /// space.  Frequency-space inputs stay in frequency space.
    pub fn apply(&self, f: &Field) -> Result<Field, SymbolError> {
        if f.grid() != self.grid {
            return Err(SymbolError::GridMismatch);
        }
        let mut hat = f.to_frequency();
        for (v, m) in hat.values.iter_mut().zip(&self.values) {
            *v *= m;
        }
        Ok(match f.space() {
            Space::Physical => hat.to_physical(),
            Space::Frequency => hat,
        })
    }

    /// Write `<stem>.bin` (little-endian re/im pairs in flat lattice
    /// order) and `<stem>.json` (key + grid sidecar).
    pub fn save(&self, dir: &Path, stem: &str) -> Result<(), SymbolError> {
        let mut bytes = Vec::with_capacity(16 * self.values.len());
        for v in &self.values {
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
        std::fs::File::create(dir.join(format!("{stem}.bin")))?.write_all(&bytes)?;
        let sidecar = Sidecar { key: self.key.clone(), grid: self.grid, len: self.values.len() };
        let json = serde_json::to_vec_pretty(&sidecar)?;
        std::fs::File::create(dir.join(format!("{stem}.json")))?.write_all(&json)?;
        Ok(())
    }

    /// Load a persisted multiplier, verifying the sidecar against the
    /// expected key.
    pub fn load(dir: &Path, stem: &str, expected: &MultiplierKey) -> Result<Self, SymbolError> {
        let json = std::fs::read(dir.join(format!("{stem}.json")))?;
        let sidecar: Sidecar = serde_json::from_slice(&json)?;
        if &sidecar.key != expected {
            return Err(SymbolError::CacheMismatch(format!(
                "key {:?} on disk, {:?} requested",
                sidecar.key, expected
            )));
        }
        if sidecar.grid.fingerprint() != sidecar.key.grid {
            return Err(SymbolError::CacheMismatch("sidecar grid/key disagree".into()));
        }
        let mut bytes = Vec::new();
        std::fs::File::open(dir.join(format!("{stem}.bin")))?.read_to_end(&mut bytes)?;
        if bytes.len() != 16 * sidecar.len || sidecar.len != sidecar.grid.len() {
            return Err(SymbolError::CacheMismatch(format!(
                "payload {} bytes for {} lattice points",
                bytes.len(),
                sidecar.len
            )));
        }
        let values = bytes
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(SpectralMultiplier { grid: sidecar.grid, key: sidecar.key, values })
    }
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    key: MultiplierKey,
    grid: GridSpec,
    len: usize,
}

/// Thread-safe build-once cache keyed by [`MultiplierKey`].
#[derive(Default)]
pub struct MultiplierCache {
    map: Mutex<HashMap<MultiplierKey, Arc<SpectralMultiplier>>>,
}

impl MultiplierCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Return the cached multiplier or build, store and return it.
    pub fn get_or_build<F>(
        &self,
        key: &MultiplierKey,
        build: F,
    ) -> Result<Arc<SpectralMultiplier>, SymbolError>
    where
        F: FnOnce() -> Result<SpectralMultiplier, SymbolError>,
    {
        if let Some(hit) = self.map.lock().unwrap().get(key) {
            return Ok(hit.clone());
        }
        // Build outside the lock; a racing duplicate build is harmless.
        let built = Arc::new(build()?);
        let mut map = self.map.lock().unwrap();
        Ok(map.entry(key.clone()).or_insert(built).clone())
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> GridSpec {
        GridSpec::new(1, 32, 4.0).unwrap()
    }

    #[test]
    fn unit_multiplier_is_the_identity() {
        let g = grid();
        let f = Field::from_real_fn(g, |x| (-x[0] * x[0]).exp() + 0.2 * x[0].sin());
        let out = SpectralMultiplier::constant(g, Complex64::new(1.0, 0.0)).apply(&f).unwrap();
        for (a, b) in f.values.iter().zip(&out.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_is_scaled_by_the_symbol_value() {
        let g = grid();
        let xi0 = 2.0 / g.period;
        let m = SpectralMultiplier::from_fn(g, MultiplierKey::new(1, &g, "test", None), |xi| {
            Complex64::new(xi[0] * xi[0], -xi[0])
        });
        let f = Field::from_physical_fn(g, |x| {
            Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi0 * x[0]).exp()
        });
        let out = m.apply(&f).unwrap();
        let expect = Complex64::new(xi0 * xi0, -xi0);
        for (v, base) in out.values.iter().zip(&f.values) {
            assert!((v - expect * base).norm() < 1e-10);
        }
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let m = SpectralMultiplier::constant(grid(), Complex64::new(1.0, 0.0));
        let other = GridSpec::new(1, 64, 4.0).unwrap();
        let f = Field::zeros(other, Space::Physical);
        assert!(matches!(m.apply(&f), Err(SymbolError::GridMismatch)));
    }

    #[test]
    fn frequency_space_input_stays_in_frequency_space() {
        let g = grid();
        let m = SpectralMultiplier::constant(g, Complex64::new(2.0, 0.0));
        let f = Field::from_real_fn(g, |x| x[0].cos()).to_frequency();
        let out = m.apply(&f).unwrap();
        assert_eq!(out.space(), Space::Frequency);
        for (a, b) in f.values.iter().zip(&out.values) {
            assert!((2.0 * *a - *b).norm() < 1e-12);
        }
    }

    #[test]
    fn cache_builds_once() {
        let g = grid();
        let cache = MultiplierCache::new();
        let key = MultiplierKey::new(7, &g, "test", Some(0.5));
        let mut builds = 0;
        for _ in 0..3 {
            let m = cache
                .get_or_build(&key, || {
                    builds += 1;
                    Ok(SpectralMultiplier::constant(g, Complex64::new(0.5, 0.0)))
                })
                .unwrap();
            assert_relative_eq!(m.values[0].re, 0.5);
        }
        assert_eq!(builds, 1);
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn persistence_roundtrips_and_validates() {
        let g = grid();
        let dir = tempfile::tempdir().unwrap();
        let key = MultiplierKey::new(11, &g, "symbol", None);
        let m = SpectralMultiplier::from_fn(g, key.clone(), |xi| {
            Complex64::new(-xi[0].abs(), 0.1 * xi[0])
        });
        m.save(dir.path(), "psi").unwrap();
        let back = SpectralMultiplier::load(dir.path(), "psi", &key).unwrap();
        assert_eq!(back.values, m.values);
        assert_eq!(back.grid(), g);

        let wrong = MultiplierKey::new(12, &g, "symbol", None);
        assert!(matches!(
            SpectralMultiplier::load(dir.path(), "psi", &wrong),
            Err(SymbolError::CacheMismatch(_))
        ));
    }
}
