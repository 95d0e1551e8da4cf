//! Function-space norms built on the block decomposition: Besov-type
//! block sums, Triebel-type square functions, Bessel-multiplier routes,
//! difference (averaged-oscillation) characterizations and the
//! space-time composites.
//!
//! All norms act on physical-space fields sampled on the torus; the L_p
//! integrals are plain Riemann sums (spectrally accurate for the smooth
//! fields these spaces are audited with).  The m-th difference in the
//! oscillation norm is applied as the Fourier multiplier
//! (e^{i 2 pi xi . h} - 1)^m, which on band-limited lattice data is the
//! exact translation, not an interpolation.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::SpaceError;
use crate::partition::{build_partition, LPPartition};
use levy_core::{numeric::pairwise_sum, LevyMeasure, ScalingTriple};
use symbol_calculus::{
    bessel_multiplier, Field, GridSpec, MultiplierCache, MultiplierKey, Space,
    SpectralMultiplier,
};

/// Everything the norms need besides the field: the partition, the
/// scaling calibration, the reference measure for Bessel routes and a
/// cache so repeated s values build their multiplier once.
pub struct NormContext {
    partition: LPPartition,
    triple: ScalingTriple,
    mu: LevyMeasure,
    alpha1: f64,
    cache: MultiplierCache,
}

impl NormContext {
    /// Validates the measure, requires l(1/N) < 1 (the block weights
    /// must contract) and a positive upper scaling exponent alpha1.
    pub fn new(
        mu: LevyMeasure,
        triple: ScalingTriple,
        alpha1: f64,
        n_base: u32,
        grid: GridSpec,
    ) -> Result<Self, SpaceError> {
        mu.validate().map_err(levy_core::LevyError::from)?;
        if !(alpha1 > 0.0 && alpha1.is_finite()) {
            return Err(SpaceError::BadParameter {
                name: "alpha1",
                value: alpha1,
                allowed: "(0, inf)",
            });
        }
        let contraction = triple.ell_at(1.0 / n_base as f64);
        if !(contraction < 1.0) {
            return Err(SpaceError::Config(format!(
                "scaling factor l(1/{n_base}) = {contraction:.6} is not below one; \
                 pick a larger base"
            )));
        }
        let partition = build_partition(n_base, grid)?;
        Ok(NormContext { partition, triple, mu, alpha1, cache: MultiplierCache::new() })
    }

    pub fn partition(&self) -> &LPPartition {
        &self.partition
    }

    pub fn grid(&self) -> GridSpec {
        self.partition.grid()
    }

    pub fn n_base(&self) -> u32 {
        self.partition.n_base()
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn measure(&self) -> &LevyMeasure {
        &self.mu
    }

    pub fn kappa_at(&self, r: f64) -> f64 {
        self.triple.kappa_at(r)
    }

    /// kappa(N^{-j}), the calibration weight of block j.
    pub fn kappa_block(&self, j: usize) -> f64 {
        self.triple.kappa_at((self.partition.n_base() as f64).powi(-(j as i32)))
    }

    /// The multiplier (1 - psi^{mu_sym})^s, cached per s.
    pub fn bessel(&self, s: f64) -> Result<Arc<SpectralMultiplier>, SpaceError> {
        let key = MultiplierKey::new(self.mu.fingerprint(), &self.grid(), "ctx_bessel", Some(s));
        self.cache
            .get_or_build(&key, || bessel_multiplier(&self.mu, s, self.grid()))
            .map_err(SpaceError::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesovVariant {
    /// Block weights kappa(N^{-j})^{-s}.
    KappaWeighted,
    /// J^s applied to each block, unit weights.
    BesselWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriebelVariant {
    /// Pointwise l_2 over weighted blocks inside L_p.
    SquareFunction,
    /// |J^s f|_{L_p} with no decomposition.
    BesselDirect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DifferenceVariant {
    /// Pointwise l_2 of the oscillation in t inside L_p.
    SquareFunction,
    /// L_p per t, then L_q in t.
    TimeLq,
}

/// A computed norm with its parameters and per-block (or per-panel,
/// per-slice) breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub name: String,
    pub value: f64,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub n_base: u32,
    pub variant: String,
    pub block_contributions: Vec<f64>,
}

fn check_exponent(name: &'static str, v: f64) -> Result<(), SpaceError> {
    if v > 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SpaceError::BadParameter { name, value: v, allowed: "(1, inf)" })
    }
}

fn check_smoothness(s: f64) -> Result<(), SpaceError> {
    if s.is_finite() {
        Ok(())
    } else {
        Err(SpaceError::BadParameter { name: "s", value: s, allowed: "finite reals" })
    }
}

/// (sum c_j^q)^{1/q}, scaled to avoid overflow for large q.
fn lq_aggregate(contribs: &[f64], q: f64) -> f64 {
    let top = contribs.iter().fold(0.0f64, |a, c| a.max(*c));
    if top == 0.0 {
        return 0.0;
    }
    let terms: Vec<f64> = contribs.iter().map(|c| (c / top).powf(q)).collect();
    top * pairwise_sum(&terms).powf(1.0 / q)
}

/// Riemann L_p norm of a nonnegative lattice sample.
fn riemann_lp(vals: &[f64], grid: &GridSpec, p: f64) -> f64 {
    let terms: Vec<f64> = vals.iter().map(|v| v.abs().powf(p)).collect();
    (pairwise_sum(&terms) * grid.step().powi(grid.dim as i32)).powf(1.0 / p)
}

/// Besov norm: l_q over blocks of weighted L_p block norms.
pub fn besov_norm(
    f: &Field,
    s: f64,
    p: f64,
    q: f64,
    variant: BesovVariant,
    ctx: &NormContext,
) -> Result<NormReport, SpaceError> {
    f.expect_space(Space::Physical)?;
    check_smoothness(s)?;
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let fhat = f.to_frequency();
    let bessel = match variant {
        BesovVariant::BesselWeighted => Some(ctx.bessel(s)?),
        BesovVariant::KappaWeighted => None,
    };
    let part = ctx.partition();
    let mut contribs = Vec::with_capacity(part.len());
    for j in 0..part.len() {
        let mut bf = part.block(j).apply(&fhat)?;
        if let Some(m) = &bessel {
            bf = m.apply(&bf)?;
        }
        let norm = bf.to_physical().lp_norm(p)?;
        contribs.push(match variant {
            BesovVariant::KappaWeighted => ctx.kappa_block(j).powf(-s) * norm,
            BesovVariant::BesselWeighted => norm,
        });
    }
    Ok(NormReport {
        name: "besov".into(),
        value: lq_aggregate(&contribs, q),
        s,
        p,
        q,
        n_base: ctx.n_base(),
        variant: match variant {
            BesovVariant::KappaWeighted => "kappa_weighted".into(),
            BesovVariant::BesselWeighted => "bessel_weighted".into(),
        },
        block_contributions: contribs,
    })
}

/// Triebel norm: square function over weighted blocks inside L_p, or
/// the direct Bessel route |J^s f|_{L_p}.
pub fn triebel_norm(
    f: &Field,
    s: f64,
    p: f64,
    variant: TriebelVariant,
    ctx: &NormContext,
) -> Result<NormReport, SpaceError> {
    f.expect_space(Space::Physical)?;
    check_smoothness(s)?;
    check_exponent("p", p)?;
    let grid = ctx.grid();
    let (value, contribs) = match variant {
        TriebelVariant::SquareFunction => {
            let fhat = f.to_frequency();
            let part = ctx.partition();
            let mut acc = vec![0.0f64; grid.len()];
            let mut contribs = Vec::with_capacity(part.len());
            for j in 0..part.len() {
                let bf = part.block(j).apply(&fhat)?.to_physical();
                let w = ctx.kappa_block(j).powf(-s);
                let mut weighted = Vec::with_capacity(grid.len());
                for (a, v) in acc.iter_mut().zip(&bf.values) {
                    let t = w * v.norm();
                    *a += t * t;
                    weighted.push(t);
                }
                contribs.push(riemann_lp(&weighted, &grid, p));
            }
            let sq: Vec<f64> = acc.iter().map(|a| a.sqrt()).collect();
            (riemann_lp(&sq, &grid, p), contribs)
        }
        TriebelVariant::BesselDirect => {
            // J^0 is the identity; skip the transform pair entirely.
            let value = if s == 0.0 {
                f.lp_norm(p)?
            } else {
                ctx.bessel(s)?.apply(f)?.lp_norm(p)?
            };
            (value, vec![value])
        }
    };
    Ok(NormReport {
        name: "triebel".into(),
        value,
        s,
        p,
        q: 2.0,
        n_base: ctx.n_base(),
        variant: match variant {
            TriebelVariant::SquareFunction => "square_function".into(),
            TriebelVariant::BesselDirect => "bessel_direct".into(),
        },
        block_contributions: contribs,
    })
}

/// Number of log-spaced t panels on [1e-4, 1].
const T_PANELS: usize = 64;
const T_LO: f64 = 1e-4;
/// Midpoint nodes per axis for the unit-ball y average.
const Y_PER_AXIS: usize = 32;

/// Midpoint nodes of the unit ball, as (offset, weight) pairs.
fn unit_ball_nodes(dim: usize) -> Vec<(Vec<f64>, f64)> {
    let h = 2.0 / Y_PER_AXIS as f64;
    let cell = h.powi(dim as i32);
    let mut nodes = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let y: Vec<f64> = idx.iter().map(|&i| -1.0 + (i as f64 + 0.5) * h).collect();
        if y.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            nodes.push((y, cell));
        }
        let mut axis = 0;
        loop {
            if axis == dim {
                return nodes;
            }
            idx[axis] += 1;
            if idx[axis] < Y_PER_AXIS {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// The multiplier of the m-th forward difference with step h.
fn difference_multiplier(grid: GridSpec, h: &[f64], m: u32) -> SpectralMultiplier {
    let key = MultiplierKey::new(0, &grid, "difference_step", None);
    SpectralMultiplier::from_fn(grid, key, |xi| {
        let theta: f64 =
            2.0 * std::f64::consts::PI * xi.iter().zip(h).map(|(a, b)| a * b).sum::<f64>();
        (Complex64::from_polar(1.0, theta) - 1.0).powu(m)
    })
}

/// Averaged-oscillation norm: |f|_{L_p} plus the weighted t-integral of
/// Q_t^m f(x) = avg_{|y|<=1} |D_{ty}^m f(x)|, aggregated per pk2-style
/// square function or per-time L_q.
pub fn difference_norm(
    f: &Field,
    s: f64,
    p: f64,
    q: f64,
    m: u32,
    variant: DifferenceVariant,
    ctx: &NormContext,
) -> Result<NormReport, SpaceError> {
    f.expect_space(Space::Physical)?;
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(SpaceError::BadParameter { name: "s", value: s, allowed: "(0, inf)" });
    }
    let m0 = (s * ctx.alpha1()).floor() as u32 + 1;
    if m < m0 {
        return Err(SpaceError::DifferenceOrder { m, m0 });
    }
    let grid = ctx.grid();
    let fhat = f.to_frequency();
    let nodes = unit_ball_nodes(grid.dim);
    let dv = -T_LO.ln() / T_PANELS as f64;

    // Q_t on the lattice for each panel midpoint, in panel order.
    let panels: Vec<(f64, Vec<f64>)> = (0..T_PANELS)
        .into_par_iter()
        .map(|k| -> Result<(f64, Vec<f64>), SpaceError> {
            let t = (T_LO.ln() + (k as f64 + 0.5) * dv).exp();
            let mut q_t = vec![0.0f64; grid.len()];
            let mut h = vec![0.0; grid.dim];
            for (y, wy) in &nodes {
                for (hi, yi) in h.iter_mut().zip(y) {
                    *hi = t * yi;
                }
                let moved = difference_multiplier(grid, &h, m).apply(&fhat)?.to_physical();
                for (acc, v) in q_t.iter_mut().zip(&moved.values) {
                    *acc += wy * v.norm();
                }
            }
            Ok((t, q_t))
        })
        .collect::<Result<_, _>>()?;

    let lp_f = f.lp_norm(p)?;
    let mut contribs = Vec::with_capacity(T_PANELS);
    let value = match variant {
        DifferenceVariant::SquareFunction => {
            let mut acc = vec![0.0f64; grid.len()];
            for (t, q_t) in &panels {
                let w = ctx.kappa_at(*t).powf(-2.0 * s) * dv;
                for (a, v) in acc.iter_mut().zip(q_t) {
                    *a += w * v * v;
                }
                contribs.push(w.sqrt() * riemann_lp(q_t, &grid, p));
            }
            let sq: Vec<f64> = acc.iter().map(|a| a.sqrt()).collect();
            lp_f + riemann_lp(&sq, &grid, p)
        }
        DifferenceVariant::TimeLq => {
            let mut sum = 0.0;
            for (t, q_t) in &panels {
                let norm = riemann_lp(q_t, &grid, p);
                let w = ctx.kappa_at(*t).powf(-q * s) * dv;
                sum += w * norm.powf(q);
                contribs.push(w.powf(1.0 / q) * norm);
            }
            lp_f + sum.powf(1.0 / q)
        }
    };
    Ok(NormReport {
        name: "difference".into(),
        value,
        s,
        p,
        q: match variant {
            DifferenceVariant::SquareFunction => 2.0,
            DifferenceVariant::TimeLq => q,
        },
        n_base: ctx.n_base(),
        variant: match variant {
            DifferenceVariant::SquareFunction => "square_function".into(),
            DifferenceVariant::TimeLq => "time_lq".into(),
        },
        block_contributions: contribs,
    })
}

/// Space-time norm on uniform slices of [0, T]: composite trapezoid of
/// the p-th power of the per-slice Bessel-route norm.
pub fn space_time_norm(
    slices: &[Field],
    big_t: f64,
    s: f64,
    p: f64,
    ctx: &NormContext,
) -> Result<NormReport, SpaceError> {
    if slices.len() < 2 {
        return Err(SpaceError::TooFewSlices { got: slices.len() });
    }
    if !(big_t > 0.0 && big_t.is_finite()) {
        return Err(SpaceError::BadParameter {
            name: "big_t",
            value: big_t,
            allowed: "(0, inf)",
        });
    }
    let per: Vec<f64> = slices
        .iter()
        .map(|f| triebel_norm(f, s, p, TriebelVariant::BesselDirect, ctx).map(|r| r.value))
        .collect::<Result<_, _>>()?;
    let dt = big_t / (slices.len() - 1) as f64;
    let mut sum = 0.0;
    for (k, c) in per.iter().enumerate() {
        let w = if k == 0 || k == per.len() - 1 { 0.5 } else { 1.0 };
        sum += w * c.powf(p) * dt;
    }
    Ok(NormReport {
        name: "space_time".into(),
        value: sum.powf(1.0 / p),
        s,
        p,
        q: p,
        n_base: ctx.n_base(),
        variant: "bessel_direct".into(),
        block_contributions: per,
    })
}
