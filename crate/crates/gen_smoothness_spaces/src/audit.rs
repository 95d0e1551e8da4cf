//! Empirical equivalence audits: the block/Bessel norm pairs must give
//! ratios confined to a stable interval on a reproducible corpus, the
//! embedding constants follow from the weight algebra, and the weight
//! sums contract geometrically.

use rayon::prelude::*;

use crate::error::SpaceError;
use crate::norms::{
    besov_norm, difference_norm, triebel_norm, BesovVariant, DifferenceVariant, NormContext,
    TriebelVariant,
};
use levy_core::{CheckReport, ScalingTriple};
use symbol_calculus::{Field, GridSpec};

/// Empirical ratio range of a pair of equivalent norms over a corpus.
#[derive(Debug, Clone)]
pub struct RatioInterval {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl RatioInterval {
    fn from_ratios(name: &str, ratios: &[f64]) -> RatioInterval {
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0f64, f64::max);
        RatioInterval { name: name.into(), lo, hi }
    }

    pub fn is_proper(&self) -> bool {
        self.lo > 0.0 && self.hi.is_finite() && self.lo <= self.hi
    }
}

/// Reproducible corpus of real trig polynomials with `modes` random
/// modes inside |k_axis| <= band.  Fields are analytic in x, so the same
/// seed on a refined grid samples the same functions.
pub fn corpus_fields(grid: GridSpec, band: usize, count: usize, seed: u64) -> Vec<Field> {
    let mut state = seed;
    (0..count).map(|_| band_limited_field(grid, band, &mut state)).collect()
}

fn band_limited_field(grid: GridSpec, band: usize, state: &mut u64) -> Field {
    let dim = grid.dim;
    let mut modes: Vec<([i64; 3], f64, f64)> = Vec::with_capacity(12);
    for _ in 0..12 {
        let mut k = [0i64; 3];
        for slot in k.iter_mut().take(dim) {
            *slot = (unit(state) * (2 * band + 1) as f64).floor() as i64 - band as i64;
        }
        if k.iter().take(dim).all(|&v| v == 0) {
            k[0] = 1;
        }
        let amp = 0.5 + unit(state);
        let phase = 2.0 * std::f64::consts::PI * unit(state);
        modes.push((k, amp, phase));
    }
    let period = grid.period;
    Field::from_real_fn(grid, move |x| {
        let mut v = 0.0;
        for (k, amp, phase) in &modes {
            let mut arg = *phase;
            for (a, &xa) in x.iter().enumerate() {
                arg += 2.0 * std::f64::consts::PI * (k[a] as f64) * xa / period;
            }
            v += amp * arg.cos();
        }
        v
    })
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64
}

fn ratios<F>(fields: &[Field], eval: F) -> Result<Vec<f64>, SpaceError>
where
    F: Fn(&Field) -> Result<(f64, f64), SpaceError> + Sync,
{
    fields
        .par_iter()
        .map(|f| {
            let (num, den) = eval(f)?;
            if den <= 0.0 || !den.is_finite() {
                return Err(SpaceError::Config(format!(
                    "degenerate reference norm {den} in an equivalence audit"
                )));
            }
            Ok(num / den)
        })
        .collect()
}

/// Kappa-weighted over Bessel-weighted Besov norms on the corpus.
pub fn besov_ratio_interval(
    ctx: &NormContext,
    s: f64,
    p: f64,
    q: f64,
    fields: &[Field],
) -> Result<RatioInterval, SpaceError> {
    let r = ratios(fields, |f| {
        let a = besov_norm(f, s, p, q, BesovVariant::KappaWeighted, ctx)?.value;
        let b = besov_norm(f, s, p, q, BesovVariant::BesselWeighted, ctx)?.value;
        Ok((a, b))
    })?;
    Ok(RatioInterval::from_ratios("besov_kappa_over_bessel", &r))
}

/// Square-function over direct-Bessel Triebel norms on the corpus.
pub fn triebel_ratio_interval(
    ctx: &NormContext,
    s: f64,
    p: f64,
    fields: &[Field],
) -> Result<RatioInterval, SpaceError> {
    let r = ratios(fields, |f| {
        let a = triebel_norm(f, s, p, TriebelVariant::SquareFunction, ctx)?.value;
        let b = triebel_norm(f, s, p, TriebelVariant::BesselDirect, ctx)?.value;
        Ok((a, b))
    })?;
    Ok(RatioInterval::from_ratios("triebel_square_over_bessel", &r))
}

/// Difference norm over its equivalent spectral route: the pointwise-l2
/// variant against |J^s f|_p, the per-time L_q variant against the
/// Bessel-weighted block sum.
pub fn difference_ratio_interval(
    ctx: &NormContext,
    s: f64,
    p: f64,
    q: f64,
    m: u32,
    variant: DifferenceVariant,
    fields: &[Field],
) -> Result<RatioInterval, SpaceError> {
    let r = ratios(fields, |f| {
        let a = difference_norm(f, s, p, q, m, variant, ctx)?.value;
        let b = match variant {
            DifferenceVariant::SquareFunction => {
                triebel_norm(f, s, p, TriebelVariant::BesselDirect, ctx)?.value
            }
            DifferenceVariant::TimeLq => {
                besov_norm(f, s, p, q, BesovVariant::BesselWeighted, ctx)?.value
            }
        };
        Ok((a, b))
    })?;
    let name = match variant {
        DifferenceVariant::SquareFunction => "difference_square_over_bessel",
        DifferenceVariant::TimeLq => "difference_lq_over_besov",
    };
    Ok(RatioInterval::from_ratios(name, &r))
}

/// Both endpoints of `other` must sit within `tol` of the baseline.
pub fn interval_drift(base: &RatioInterval, other: &RatioInterval, tol: f64) -> Vec<CheckReport> {
    vec![
        CheckReport::upper(
            &format!("{}_lo_drift", base.name),
            (other.lo / base.lo - 1.0).abs(),
            tol,
        ),
        CheckReport::upper(
            &format!("{}_hi_drift", base.name),
            (other.hi / base.hi - 1.0).abs(),
            tol,
        ),
    ]
}

/// Lower smoothness is weaker: |f|_{s_lo} <= C |f|_{s_hi} with the
/// constant read off the block weights, C = max_j kappa_j^{s_hi - s_lo}.
pub fn embedding_monotonicity(
    ctx: &NormContext,
    s_lo: f64,
    s_hi: f64,
    p: f64,
    q: f64,
    fields: &[Field],
) -> Result<CheckReport, SpaceError> {
    if !(s_lo < s_hi) {
        return Err(SpaceError::BadParameter {
            name: "s_lo",
            value: s_lo,
            allowed: "below s_hi",
        });
    }
    let c = (0..ctx.partition().len())
        .map(|j| ctx.kappa_block(j).powf(s_hi - s_lo))
        .fold(0.0f64, f64::max);
    let mut worst = f64::NEG_INFINITY;
    for f in fields {
        let lo = besov_norm(f, s_lo, p, q, BesovVariant::KappaWeighted, ctx)?.value;
        let hi = besov_norm(f, s_hi, p, q, BesovVariant::KappaWeighted, ctx)?.value;
        if hi > 0.0 {
            worst = worst.max((lo - c * hi) / (c * hi));
        }
    }
    Ok(CheckReport::upper("besov_embedding_defect", worst, 1e-12))
}

/// Increments of sum_k kappa(N^{-k})^eps contract at least by the
/// submultiplicative factor l(1/N)^eps.
pub fn weight_sum_geometric(triple: &ScalingTriple, n_base: u32, eps: f64) -> CheckReport {
    let nb = n_base as f64;
    let bound = triple.ell_at(1.0 / nb).powf(eps);
    let mut worst = 0.0f64;
    let mut prev = triple.kappa_at(1.0).powf(eps);
    for k in 1..=60 {
        let term = triple.kappa_at(nb.powi(-k)).powf(eps);
        worst = worst.max(term / prev);
        prev = term;
    }
    CheckReport::upper("kappa_weight_increment_ratio", worst, bound * (1.0 + 1e-12))
}

/// Partition invariants as reports: exact unity, hard supports, and the
/// tilde reproducing identity.
pub fn partition_reports(p: &crate::partition::LPPartition) -> Vec<CheckReport> {
    vec![
        CheckReport::upper("lp_partition_of_unity_defect", p.partition_defect(), 1e-12),
        CheckReport::upper("lp_block_support_defect", p.support_defect(), 1e-14),
        CheckReport::upper("lp_tilde_identity_defect", p.tilde_identity_defect(), 1e-14),
    ]
}
