//! Levy measures as angular atoms times a shared radial density.
//!
//! Every measure handled here has the polar form
//!
//! ```text
//! pi(Gamma) = sum_i s_i a_i int_0^infty chi_Gamma(r w_i) g(r) dr,
//! ```
//!
//! with unit directions w_i, weights s_i > 0, optional per-direction
//! factors a_i in (0, 1], and a positive radial density g shared by all
//! atoms, possibly cut to [r_min, r_max].  This covers the stable and
//! truncated-stable families, subordinated densities g(r) = j(r) r^{d-1}
//! tabulated on a log grid, and their rescalings, while keeping every
//! integral one-dimensional.
//!
//! Signed measures enter only as differences of two nonnegative ones; the
//! variation is then the sum of the parts and linear operations walk the
//! two parts with signs.

use serde::{Deserialize, Serialize};

use crate::error::MeasureError;
use crate::quad::{self, CORE_HI, CORE_LO};

/// One angular atom: a unit direction and a positive weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngularAtom {
    pub direction: Vec<f64>,
    pub weight: f64,
}

impl AngularAtom {
    pub fn new(direction: Vec<f64>, weight: f64) -> Self {
        AngularAtom { direction, weight }
    }
}

/// Positive function tabulated on a uniform ln r grid with log-linear
/// interpolation and power-law extrapolation beyond the grid ends.
///
/// Log-linear interpolation is exact on pure powers, which is why the
/// rescaling map below can shift tables instead of resampling them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogTable {
    pub ln_lo: f64,
    pub step: f64,
    pub ln_vals: Vec<f64>,
    pub slope_lo: f64,
    pub slope_hi: f64,
}

impl LogTable {
    /// Tabulate a positive function on n log-spaced points over [lo, hi].
    /// End slopes for extrapolation are taken from the outermost segments.
    pub fn from_fn<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, f: F) -> Result<Self, MeasureError> {
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(MeasureError::BadTable);
        }
        let ln_lo = lo.ln();
        let step = (hi.ln() - ln_lo) / (n - 1) as f64;
        let mut ln_vals = Vec::with_capacity(n);
        for k in 0..n {
            let v = f((ln_lo + k as f64 * step).exp());
            if !(v > 0.0 && v.is_finite()) {
                return Err(MeasureError::BadTable);
            }
            ln_vals.push(v.ln());
        }
        let slope_lo = (ln_vals[1] - ln_vals[0]) / step;
        let slope_hi = (ln_vals[n - 1] - ln_vals[n - 2]) / step;
        Ok(LogTable { ln_lo, step, ln_vals, slope_lo, slope_hi })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let u = r.ln();
        let last = self.ln_vals.len() - 1;
        let ln_hi = self.ln_lo + last as f64 * self.step;
        let lv = if u <= self.ln_lo {
            self.ln_vals[0] + self.slope_lo * (u - self.ln_lo)
        } else if u >= ln_hi {
            self.ln_vals[last] + self.slope_hi * (u - ln_hi)
        } else {
            let t = (u - self.ln_lo) / self.step;
            let k = (t.floor() as usize).min(last - 1);
            let frac = t - k as f64;
            self.ln_vals[k] * (1.0 - frac) + self.ln_vals[k + 1] * frac
        };
        lv.exp()
    }

    /// The table of r -> c * f(s r): grid positions shift by -ln s, values
    /// scale by c.  Exact in log space, no resampling.
    pub fn shifted_scaled(&self, ln_s: f64, ln_c: f64) -> LogTable {
        LogTable {
            ln_lo: self.ln_lo - ln_s,
            step: self.step,
            ln_vals: self.ln_vals.iter().map(|v| v + ln_c).collect(),
            slope_lo: self.slope_lo,
            slope_hi: self.slope_hi,
        }
    }
}

/// Radial density g shared by all atoms of a measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum RadialProfile {
    /// g(r) = coeff * r^{-1-sigma} with sigma the order of the measure.
    Power { coeff: f64 },
    /// Arbitrary tabulated density, e.g. j(r) r^{d-1} from a subordinator.
    Table(LogTable),
}

/// Nonnegative Levy measure in polar form.  See the module docs for the
/// exact meaning of the fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimpleMeasure {
    pub dim: usize,
    pub sigma: f64,
    pub atoms: Vec<AngularAtom>,
    pub radial: RadialProfile,
    /// Per-atom factor in (0, 1], applied on top of the weight.
    pub a_factor: Option<Vec<f64>>,
    /// Inner support cut; 0 disables it.
    pub r_min: f64,
    /// Outer support cut; infinity disables it.  JSON has no infinity, so
    /// the disabled cut round-trips through null.
    #[serde(with = "serde_extended")]
    pub r_max: f64,
}

/// Encodes a possibly-infinite f64 as `null` when not finite.
mod serde_extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl SimpleMeasure {
    /// Isotropic stable-like measure of the given order: unit-coefficient
    /// power density on the standard symmetric direction set.
    pub fn stable(dim: usize, sigma: f64) -> Self {
        SimpleMeasure {
            dim,
            sigma,
            atoms: isotropic_atoms(dim),
            radial: RadialProfile::Power { coeff: 1.0 },
            a_factor: None,
            r_min: 0.0,
            r_max: f64::INFINITY,
        }
    }

    /// Stable measure with jumps truncated to |y| <= cut.
    pub fn truncated_stable(dim: usize, sigma: f64, cut: f64) -> Self {
        let mut m = Self::stable(dim, sigma);
        m.r_max = cut;
        m
    }

    /// Raw radial density (no support cut, no weights).
    pub fn radial_uncut(&self, r: f64) -> f64 {
        match &self.radial {
            RadialProfile::Power { coeff } => coeff * r.powf(-1.0 - self.sigma),
            RadialProfile::Table(t) => t.eval(r),
        }
    }

    /// Radial density with the support cut applied.
    pub fn radial_density(&self, r: f64) -> f64 {
        if r < self.r_min || r > self.r_max {
            0.0
        } else {
            self.radial_uncut(r)
        }
    }

    /// Weight times a-factor for atom i.
    pub fn effective_weight(&self, i: usize) -> f64 {
        let a = self.a_factor.as_ref().map_or(1.0, |v| v[i]);
        self.atoms[i].weight * a
    }

    /// Sum of effective weights, i.e. the total angular mass.
    pub fn total_weight(&self) -> f64 {
        (0..self.atoms.len()).map(|i| self.effective_weight(i)).sum()
    }

    /// int r^alpha dpi over radii in [lo, hi] (intersected with the
    /// support), summed over atoms.  Open ends get power-law closures.
    pub fn radial_moment(&self, alpha: f64, lo: f64, hi: f64) -> Result<f64, MeasureError> {
        let s_lo = lo.max(self.r_min);
        let s_hi = hi.min(self.r_max);
        if !(s_hi > s_lo) {
            return Ok(0.0);
        }
        let f = |r: f64| r.powf(alpha) * self.radial_uncut(r);
        let (v, _) = quad::integrate_support(f, s_lo, s_hi, quad::PANELS_PER_DECADE)
            .map_err(|e| moment_error(self.sigma, e))?;
        Ok(self.total_weight() * v)
    }

    /// int_{|y| <= 1} |y|^alpha dpi.
    pub fn moment_small(&self, alpha: f64) -> Result<f64, MeasureError> {
        self.radial_moment(alpha, 0.0, 1.0)
    }

    /// int_{|y| > 1} |y|^alpha dpi.
    pub fn moment_large(&self, alpha: f64) -> Result<f64, MeasureError> {
        self.radial_moment(alpha, 1.0, f64::INFINITY)
    }

    /// The pushforward under y -> -y.
    pub fn reflected(&self) -> SimpleMeasure {
        let mut m = self.clone();
        for atom in &mut m.atoms {
            for x in &mut atom.direction {
                *x = -*x;
            }
        }
        m
    }

    /// Symmetric part (pi + pi-reflected)/2, with a-factors folded into
    /// the weights.
    pub fn symmetrized(&self) -> SimpleMeasure {
        let mut atoms = Vec::with_capacity(2 * self.atoms.len());
        for (i, atom) in self.atoms.iter().enumerate() {
            let w = 0.5 * self.effective_weight(i);
            atoms.push(AngularAtom::new(atom.direction.clone(), w));
            atoms.push(AngularAtom::new(atom.direction.iter().map(|x| -x).collect(), w));
        }
        SimpleMeasure { atoms, a_factor: None, ..self.clone() }
    }

    /// Whether the angular part is symmetric under y -> -y, comparing
    /// per-direction effective weights.
    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetric_atom().is_none()
    }

    fn first_asymmetric_atom(&self) -> Option<usize> {
        let merged = self.merged_directional_weights();
        for (i, atom) in self.atoms.iter().enumerate() {
            let key = quantize_direction(&atom.direction);
            let neg: Vec<f64> = atom.direction.iter().map(|x| -x).collect();
            let w = merged[&key];
            match merged.get(&quantize_direction(&neg)) {
                Some(&wn) if (w - wn).abs() <= 1e-9 * w.abs().max(wn.abs()) => {}
                _ => return Some(i),
            }
        }
        None
    }

    fn merged_directional_weights(&self) -> std::collections::BTreeMap<[i64; 3], f64> {
        let mut map = std::collections::BTreeMap::new();
        for (i, atom) in self.atoms.iter().enumerate() {
            *map.entry(quantize_direction(&atom.direction)).or_insert(0.0) +=
                self.effective_weight(i);
        }
        map
    }

    /// Structural and admissibility validation; see the module docs for
    /// the conditions by order.
    pub fn validate(&self) -> Result<(), MeasureError> {
        if !(1..=3).contains(&self.dim) {
            return Err(MeasureError::BadDimension(self.dim));
        }
        if !(self.sigma > 0.0 && self.sigma < 2.0) {
            return Err(MeasureError::BadOrder(self.sigma));
        }
        if !(self.r_min >= 0.0 && self.r_max > self.r_min) {
            return Err(MeasureError::BadSupport { r_min: self.r_min, r_max: self.r_max });
        }
        if let Some(a) = &self.a_factor {
            if a.len() != self.atoms.len() {
                return Err(MeasureError::BadAFactor { got: a.len(), want: self.atoms.len() });
            }
            for (i, &ai) in a.iter().enumerate() {
                if !(ai > 0.0 && ai <= 1.0) {
                    return Err(MeasureError::BadWeight { index: i, weight: ai });
                }
            }
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.direction.len() != self.dim {
                return Err(MeasureError::BadDimension(atom.direction.len()));
            }
            if !(atom.weight > 0.0 && atom.weight.is_finite()) {
                return Err(MeasureError::BadWeight { index: i, weight: atom.weight });
            }
            let norm = atom.direction.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(MeasureError::BadDirection { index: i, norm });
            }
        }
        if let RadialProfile::Table(t) = &self.radial {
            if t.ln_vals.len() < 2 || !(t.step > 0.0) {
                return Err(MeasureError::BadTable);
            }
        }
        // Small-jump moment int_0^1 r^2 g dr: only the head can diverge.
        if self.r_min < CORE_LO {
            quad::head_closure(|r| r * r * self.radial_uncut(r), CORE_LO)
                .map_err(|_| MeasureError::LocalMomentDivergent)?;
        }
        if self.r_max > CORE_HI {
            // Base admissibility needs a finite tail mass; order in (1, 2)
            // additionally a finite first moment outside the unit ball.
            let weight_pow = if self.sigma > 1.0 { 1.0 } else { 0.0 };
            quad::tail_closure(|r| r.powf(weight_pow) * self.radial_uncut(r), CORE_HI).map_err(
                |e| {
                    let exponent = match e {
                        crate::error::QuadError::Divergent { exponent, .. } => exponent,
                        _ => f64::NAN,
                    };
                    MeasureError::TailMomentDivergent { sigma: self.sigma, exponent }
                },
            )?;
        }
        if (self.sigma - 1.0).abs() < 1e-12 {
            if let Some(i) = self.first_asymmetric_atom() {
                return Err(MeasureError::AsymmetricAtOrderOne { index: i });
            }
        }
        Ok(())
    }
}

fn moment_error(sigma: f64, e: crate::error::QuadError) -> MeasureError {
    match e {
        crate::error::QuadError::Divergent { place: "head", .. } => {
            MeasureError::LocalMomentDivergent
        }
        crate::error::QuadError::Divergent { exponent, .. } => {
            MeasureError::TailMomentDivergent { sigma, exponent }
        }
        _ => MeasureError::BadTable,
    }
}

fn quantize_direction(d: &[f64]) -> [i64; 3] {
    let mut k = [0i64; 3];
    for (i, &x) in d.iter().enumerate() {
        k[i] = (x * 1e10).round() as i64;
    }
    k
}

/// Standard symmetric direction sets: {-1, +1} on the line, the 4 axis
/// directions on the circle, and a 26-point axis/edge/corner set on the
/// sphere.  Total weights match |S^{d-1}| (with the d = 1 convention of
/// weight 1 per point), and sum_i w_i w_i w_i^T is isotropic by symmetry.
pub fn isotropic_atoms(dim: usize) -> Vec<AngularAtom> {
    match dim {
        1 => vec![
            AngularAtom::new(vec![1.0], 1.0),
            AngularAtom::new(vec![-1.0], 1.0),
        ],
        2 => {
            let w = std::f64::consts::PI / 2.0;
            vec![
                AngularAtom::new(vec![1.0, 0.0], w),
                AngularAtom::new(vec![-1.0, 0.0], w),
                AngularAtom::new(vec![0.0, 1.0], w),
                AngularAtom::new(vec![0.0, -1.0], w),
            ]
        }
        3 => {
            let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(26);
            for s in [-1.0, 1.0] {
                dirs.push(vec![s, 0.0, 0.0]);
                dirs.push(vec![0.0, s, 0.0]);
                dirs.push(vec![0.0, 0.0, s]);
            }
            let h = std::f64::consts::FRAC_1_SQRT_2;
            for s in [-1.0, 1.0] {
                for t in [-1.0, 1.0] {
                    dirs.push(vec![s * h, t * h, 0.0]);
                    dirs.push(vec![s * h, 0.0, t * h]);
                    dirs.push(vec![0.0, s * h, t * h]);
                }
            }
            let c = 1.0 / 3.0f64.sqrt();
            for s in [-1.0, 1.0] {
                for t in [-1.0, 1.0] {
                    for u in [-1.0, 1.0] {
                        dirs.push(vec![s * c, t * c, u * c]);
                    }
                }
            }
            let w = 4.0 * std::f64::consts::PI / 26.0;
            dirs.into_iter().map(|d| AngularAtom::new(d, w)).collect()
        }
        _ => panic!("isotropic_atoms supports dim 1..=3"),
    }
}

/// A measure that is either nonnegative or a difference of two
/// nonnegative ones (the signed class closed under the operators we
/// build).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum LevyMeasure {
    Simple(SimpleMeasure),
    Difference { minuend: SimpleMeasure, subtrahend: SimpleMeasure },
}

impl LevyMeasure {
    pub fn simple(m: SimpleMeasure) -> Result<Self, MeasureError> {
        m.validate()?;
        Ok(LevyMeasure::Simple(m))
    }

    pub fn difference(minuend: SimpleMeasure, subtrahend: SimpleMeasure) -> Result<Self, MeasureError> {
        minuend.validate()?;
        subtrahend.validate()?;
        if minuend.dim != subtrahend.dim {
            return Err(MeasureError::BadDimension(subtrahend.dim));
        }
        Ok(LevyMeasure::Difference { minuend, subtrahend })
    }

    pub fn dim(&self) -> usize {
        match self {
            LevyMeasure::Simple(m) => m.dim,
            LevyMeasure::Difference { minuend, .. } => minuend.dim,
        }
    }

    /// Order of the measure; for a difference, the larger of the parts.
    pub fn order(&self) -> f64 {
        match self {
            LevyMeasure::Simple(m) => m.sigma,
            LevyMeasure::Difference { minuend, subtrahend } => {
                minuend.sigma.max(subtrahend.sigma)
            }
        }
    }

    pub fn validate(&self) -> Result<(), MeasureError> {
        match self {
            LevyMeasure::Simple(m) => m.validate(),
            LevyMeasure::Difference { minuend, subtrahend } => {
                minuend.validate()?;
                subtrahend.validate()?;
                if minuend.dim != subtrahend.dim {
                    return Err(MeasureError::BadDimension(subtrahend.dim));
                }
                Ok(())
            }
        }
    }

    /// Walk the signed parts: sign +1 for the positive part, -1 for the
    /// subtracted one.  Linear functionals of the measure reduce to this.
    pub fn for_each_signed<F: FnMut(f64, &SimpleMeasure)>(&self, mut f: F) {
        match self {
            LevyMeasure::Simple(m) => f(1.0, m),
            LevyMeasure::Difference { minuend, subtrahend } => {
                f(1.0, minuend);
                f(-1.0, subtrahend);
            }
        }
    }

    /// The variation |pi|: the measure itself, or the sum of both parts.
    pub fn variation_moment(&self, alpha: f64, lo: f64, hi: f64) -> Result<f64, MeasureError> {
        let mut total = 0.0;
        let mut err = None;
        self.for_each_signed(|_, m| {
            if err.is_none() {
                match m.radial_moment(alpha, lo, hi) {
                    Ok(v) => total += v,
                    Err(e) => err = Some(e),
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(total),
        }
    }

    pub fn as_simple(&self) -> Result<&SimpleMeasure, MeasureError> {
        match self {
            LevyMeasure::Simple(m) => Ok(m),
            LevyMeasure::Difference { .. } => Err(MeasureError::SignedMeasure),
        }
    }

    /// Stable 64-bit fingerprint of the canonical serialization; used to
    /// key multiplier caches.
    pub fn fingerprint(&self) -> u64 {
        let bytes = serde_json::to_vec(self).expect("measure serialization cannot fail");
        fnv1a(&bytes)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Rescale: pi_R(Gamma) = kappa_r * pi({y : y/r_scale in Gamma}), i.e.
/// the radial density maps to kappa_r * r_scale * g(r_scale * rho) and
/// support cuts divide by r_scale.  Exact in log space for both profile
/// kinds.
pub fn scale_measure(pi: &LevyMeasure, r_scale: f64, kappa_r: f64) -> LevyMeasure {
    assert!(r_scale > 0.0 && kappa_r > 0.0);
    let scale_simple = |m: &SimpleMeasure| -> SimpleMeasure {
        let radial = match &m.radial {
            RadialProfile::Power { coeff } => RadialProfile::Power {
                coeff: coeff * kappa_r * r_scale.powf(-m.sigma),
            },
            RadialProfile::Table(t) => RadialProfile::Table(
                t.shifted_scaled(r_scale.ln(), (kappa_r * r_scale).ln()),
            ),
        };
        SimpleMeasure {
            radial,
            r_min: m.r_min / r_scale,
            r_max: m.r_max / r_scale,
            ..m.clone()
        }
    };
    match pi {
        LevyMeasure::Simple(m) => LevyMeasure::Simple(scale_simple(m)),
        LevyMeasure::Difference { minuend, subtrahend } => LevyMeasure::Difference {
            minuend: scale_simple(minuend),
            subtrahend: scale_simple(subtrahend),
        },
    }
}
