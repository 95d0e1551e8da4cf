//! Scaling functions, their factors, and generalized inverses.
//!
//! A scaling function is a continuous kappa : (0, infty) -> (0, infty)
//! with kappa(0+) = 0, kappa(infty) = infty, dominated multiplicatively by
//! a nondecreasing factor l with l(0+) = 0:
//!
//! ```text
//! kappa(eps r) <= l(eps) kappa(r)   for all eps, r > 0.
//! ```
//!
//! From the pair we derive the generalized inverses
//! a(t) = inf{r : kappa(r) >= t} and gamma(t) = inf{r : l(r) >= t}, the
//! upper inverse sup_{s <= r} kappa(s), and the power sandwich
//!
//! ```text
//! cbar^{-1} (r^{th1} /\ r^{th0}) <= kappa(r)/kappa(1) <= cbar (r^{th0} \/ r^{th1}),
//! ```
//!
//! with th0 = log_N l(N), th1 = log_N l(1/N)^{-1} for any integer base
//! N > 1 with l(1/N) < 1, and cbar = max(l(N), l(1)/l(1/N)).  The pure
//! power kappa = l = r^sigma reproduces the classical stable scaling and
//! all inequalities become identities.
//!
//! Inverses are computed on a monotone envelope of a log-log table, which
//! is exact for powers and resolution-limited (quadratic in the grid step)
//! for everything else; audits below use tolerances consistent with that.

use serde::{Deserialize, Serialize};

use crate::error::ScalingError;
use crate::measure::LogTable;
use crate::report::CheckReport;

/// Positive curve on (0, infinity) in one of three closed forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ScalarCurve {
    /// coeff * r^exponent.
    Power { coeff: f64, exponent: f64 },
    /// coeff * r^exp_lo for r <= 1, coeff * r^exp_hi for r > 1.
    PiecewisePower { coeff: f64, exp_lo: f64, exp_hi: f64 },
    /// Tabulated curve with power extrapolation.
    Table(LogTable),
}

impl ScalarCurve {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ScalarCurve::Power { coeff, exponent } => coeff * r.powf(*exponent),
            ScalarCurve::PiecewisePower { coeff, exp_lo, exp_hi } => {
                if r <= 1.0 {
                    coeff * r.powf(*exp_lo)
                } else {
                    coeff * r.powf(*exp_hi)
                }
            }
            ScalarCurve::Table(t) => t.eval(r),
        }
    }
}

/// Monotone envelope of a positive curve with its generalized inverse.
///
/// `envelope(r)` approximates sup_{s <= r} curve(s); `inverse(t)` returns
/// inf{r : curve(r) >= t}, which coincides with the inverse of the
/// envelope.  Ends extrapolate as powers fitted to the outermost envelope
/// segments (a zero low-end slope means the curve never drops, so the
/// infimum degenerates to 0; a zero high-end slope means the level is
/// never reached and the infimum is +infinity).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenInverse {
    ln_xs: Vec<f64>,
    ln_env: Vec<f64>,
    slope_lo: f64,
    slope_hi: f64,
}

impl GenInverse {
    pub fn build(curve: &ScalarCurve, lo: f64, hi: f64, n: usize) -> Result<Self, ScalingError> {
        assert!(lo > 0.0 && hi > lo && n >= 8);
        let ln_lo = lo.ln();
        let step = (hi.ln() - ln_lo) / (n - 1) as f64;
        let mut ln_xs = Vec::with_capacity(n);
        let mut ln_env = Vec::with_capacity(n);
        let mut running: f64 = 0.0;
        for k in 0..n {
            let lx = ln_lo + k as f64 * step;
            let v = curve.eval(lx.exp());
            if !(v > 0.0 && v.is_finite()) {
                return Err(ScalingError::NonpositiveCurve { radius: lx.exp(), value: v });
            }
            running = if k == 0 { v } else { running.max(v) };
            ln_xs.push(lx);
            ln_env.push(running.ln());
        }
        let last = n - 1;
        let slope_lo = ((ln_env[1] - ln_env[0]) / step).max(0.0);
        let slope_hi = ((ln_env[last] - ln_env[last - 1]) / step).max(0.0);
        Ok(GenInverse { ln_xs, ln_env, slope_lo, slope_hi })
    }

    /// sup_{s <= r} curve(s), log-log interpolated.
    pub fn envelope(&self, r: f64) -> f64 {
        let u = r.ln();
        let last = self.ln_xs.len() - 1;
        if u <= self.ln_xs[0] {
            return (self.ln_env[0] + self.slope_lo * (u - self.ln_xs[0])).exp();
        }
        if u >= self.ln_xs[last] {
            return (self.ln_env[last] + self.slope_hi * (u - self.ln_xs[last])).exp();
        }
        let step = self.ln_xs[1] - self.ln_xs[0];
        let t = (u - self.ln_xs[0]) / step;
        let k = (t.floor() as usize).min(last - 1);
        let frac = t - k as f64;
        (self.ln_env[k] * (1.0 - frac) + self.ln_env[k + 1] * frac).exp()
    }

    /// inf{r : curve(r) >= t}.
    pub fn inverse(&self, t: f64) -> f64 {
        assert!(t > 0.0, "inverse needs a positive level");
        let lt = t.ln();
        let last = self.ln_xs.len() - 1;
        if lt <= self.ln_env[0] {
            if self.slope_lo <= 1e-12 {
                return 0.0;
            }
            return (self.ln_xs[0] + (lt - self.ln_env[0]) / self.slope_lo).exp();
        }
        if lt > self.ln_env[last] {
            if self.slope_hi <= 1e-12 {
                return f64::INFINITY;
            }
            return (self.ln_xs[last] + (lt - self.ln_env[last]) / self.slope_hi).exp();
        }
        // First index with env >= t; predecessor is strictly below t, so
        // the bracketing segment rises and interpolates cleanly.
        let (mut a, mut b) = (0usize, last);
        while b - a > 1 {
            let m = (a + b) / 2;
            if self.ln_env[m] >= lt {
                b = m;
            } else {
                a = m;
            }
        }
        let denom = self.ln_env[b] - self.ln_env[a];
        let frac = if denom > 0.0 { (lt - self.ln_env[a]) / denom } else { 1.0 };
        (self.ln_xs[a] + frac * (self.ln_xs[b] - self.ln_xs[a])).exp()
    }
}

/// Power sandwich exponents and constant for a given integer base.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThetaBounds {
    pub theta0: f64,
    pub theta1: f64,
    pub cbar: f64,
}

/// A scaling function, its factor, and precomputed inverses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingTriple {
    pub kappa: ScalarCurve,
    pub ell: ScalarCurve,
    /// Smallest integer base N >= 2 with l(1/N) < 1.
    pub n_base: u32,
    kappa_inv: GenInverse,
    ell_inv: GenInverse,
}

/// Grid on which curves are tabulated and audited.
const GRID_LO: f64 = 1e-8;
const GRID_HI: f64 = 1e8;
const GRID_N: usize = 2048;

impl ScalingTriple {
    pub fn new(kappa: ScalarCurve, ell: ScalarCurve) -> Result<Self, ScalingError> {
        // The factor must be nondecreasing and eventually contract below 1.
        let probes = 257;
        let mut prev = None;
        for k in 0..probes {
            let r = GRID_LO * (GRID_HI / GRID_LO).powf(k as f64 / (probes - 1) as f64);
            let v = ell.eval(r);
            if !(v > 0.0 && v.is_finite()) {
                return Err(ScalingError::NonpositiveCurve { radius: r, value: v });
            }
            if let Some(p) = prev {
                if v < p * (1.0 - 1e-12) {
                    return Err(ScalingError::FactorNotMonotone(r));
                }
            }
            prev = Some(v);
        }
        // Smallest base among 2..=64, then powers of two: l contracts
        // polynomially when it contracts at all, so sparse probing is fine.
        let mut candidates: Vec<u32> = (2..=64).collect();
        let mut p = 128u32;
        while p <= 1 << 20 {
            candidates.push(p);
            p *= 2;
        }
        let n_base = match candidates.into_iter().find(|&n| ell.eval(1.0 / n as f64) < 1.0) {
            Some(n) => n,
            None => return Err(ScalingError::NoContractionBase(1 << 20)),
        };
        let kappa_inv = GenInverse::build(&kappa, GRID_LO, GRID_HI, GRID_N)?;
        let ell_inv = GenInverse::build(&ell, GRID_LO, GRID_HI, GRID_N)?;
        Ok(ScalingTriple { kappa, ell, n_base, kappa_inv, ell_inv })
    }

    /// The classical power scaling kappa = l = r^sigma.
    pub fn power(sigma: f64) -> ScalingTriple {
        assert!(sigma > 0.0 && sigma < 2.0);
        ScalingTriple::new(
            ScalarCurve::Power { coeff: 1.0, exponent: sigma },
            ScalarCurve::Power { coeff: 1.0, exponent: sigma },
        )
        .expect("power curves always form a scaling triple")
    }

    pub fn kappa_at(&self, r: f64) -> f64 {
        self.kappa.eval(r)
    }

    pub fn ell_at(&self, r: f64) -> f64 {
        self.ell.eval(r)
    }

    /// a(t) = inf{r : kappa(r) >= t}.
    pub fn a(&self, t: f64) -> f64 {
        self.kappa_inv.inverse(t)
    }

    /// gamma(t) = inf{r : l(r) >= t}.
    pub fn gamma(&self, t: f64) -> f64 {
        self.ell_inv.inverse(t)
    }

    /// Upper inverse sup_{s <= r} kappa(s); dominated by l(1) kappa(r).
    pub fn kappa_sup_below(&self, r: f64) -> f64 {
        self.kappa_inv.envelope(r)
    }

    /// Sandwich exponents for the stored base.
    pub fn theta_bounds(&self) -> ThetaBounds {
        let n = self.n_base as f64;
        let theta0 = self.ell.eval(n).ln() / n.ln();
        let theta1 = -self.ell.eval(1.0 / n).ln() / n.ln();
        let cbar = (self.ell.eval(n)).max(self.ell.eval(1.0) / self.ell.eval(1.0 / n));
        ThetaBounds { theta0, theta1, cbar }
    }

    /// Quantitative audit of the defining inequality, the power sandwich,
    /// and the inverse identities.  All checks use grids spanning
    /// [1e-4, 1e4] (the defining inequality) or the full tabulation range.
    pub fn audit(&self) -> Vec<CheckReport> {
        let mut out = Vec::new();
        let geom = |lo: f64, hi: f64, n: usize, k: usize| -> f64 {
            lo * (hi / lo).powf(k as f64 / (n - 1) as f64)
        };

        // kappa(eps r) <= l(eps) kappa(r) on a 50 x 50 grid.
        let mut worst = f64::NEG_INFINITY;
        let mut at = vec![0.0, 0.0];
        for i in 0..50 {
            let eps = geom(1e-4, 1e4, 50, i);
            let le = self.ell.eval(eps);
            for j in 0..50 {
                let r = geom(1e-4, 1e4, 50, j);
                let ratio = self.kappa.eval(eps * r) / (le * self.kappa.eval(r));
                if ratio > worst {
                    worst = ratio;
                    at = vec![eps, r];
                }
            }
        }
        out.push(CheckReport::upper("scaling_subadditivity", worst, 1.0 + 1e-9).at(at));

        // Factor monotone: largest relative drop between grid neighbours.
        let mut drop = 0.0f64;
        let mut drop_at = 0.0;
        let mut prev = self.ell.eval(1e-8);
        for k in 1..400 {
            let r = geom(1e-8, 1e8, 400, k);
            let v = self.ell.eval(r);
            let d = (prev - v) / prev.abs().max(1e-300);
            if d > drop {
                drop = d;
                drop_at = r;
            }
            prev = v;
        }
        out.push(CheckReport::upper("scaling_factor_monotone", drop, 1e-12).at(vec![drop_at]));

        // Power sandwich around kappa/kappa(1).
        let tb = self.theta_bounds();
        let k1 = self.kappa.eval(1.0);
        let mut sandwich = f64::NEG_INFINITY;
        let mut sw_at = vec![0.0];
        for k in 0..400 {
            let r = geom(1e-8, 1e8, 400, k);
            let kr = self.kappa.eval(r) / k1;
            let up = tb.cbar * r.powf(tb.theta0).max(r.powf(tb.theta1));
            let lo = r.powf(tb.theta0).min(r.powf(tb.theta1)) / tb.cbar;
            let v = (kr / up).max(lo / kr);
            if v > sandwich {
                sandwich = v;
                sw_at = vec![r];
            }
        }
        out.push(CheckReport::upper("scaling_power_sandwich", sandwich, 1.0 + 1e-9).at(sw_at));

        // l(r) >= (r^th0 /\ r^th1) / cbar.
        let mut fac = f64::NEG_INFINITY;
        for k in 0..400 {
            let r = geom(1e-8, 1e8, 400, k);
            let lo = r.powf(tb.theta0).min(r.powf(tb.theta1)) / tb.cbar;
            fac = fac.max(lo / self.ell.eval(r));
        }
        out.push(CheckReport::upper("scaling_factor_lower_bound", fac, 1.0 + 1e-9));

        // gamma(r)^th1 /\ gamma(r)^th0 <= cbar r.
        let mut gam = f64::NEG_INFINITY;
        for k in 0..200 {
            let t = geom(1e-6, 1e6, 200, k);
            let g = self.gamma(t);
            if !(g > 0.0) || g.is_infinite() {
                continue;
            }
            let v = g.powf(tb.theta1).min(g.powf(tb.theta0)) / (tb.cbar * t);
            gam = gam.max(v);
        }
        out.push(CheckReport::upper("scaling_gamma_bound", gam, 1.0 + 1e-9));

        // kappa(a(t)) >= t and a(kappa(r)) <= r, up to table resolution.
        let mut inv_lo = f64::INFINITY;
        let mut inv_hi = f64::NEG_INFINITY;
        for k in 0..200 {
            let t = geom(self.kappa.eval(1e-6), self.kappa.eval(1e6).max(1.0), 200, k);
            let at = self.a(t);
            if at > 1e-8 && at < 1e8 {
                inv_lo = inv_lo.min(self.kappa_sup_below(at) / t);
            }
            let r = geom(1e-6, 1e6, 200, k);
            inv_hi = inv_hi.max(self.a(self.kappa_sup_below(r)) / r);
        }
        out.push(CheckReport::lower("scaling_inverse_reaches_level", inv_lo, 1.0 - 1e-5));
        out.push(CheckReport::upper("scaling_inverse_below_argument", inv_hi, 1.0 + 1e-5));

        // sup_{s <= r} kappa(s) <= l(1) kappa(r).
        let l1 = self.ell.eval(1.0);
        let mut env = f64::NEG_INFINITY;
        for k in 0..400 {
            let r = geom(1e-7, 1e7, 400, k);
            env = env.max(self.kappa_sup_below(r) / (l1 * self.kappa.eval(r)));
        }
        out.push(CheckReport::upper("scaling_envelope_dominated", env, 1.0 + 1e-9));

        // l(gamma(t)) >= t wherever gamma lands inside the table.
        let mut fac_inv = f64::INFINITY;
        for k in 0..200 {
            let t = geom(self.ell.eval(1e-6), self.ell.eval(1e6).max(1.0), 200, k);
            let g = self.gamma(t);
            if g > 1e-8 && g < 1e8 {
                fac_inv = fac_inv.min(self.ell.eval(g) / t);
            }
        }
        out.push(CheckReport::lower("scaling_factor_inverse_reaches_level", fac_inv, 1.0 - 1e-5));

        // a(eps r) >= a(r) gamma(eps) in level space, and the envelope
        // analogue a^{-1}(eps r) <= l(eps) a^{-1}(r) in radius space.
        let mut ll2 = f64::INFINITY;
        let mut ll2_at = vec![0.0, 0.0];
        let mut env_sub = f64::NEG_INFINITY;
        for i in 0..50 {
            let eps = geom(1e-4, 1e4, 50, i);
            for j in 0..50 {
                let t = geom(self.kappa.eval(1e-4), self.kappa.eval(1e4).max(1.0), 50, j);
                let lhs = self.a(eps * t);
                let rhs = self.a(t) * self.gamma(eps);
                if lhs > 1e-8 && lhs < 1e8 && rhs > 1e-8 && rhs < 1e8 {
                    let v = lhs / rhs;
                    if v < ll2 {
                        ll2 = v;
                        ll2_at = vec![eps, t];
                    }
                }
                let r = geom(1e-4, 1e4, 50, j);
                if eps * r > 1e-8 && eps * r < 1e8 {
                    let v = self.kappa_sup_below(eps * r)
                        / (self.ell.eval(eps) * self.kappa_sup_below(r));
                    env_sub = env_sub.max(v);
                }
            }
        }
        out.push(CheckReport::lower("scaling_inverse_superadditive", ll2, 1.0 - 1e-5).at(ll2_at));
        out.push(CheckReport::upper("scaling_envelope_subadditive", env_sub, 1.0 + 1e-9));

        out
    }

    /// Decay of A^{sigma'} / kappa(A) as A -> 0, required for exponents
    /// sigma' strictly above the order: reports the fitted log-log decay
    /// rate of h(A) = A^{sigma'}/kappa(A) on [1e-6, 1e-2] (must be
    /// positive) and the quasi-monotonicity constant
    /// sup_{r <= A <= 1} h(r) / h(A).
    pub fn audit_order_decay(&self, sigma_prime: f64) -> Vec<CheckReport> {
        let h = |a: f64| a.powf(sigma_prime) / self.kappa.eval(a);
        let m = 40;
        let (mut xs, mut ys) = (Vec::with_capacity(m), Vec::with_capacity(m));
        for j in 0..m {
            let a = 1e-6f64 * 1e4f64.powf(j as f64 / (m - 1) as f64);
            xs.push(a.ln());
            ys.push(h(a).max(1e-300).ln());
        }
        let (rate, _, _) = crate::numeric::linfit(&xs, &ys);
        let n = 120;
        let mut quasi = f64::NEG_INFINITY;
        let mut at = vec![0.0, 0.0];
        for j in 0..n {
            let a = 1e-6f64 * (1.0 / 1e-6f64).powf(j as f64 / (n - 1) as f64);
            let ha = h(a);
            for i in 0..=j {
                let r = 1e-6f64 * (1.0 / 1e-6f64).powf(i as f64 / (n - 1) as f64);
                let v = h(r) / ha;
                if v > quasi {
                    quasi = v;
                    at = vec![r, a];
                }
            }
        }
        vec![
            CheckReport::lower("order_decay_rate", rate, 1e-2),
            CheckReport::upper("order_decay_quasi_monotone", quasi, 10.0).at(at),
        ]
    }
}
