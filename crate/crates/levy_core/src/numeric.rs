//! Small numerical kernels: Gauss-Legendre nodes, compensated summation,
//! log-log fits, bisection, modified Bessel K0 and a tiny symmetric
//! eigensolver.
//!
//! Nothing here knows about measures.  The routines are deliberately plain
//! so that the quadrature and audit layers built on top stay auditable.

/// 16-point Gauss-Legendre nodes on [-1, 1], positive half.
/// Exact for polynomials of degree <= 31; see the transcription test below.
pub const GL16_NODES: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003_0,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];

/// Weights paired with [`GL16_NODES`].
pub const GL16_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];

/// Integrate `f` over [a, b] with a single 16-point Gauss-Legendre panel.
pub fn gl16<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        let dx = half * GL16_NODES[i];
        acc += GL16_WEIGHTS[i] * (f(mid + dx) + f(mid - dx));
    }
    acc * half
}

/// Pairwise summation; error grows like log(n) rather than n.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Least-squares line through (xs, ys): returns (slope, intercept,
/// max |residual|).  Callers fitting power laws pass logs.
pub fn linfit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points to fit a line");
    let n = xs.len() as f64;
    let mx = pairwise_sum(xs) / n;
    let my = pairwise_sum(ys) / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut worst: f64 = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        worst = worst.max((y - slope * x - intercept).abs());
    }
    (slope, intercept, worst)
}

/// Bisection for nondecreasing `f`: smallest x in [lo, hi] with
/// f(x) >= target, or `hi` if the target is never reached.
pub fn bisect_nondecreasing<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, target: f64) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    if f(hi) < target {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    // 200 halvings take |b - a| below f64 resolution for any sane range.
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) >= target {
            b = m;
        } else {
            a = m;
        }
    }
    b
}

/// Modified Bessel I0, polynomial fit, |error| < 2e-7 for |x| <= 3.75.
fn bessel_i0_small(x: f64) -> f64 {
    let t = x / 3.75;
    let t2 = t * t;
    1.0 + t2
        * (3.515_622_9
            + t2 * (3.089_942_4
                + t2 * (1.206_749_2 + t2 * (0.265_973_2 + t2 * (0.036_076_8 + t2 * 0.004_581_3)))))
}

/// Modified Bessel K0 for x > 0, absolute error below 1e-6 everywhere and
/// relative error ~2e-7 for x >= 2 (classical Chebyshev-style fits).
pub fn bessel_k0(x: f64) -> f64 {
    assert!(x > 0.0, "K0 needs a positive argument");
    if x <= 2.0 {
        let t2 = (x / 2.0) * (x / 2.0);
        let series = -0.577_215_66
            + t2 * (0.422_784_20
                + t2 * (0.230_697_56
                    + t2 * (0.034_885_90
                        + t2 * (0.002_626_98 + t2 * (0.000_107_50 + t2 * 0.000_007_40)))));
        -(x / 2.0).ln() * bessel_i0_small(x) + series
    } else {
        let t = 2.0 / x;
        let poly = 1.253_314_14
            + t * (-0.078_323_58
                + t * (0.021_895_68
                    + t * (-0.010_624_46
                        + t * (0.005_878_72 + t * (-0.002_515_40 + t * 0.000_532_08)))));
        poly * (-x).exp() / x.sqrt()
    }
}

/// Smallest eigenvalue of a symmetric d x d matrix, d <= 3, by cyclic
/// Jacobi rotations.  Exact enough (1e-14) for the nondegeneracy checks.
pub fn min_eigenvalue_sym(mat: &[Vec<f64>]) -> f64 {
    let d = mat.len();
    assert!((1..=3).contains(&d));
    let mut a = [[0.0f64; 3]; 3];
    for i in 0..d {
        assert_eq!(mat[i].len(), d);
        for j in 0..d {
            a[i][j] = mat[i][j];
        }
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut min = a[0][0];
    for i in 1..d {
        min = min.min(a[i][i]);
    }
    min
}
