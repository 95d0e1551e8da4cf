//! Frozen expected values for the norm machinery: pure modes land in a
//! single block with an exactly known weight, the two Besov routes agree
//! bitwise at s = 0, Bessel orders compose to an isometry, and the
//! equivalence-constant intervals on a fixed corpus stay put under grid
//! refinement and a change of block base.

use gen_smoothness_spaces::{
    besov_norm, besov_ratio_interval, build_partition, corpus_fields, difference_norm,
    difference_ratio_interval, embedding_monotonicity, interval_drift, partition_reports,
    space_time_norm, triebel_norm, triebel_ratio_interval, weight_sum_geometric, BesovVariant,
    DifferenceVariant, NormContext, SpaceError, TriebelVariant,
};
use levy_core::{LevyMeasure, ScalingTriple, SimpleMeasure};
use symbol_calculus::{Field, GridSpec};

const SEED: u64 = 0x5eed_0f17;

fn grid_1d(n: usize) -> GridSpec {
    GridSpec::new(1, n, 8.0).unwrap()
}

/// Context whose kappa exponent matches the stable order of the Bessel
/// reference measure, so the weighted and multiplier routes are
/// genuinely equivalent.
fn matched_ctx(n_base: u32, grid: GridSpec) -> NormContext {
    let mu = LevyMeasure::simple(SimpleMeasure::stable(grid.dim, 0.5)).unwrap();
    NormContext::new(mu, ScalingTriple::power(0.5), 0.5, n_base, grid).unwrap()
}

#[test]
fn partition_invariants_hold_for_both_bases_and_dimensions() {
    for (n_base, grid) in [
        (2u32, grid_1d(64)),
        (3u32, grid_1d(64)),
        (2u32, GridSpec::new(2, 32, 8.0).unwrap()),
    ] {
        let part = build_partition(n_base, grid).unwrap();
        for report in partition_reports(&part) {
            assert!(report.pass, "N={n_base} d={}: {report}", grid.dim);
        }
        assert_eq!(part.beyond_coverage, 0);
    }
}

#[test]
fn too_small_a_grid_cannot_carry_three_blocks() {
    // Nyquist 1 leaves log_2 radius at zero: one ring at most.
    let grid = GridSpec::new(1, 16, 8.0).unwrap();
    assert!(matches!(build_partition(2, grid), Err(SpaceError::Config(_))));
}

#[test]
fn a_pure_mode_at_a_block_center_has_an_exactly_weighted_norm() {
    let grid = grid_1d(64);
    let mu = LevyMeasure::simple(SimpleMeasure::stable(1, 0.5)).unwrap();
    let ctx = NormContext::new(mu, ScalingTriple::power(0.7), 0.5, 2, grid).unwrap();
    // Frequency 2 = N^1 sits where ring 1 equals one exactly.
    let f = Field::from_real_fn(grid, |x| {
        1.5 * (2.0 * std::f64::consts::PI * 2.0 * x[0] + 0.3).cos()
    });
    let lp = f.lp_norm(2.0).unwrap();
    assert!((lp - 3.0).abs() <= 1e-12 * 3.0, "|f|_2 = {lp}");

    let report = besov_norm(&f, 0.5, 2.0, 2.0, BesovVariant::KappaWeighted, &ctx).unwrap();
    // kappa(1/2)^{-s} = 2^{0.7 * 0.5}.
    let expected = 2f64.powf(0.35) * 3.0;
    assert!(
        (report.value - expected).abs() <= 1e-12 * expected,
        "value {} vs {expected}",
        report.value
    );
    assert!((report.block_contributions[1] - expected).abs() <= 1e-12 * expected);
    assert!(report.block_contributions[0] <= 1e-12 * expected);
    assert!(report.block_contributions[2] <= 1e-12 * expected);
}

#[test]
fn off_center_modes_spread_only_to_the_two_adjacent_blocks() {
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    // log_2 3 = 1.58: rings 1 and 2 share the mode, block 0 sees nothing.
    let f = Field::from_real_fn(grid, |x| (2.0 * std::f64::consts::PI * 3.0 * x[0]).cos());
    let report = besov_norm(&f, 0.3, 2.0, 2.0, BesovVariant::KappaWeighted, &ctx).unwrap();
    let c = &report.block_contributions;
    assert!(c[0] <= 1e-12 * report.value, "block 0 leaked: {c:?}");
    assert!(c[1] >= 0.05 * report.value && c[2] >= 0.05 * report.value, "{c:?}");
}

#[test]
fn constants_live_entirely_in_the_base_block() {
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let f = Field::from_real_fn(grid, |_| 2.0);
    let report = besov_norm(&f, 0.3, 2.0, 2.0, BesovVariant::KappaWeighted, &ctx).unwrap();
    let expected = 2.0 * 8f64.sqrt();
    assert!((report.block_contributions[0] - expected).abs() <= 1e-12 * expected);
    for (j, c) in report.block_contributions.iter().enumerate().skip(1) {
        assert!(*c <= 1e-12 * expected, "block {j} carries {c} of a constant");
    }
}

#[test]
fn besov_variants_coincide_bitwise_at_zero_smoothness() {
    // At s = 0 both routes reduce to unweighted block norms: the kappa
    // weights are 1 and the order-zero Bessel multiplier is exactly one.
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let f = &corpus_fields(grid, 16, 1, SEED)[0];
    let a = besov_norm(f, 0.0, 2.4, 1.7, BesovVariant::KappaWeighted, &ctx).unwrap();
    let b = besov_norm(f, 0.0, 2.4, 1.7, BesovVariant::BesselWeighted, &ctx).unwrap();
    assert_eq!(a.value, b.value);
}

#[test]
fn direct_triebel_norm_at_zero_smoothness_is_plain_lp() {
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let f = &corpus_fields(grid, 16, 1, SEED + 1)[0];
    let report = triebel_norm(f, 0.0, 3.0, TriebelVariant::BesselDirect, &ctx).unwrap();
    assert_eq!(report.value, f.lp_norm(3.0).unwrap());
}

#[test]
fn bessel_orders_compose_to_an_isometry() {
    // |J^s (J^{-s} g)|_p recovers |g|_p, so the direct route measures
    // exactly s orders of smoothing.
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let g = &corpus_fields(grid, 16, 1, SEED + 2)[0];
    let smoothed = ctx.bessel(-0.8).unwrap().apply(g).unwrap();
    let recovered = triebel_norm(&smoothed, 0.8, 2.0, TriebelVariant::BesselDirect, &ctx).unwrap();
    let reference = g.lp_norm(2.0).unwrap();
    assert!(
        (recovered.value - reference).abs() <= 1e-9 * reference,
        "{} vs {reference}",
        recovered.value
    );
}

#[test]
fn difference_norm_of_a_constant_is_its_lp_norm() {
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let f = Field::from_real_fn(grid, |_| 1.3);
    let lp = f.lp_norm(2.0).unwrap();
    for variant in [DifferenceVariant::SquareFunction, DifferenceVariant::TimeLq] {
        let report = difference_norm(&f, 0.4, 2.0, 2.0, 1, variant, &ctx).unwrap();
        assert!(
            (report.value - lp).abs() <= 1e-12 * lp,
            "{variant:?}: {} vs {lp}",
            report.value
        );
    }
    let z = Field::zeros(grid, symbol_calculus::Space::Physical);
    let zr = difference_norm(&z, 0.4, 2.0, 2.0, 1, DifferenceVariant::TimeLq, &ctx).unwrap();
    assert_eq!(zr.value, 0.0);
}

#[test]
fn space_time_norm_of_constant_slices_is_t_to_the_inverse_p() {
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let g = corpus_fields(grid, 16, 1, SEED + 3).pop().unwrap();
    let per_slice = triebel_norm(&g, 0.3, 2.0, TriebelVariant::BesselDirect, &ctx)
        .unwrap()
        .value;
    let slices = vec![g; 5];
    let report = space_time_norm(&slices, 2.0, 0.3, 2.0, &ctx).unwrap();
    let expected = 2f64.sqrt() * per_slice;
    assert!((report.value - expected).abs() <= 1e-12 * expected);
}

#[test]
fn space_time_norm_matches_a_separable_exact_integral() {
    // u(t, x) = e^{-t} g(x) on [0, 1] at s = 0: the exact norm is
    // ((1 - e^{-p})/p)^{1/p} |g|_p; 41 slices of trapezoid reach 1e-3.
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let g = corpus_fields(grid, 16, 1, SEED + 4).pop().unwrap();
    let k = 41;
    let slices: Vec<Field> = (0..k)
        .map(|i| {
            let t = i as f64 / (k - 1) as f64;
            let mut s = g.clone();
            for v in s.values.iter_mut() {
                *v *= (-t).exp();
            }
            s
        })
        .collect();
    let report = space_time_norm(&slices, 1.0, 0.0, 2.0, &ctx).unwrap();
    let exact = ((1.0 - (-2f64).exp()) / 2.0).sqrt() * g.lp_norm(2.0).unwrap();
    assert!(
        (report.value - exact).abs() <= 1e-3 * exact,
        "{} vs {exact}",
        report.value
    );
}

#[test]
fn too_few_slices_are_rejected() {
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let g = corpus_fields(grid, 16, 1, SEED + 5).pop().unwrap();
    assert!(matches!(
        space_time_norm(&[g], 1.0, 0.0, 2.0, &ctx),
        Err(SpaceError::TooFewSlices { got: 1 })
    ));
}

#[test]
fn equivalence_intervals_are_tight_and_stable_under_refinement() {
    let coarse = grid_1d(64);
    let fine = grid_1d(128);
    let ctx_c = matched_ctx(2, coarse);
    let ctx_f = matched_ctx(2, fine);
    let ctx_n3 = matched_ctx(3, coarse);
    // Same analytic corpus on every grid: band 16 keeps all modes well
    // inside the coarse block coverage.
    let fields_c = corpus_fields(coarse, 16, 20, SEED);
    let fields_f = corpus_fields(fine, 16, 20, SEED);
    let (s, p, q) = (0.3, 2.0, 2.0);

    let besov_c = besov_ratio_interval(&ctx_c, s, p, q, &fields_c).unwrap();
    let besov_f = besov_ratio_interval(&ctx_f, s, p, q, &fields_f).unwrap();
    let besov_n3 = besov_ratio_interval(&ctx_n3, s, p, q, &fields_c).unwrap();
    assert!(besov_c.is_proper(), "{besov_c:?}");
    eprintln!("besov ratios: base {besov_c:?} fine {besov_f:?} N=3 {besov_n3:?}");
    for r in interval_drift(&besov_c, &besov_f, 0.10) {
        assert!(r.pass, "grid doubling moved the besov interval: {r}");
    }
    for r in interval_drift(&besov_c, &besov_n3, 0.10) {
        assert!(r.pass, "base change moved the besov interval: {r}");
    }

    let triebel_c = triebel_ratio_interval(&ctx_c, s, p, &fields_c).unwrap();
    let triebel_f = triebel_ratio_interval(&ctx_f, s, p, &fields_f).unwrap();
    assert!(triebel_c.is_proper(), "{triebel_c:?}");
    eprintln!("triebel ratios: base {triebel_c:?} fine {triebel_f:?}");
    for r in interval_drift(&triebel_c, &triebel_f, 0.10) {
        assert!(r.pass, "grid doubling moved the triebel interval: {r}");
    }
}

#[test]
fn difference_intervals_are_tight_and_stable_under_refinement() {
    let coarse = grid_1d(64);
    let fine = grid_1d(128);
    let ctx_c = matched_ctx(2, coarse);
    let ctx_f = matched_ctx(2, fine);
    let fields_c = corpus_fields(coarse, 16, 8, SEED);
    let fields_f = corpus_fields(fine, 16, 8, SEED);
    let (s, p, q, m) = (0.3, 2.0, 2.0, 2);

    for variant in [DifferenceVariant::SquareFunction, DifferenceVariant::TimeLq] {
        let base = difference_ratio_interval(&ctx_c, s, p, q, m, variant, &fields_c).unwrap();
        let refined = difference_ratio_interval(&ctx_f, s, p, q, m, variant, &fields_f).unwrap();
        assert!(base.is_proper(), "{base:?}");
        eprintln!("difference ratios {variant:?}: base {base:?} fine {refined:?}");
        for r in interval_drift(&base, &refined, 0.10) {
            assert!(r.pass, "{variant:?}: {r}");
        }
    }
}

#[test]
fn embedding_constant_and_weight_geometry_hold() {
    let grid = grid_1d(64);
    let ctx = matched_ctx(2, grid);
    let fields = corpus_fields(grid, 16, 5, SEED + 6);
    let embed = embedding_monotonicity(&ctx, 0.2, 0.6, 2.0, 2.0, &fields).unwrap();
    assert!(embed.pass, "{embed}");

    let report = weight_sum_geometric(&ScalingTriple::power(0.5), 2, 0.3);
    assert!(report.pass, "{report}");
}
