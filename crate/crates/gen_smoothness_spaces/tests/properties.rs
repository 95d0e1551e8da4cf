//! Structural laws under random inputs: the partition stays exact for
//! random bases and grid shapes, every norm is absolutely homogeneous
//! and subadditive, and the blocks reconstruct the field they split.

use gen_smoothness_spaces::{
    besov_norm, build_partition, corpus_fields, difference_norm, triebel_norm, BesovVariant,
    DifferenceVariant, NormContext, TriebelVariant,
};
use levy_core::{LevyMeasure, ScalingTriple, SimpleMeasure};
use proptest::prelude::*;
use symbol_calculus::{Field, GridSpec};

fn cheap_ctx(grid: GridSpec) -> NormContext {
    let mu = LevyMeasure::simple(SimpleMeasure::stable(grid.dim, 0.5)).unwrap();
    NormContext::new(mu, ScalingTriple::power(0.5), 0.5, 2, grid).unwrap()
}

fn scale(f: &Field, c: f64) -> Field {
    let mut out = f.clone();
    for v in out.values.iter_mut() {
        *v *= c;
    }
    out
}

fn add(f: &Field, g: &Field) -> Field {
    let mut out = f.clone();
    for (a, b) in out.values.iter_mut().zip(&g.values) {
        *a += b;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partition_is_exact_for_random_bases_and_grids(
        n_base in 2u32..=3,
        n in prop_oneof![Just(32usize), Just(64usize)],
        period in 2.0f64..4.0,
    ) {
        let grid = GridSpec::new(1, n, period).unwrap();
        let part = build_partition(n_base, grid).unwrap();
        prop_assert!(part.partition_defect() <= 1e-15, "defect {}", part.partition_defect());
        prop_assert_eq!(part.support_defect(), 0.0);
        prop_assert!(part.tilde_identity_defect() <= 1e-14);
        prop_assert_eq!(part.beyond_coverage, 0);
    }

    #[test]
    fn blocks_reconstruct_the_field(seed in any::<u64>()) {
        let grid = GridSpec::new(1, 64, 8.0).unwrap();
        let part = build_partition(2, grid).unwrap();
        let f = corpus_fields(grid, 16, 1, seed).pop().unwrap();
        let fhat = f.to_frequency();
        let mut sum = Field::zeros(grid, symbol_calculus::Space::Physical);
        for j in 0..part.len() {
            let piece = part.block(j).apply(&fhat).unwrap().to_physical();
            for (a, b) in sum.values.iter_mut().zip(&piece.values) {
                *a += b;
            }
        }
        let scale = f.sup_norm();
        let defect = sum
            .values
            .iter()
            .zip(&f.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        prop_assert!(defect <= 1e-12 * scale, "defect {} vs sup {}", defect, scale);
    }

    #[test]
    fn block_norms_are_absolutely_homogeneous(
        seed in any::<u64>(),
        c in prop_oneof![0.1f64..10.0, -10.0f64..-0.1],
        s in 0.1f64..0.8,
    ) {
        let grid = GridSpec::new(1, 64, 8.0).unwrap();
        let ctx = cheap_ctx(grid);
        let f = corpus_fields(grid, 16, 1, seed).pop().unwrap();
        let cf = scale(&f, c);

        let b = besov_norm(&f, s, 2.2, 1.8, BesovVariant::KappaWeighted, &ctx).unwrap().value;
        let bc = besov_norm(&cf, s, 2.2, 1.8, BesovVariant::KappaWeighted, &ctx).unwrap().value;
        prop_assert!((bc - c.abs() * b).abs() <= 1e-10 * bc.max(1e-300));

        let t = triebel_norm(&f, s, 2.0, TriebelVariant::SquareFunction, &ctx).unwrap().value;
        let tc = triebel_norm(&cf, s, 2.0, TriebelVariant::SquareFunction, &ctx).unwrap().value;
        prop_assert!((tc - c.abs() * t).abs() <= 1e-10 * tc.max(1e-300));
    }
}

proptest! {
    // The difference norm integrates 64 panels x 32 ball nodes per call;
    // fewer cases keep the suite quick.
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn difference_norm_is_absolutely_homogeneous(
        seed in any::<u64>(),
        c in prop_oneof![0.1f64..10.0, -10.0f64..-0.1],
    ) {
        let grid = GridSpec::new(1, 64, 8.0).unwrap();
        let ctx = cheap_ctx(grid);
        let f = corpus_fields(grid, 16, 1, seed).pop().unwrap();
        let cf = scale(&f, c);
        let d = difference_norm(&f, 0.3, 2.0, 2.0, 2, DifferenceVariant::TimeLq, &ctx)
            .unwrap()
            .value;
        let dc = difference_norm(&cf, 0.3, 2.0, 2.0, 2, DifferenceVariant::TimeLq, &ctx)
            .unwrap()
            .value;
        prop_assert!((dc - c.abs() * d).abs() <= 1e-10 * dc);
    }

    #[test]
    fn block_norms_satisfy_the_triangle_inequality(seed in any::<u64>()) {
        let grid = GridSpec::new(1, 64, 8.0).unwrap();
        let ctx = cheap_ctx(grid);
        let mut fields = corpus_fields(grid, 16, 2, seed);
        let g = fields.pop().unwrap();
        let f = fields.pop().unwrap();
        let fg = add(&f, &g);

        let nf = besov_norm(&f, 0.4, 2.0, 2.0, BesovVariant::KappaWeighted, &ctx).unwrap().value;
        let ng = besov_norm(&g, 0.4, 2.0, 2.0, BesovVariant::KappaWeighted, &ctx).unwrap().value;
        let nfg = besov_norm(&fg, 0.4, 2.0, 2.0, BesovVariant::KappaWeighted, &ctx).unwrap().value;
        prop_assert!(nfg <= (nf + ng) * (1.0 + 1e-10), "{} > {} + {}", nfg, nf, ng);

        let tf = triebel_norm(&f, 0.4, 2.0, TriebelVariant::SquareFunction, &ctx).unwrap().value;
        let tg = triebel_norm(&g, 0.4, 2.0, TriebelVariant::SquareFunction, &ctx).unwrap().value;
        let tfg = triebel_norm(&fg, 0.4, 2.0, TriebelVariant::SquareFunction, &ctx).unwrap().value;
        prop_assert!(tfg <= (tf + tg) * (1.0 + 1e-10), "{} > {} + {}", tfg, tf, tg);
    }
}
