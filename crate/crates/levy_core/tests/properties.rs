//! Property tests for the rescaling calculus and the scaling-triple
//! audits: invariants that must hold for whole parameter families, not
//! just the shipped examples.

use approx::assert_relative_eq;
use levy_core::{
    scale_measure, LevyMeasure, LogTable, RadialProfile, ScalingTriple, SimpleMeasure,
};
use proptest::prelude::*;

/// Orders bounded away from 1 so the symmetry rule never flips mid-case.
fn off_one_order() -> impl Strategy<Value = f64> {
    prop_oneof![0.1f64..0.9, 1.1f64..1.9]
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Self-similarity: for stable pi and kappa(R) = R^sigma, the moment
    /// integrals of pi~_R do not depend on R.
    #[test]
    fn stable_moments_are_rescaling_invariant(
        sigma in off_one_order(),
        big_r in log_uniform(1e-2, 1e2),
    ) {
        let pi = LevyMeasure::simple(SimpleMeasure::stable(1, sigma)).unwrap();
        let triple = ScalingTriple::power(sigma);
        let scaled = scale_measure(&pi, big_r, triple.kappa_at(big_r));
        // Exponents straddling the order: alpha1 > sigma, alpha2 < sigma.
        let a1 = sigma + 0.05;
        let a2 = sigma - 0.05;
        let base_small = pi.variation_moment(a1, 0.0, 1.0).unwrap();
        let base_large = pi.variation_moment(a2, 1.0, f64::INFINITY).unwrap();
        let s_small = scaled.variation_moment(a1, 0.0, 1.0).unwrap();
        let s_large = scaled.variation_moment(a2, 1.0, f64::INFINITY).unwrap();
        prop_assert!((s_small - base_small).abs() <= 1e-8 * base_small);
        prop_assert!((s_large - base_large).abs() <= 1e-8 * base_large);
    }

    /// Rescaling composes: scaling by R then R' equals scaling by R R'
    /// when kappa is multiplicative, including for tabulated densities.
    #[test]
    fn rescaling_composes_for_tables(
        sigma in off_one_order(),
        r1 in log_uniform(1e-2, 1e2),
        r2 in log_uniform(1e-2, 1e2),
    ) {
        let table = LogTable::from_fn(1e-8, 1e8, 128, |r| {
            r.powf(-1.0 - sigma) / (1.0 + r).powf(0.3)
        })
        .unwrap();
        let mut m = SimpleMeasure::stable(1, sigma);
        m.radial = RadialProfile::Table(table);
        let pi = LevyMeasure::Simple(m);
        let triple = ScalingTriple::power(sigma);

        let once = scale_measure(&pi, r1, triple.kappa_at(r1));
        let twice = scale_measure(&once, r2, triple.kappa_at(r2));
        let direct = scale_measure(&pi, r1 * r2, triple.kappa_at(r1 * r2));
        let (a, b) = (twice.as_simple().unwrap(), direct.as_simple().unwrap());
        for &r in &[1e-3, 0.7, 1.0, 42.0, 1e3] {
            prop_assert!(
                (a.radial_density(r) - b.radial_density(r)).abs()
                    <= 1e-10 * b.radial_density(r).abs()
            );
        }
    }

    /// Symmetrization is idempotent, preserves angular mass, and its
    /// output passes the symmetry predicate.
    #[test]
    fn symmetrization_is_an_idempotent_projection(
        w1 in 0.1f64..5.0,
        w2 in 0.1f64..5.0,
        theta in 0.0f64..std::f64::consts::PI,
    ) {
        let mut m = SimpleMeasure::stable(2, 0.5);
        m.atoms.truncate(2);
        m.atoms[0].direction = vec![theta.cos(), theta.sin()];
        m.atoms[0].weight = w1;
        m.atoms[1].direction = vec![1.0, 0.0];
        m.atoms[1].weight = w2;
        let sym = m.symmetrized();
        prop_assert!(sym.is_symmetric());
        prop_assert!((sym.total_weight() - m.total_weight()).abs() <= 1e-12 * m.total_weight());
        let again = sym.symmetrized();
        prop_assert!((again.total_weight() - sym.total_weight()).abs()
            <= 1e-12 * sym.total_weight());
        prop_assert!(again.is_symmetric());
    }

    /// Reflection is an involution on the atom set.
    #[test]
    fn reflection_is_an_involution(theta in 0.0f64..std::f64::consts::PI, w in 0.1f64..5.0) {
        let mut m = SimpleMeasure::stable(2, 0.7);
        m.atoms[0].direction = vec![theta.cos(), theta.sin()];
        m.atoms[0].weight = w;
        let back = m.reflected().reflected();
        for (a, b) in m.atoms.iter().zip(&back.atoms) {
            prop_assert!((a.weight - b.weight).abs() < 1e-15);
            for (x, y) in a.direction.iter().zip(&b.direction) {
                prop_assert!((x - y).abs() < 1e-15);
            }
        }
    }

    /// Fingerprints are stable under serialization and distinguish
    /// measures that differ in any parameter.
    #[test]
    fn fingerprint_separates_parameters(
        sigma in off_one_order(),
        coeff in 0.1f64..10.0,
    ) {
        let mut m = SimpleMeasure::stable(1, sigma);
        m.radial = RadialProfile::Power { coeff };
        let pi = LevyMeasure::simple(m.clone()).unwrap();
        let json = serde_json::to_string(&pi).unwrap();
        let back: LevyMeasure = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(pi.fingerprint(), back.fingerprint());

        m.radial = RadialProfile::Power { coeff: coeff * 1.0000001 };
        let other = LevyMeasure::simple(m).unwrap();
        prop_assert_ne!(pi.fingerprint(), other.fingerprint());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Every pure-power scaling triple passes its own audit, and the
    /// order-decay audit holds for any exponent above the order.
    #[test]
    fn power_triples_pass_their_audits(sigma in 0.1f64..1.9, gap in 0.05f64..0.4) {
        let triple = ScalingTriple::power(sigma);
        for rep in triple.audit() {
            prop_assert!(rep.pass, "{rep}");
        }
        for rep in triple.audit_order_decay(sigma + gap) {
            prop_assert!(rep.pass, "{rep}");
        }
    }
}
