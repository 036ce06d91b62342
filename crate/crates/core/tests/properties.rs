use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use cfkit::engine::{
    convergents, equivalence_transform, eval_backward, eval_convergents, eval_lentz, CfStream,
    CfTerm, ScaleFactors, DEFAULT_MAX_DEPTH,
};
use cfkit::families::{lagrange_binomial, symmetric_binomial, uniform_binomial, Exponent};
use cfkit::kernel::{ratio, ToleranceSpec};
use cfkit::verify::determinant_holds;

fn small_ratio() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero_ratio() -> impl Strategy<Value = BigRational> {
    small_ratio().prop_filter("nonzero", |r| !r.is_zero())
}

fn finite_stream() -> impl Strategy<Value = CfStream<BigRational>> {
    (
        small_ratio(),
        prop::collection::vec((nonzero_ratio(), nonzero_ratio()), 1..12),
    )
        .prop_map(|(b0, levels)| {
            CfStream::finite(
                b0,
                levels.into_iter().map(|(a, b)| CfTerm::new(a, b)).collect(),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_identity_on_random_fractions(cf in finite_stream()) {
        prop_assert!(determinant_holds(&cf, 12));
    }

    #[test]
    fn equivalence_preserves_convergents(
        cf in finite_stream(),
        scales in prop::collection::vec(nonzero_ratio(), 1..14),
    ) {
        let mut seq = vec![BigRational::one()];
        seq.extend(scales);
        let t = equivalence_transform(&cf, ScaleFactors::Sequence(seq)).unwrap();
        let a = convergents(&cf, 14);
        let b = convergents(&t, 14);
        prop_assert_eq!(a.terminated_at, b.terminated_at);
        prop_assert_eq!(a.items.len(), b.items.len());
        for (u, v) in a.items.iter().zip(&b.items) {
            prop_assert_eq!(u.value(), v.value());
        }
    }

    #[test]
    fn backward_matches_forward(cf in finite_stream(), depth in 1usize..12) {
        let forward = convergents(&cf, depth).last().value();
        let backward = eval_backward(&cf, depth).ok();
        // Intermediate zero denominators make the backward fold undefined
        // while the forward convergent may still exist.
        if let Some(b) = backward {
            prop_assert_eq!(Some(b), forward);
        }
    }

    #[test]
    fn integer_exponents_terminate_exactly(n in -6i64..=6, x in small_ratio()) {
        let x = x / BigRational::from_integer(25.into());
        let base = BigRational::one() + &x;
        prop_assume!(!base.is_zero());
        let want = if n >= 0 { base.pow(n as i32) } else { base.pow(-n as i32).recip() };
        let e = Exponent::integer(n);
        for cf in [lagrange_binomial(&e, x.clone()), uniform_binomial(&e, x.clone())] {
            let c = convergents(&cf, 40);
            prop_assert!(c.terminated());
            if let Some(v) = c.last().value() {
                prop_assert_eq!(v, want.clone());
            }
        }
    }

    #[test]
    fn negating_n_leaves_symmetric_fraction_unchanged(n in 1i64..8, d in 1i64..4, z in small_ratio()) {
        let z = z / BigRational::from_integer(21.into());
        let plus = symmetric_binomial(&Exponent::ratio(n, d), z.clone());
        let minus = symmetric_binomial(&Exponent::ratio(-n, d), z);
        for k in 1..=20 {
            prop_assert_eq!(plus.term(k), minus.term(k));
        }
    }

    #[test]
    fn lentz_agrees_with_convergents(n in -3.0f64..3.0, x in -0.6f64..0.6) {
        let e = Exponent::from_value(&cfkit::ScalarValue::Float64(n)).unwrap();
        let tol = ToleranceSpec::DEFAULT;
        let cf = lagrange_binomial(&e, x);
        let a = eval_lentz(&cf, &tol, DEFAULT_MAX_DEPTH).unwrap();
        let b = eval_convergents(&cf, &tol, DEFAULT_MAX_DEPTH).unwrap();
        prop_assert!(a.converged && b.converged);
        let scale = b.value.abs().max(1e-300);
        prop_assert!((a.value - b.value).abs() <= 10.0 * (1e-12 * scale + 1e-14), "{} vs {}", a.value, b.value);
    }
}
