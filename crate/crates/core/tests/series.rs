use proptest::prelude::*;

use selfsim::agl::f2_example_context;
use selfsim::ff_poly::{is_s_integer, parse_rational, Place, PlaceSet, Poly, RationalFunction};
use selfsim::fixtures::f3_context;
use selfsim::series::{CompletionContext, EpSeries};

fn infinity_context() -> CompletionContext {
    let places = PlaceSet::new([Place::at(3, 0)]).unwrap();
    CompletionContext::new(3, Place::Infinity, places, parse_rational(3, "1/t").unwrap()).unwrap()
}

fn contexts() -> Vec<CompletionContext> {
    vec![f2_example_context(), f3_context(), infinity_context()]
}

fn context() -> impl Strategy<Value = CompletionContext> {
    prop::sample::select(contexts())
}

fn poly(p: u32, max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..p, 0..=max_len).prop_map(move |c| Poly::from_residues(p, c))
}

fn rational(p: u32, max_len: usize) -> impl Strategy<Value = RationalFunction> {
    (poly(p, max_len), poly(p, max_len).prop_filter("nonzero", |d| !d.is_zero()))
        .prop_map(|(n, d)| RationalFunction::new(n, d).unwrap())
}

fn with_rational(max_len: usize) -> impl Strategy<Value = (CompletionContext, RationalFunction)> {
    context().prop_flat_map(move |ctx| {
        let p = ctx.p();
        (Just(ctx), rational(p, max_len))
    })
}

fn with_two(max_len: usize) -> impl Strategy<Value = (CompletionContext, RationalFunction, RationalFunction)> {
    context().prop_flat_map(move |ctx| {
        let p = ctx.p();
        (Just(ctx), rational(p, max_len), rational(p, max_len))
    })
}

fn raw_series() -> impl Strategy<Value = (u32, i64, Vec<u32>, Vec<u32>)> {
    prop::sample::select(vec![2u32, 3, 5]).prop_flat_map(|p| {
        (Just(p), -4i64..5, prop::collection::vec(0..p, 0..6), prop::collection::vec(0..p, 1..6))
    })
}

fn max_degree(f: &RationalFunction) -> u32 {
    f.numerator().degree().unwrap_or(0).max(f.denominator().degree().unwrap_or(0)) as u32
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn round_trip((ctx, f) in with_rational(9)) {
        let a = ctx.expand(&f);
        prop_assert_eq!(ctx.to_rational(&a), f);
    }

    #[test]
    fn period_is_bounded_by_the_denominator((ctx, f) in with_rational(9)) {
        let a = ctx.expand(&f);
        let bound = (ctx.p() as usize).pow(max_degree(&f)).saturating_sub(1).max(1);
        prop_assert!(a.period().len() <= bound, "period {} > {}", a.period().len(), bound);
    }

    #[test]
    fn canonical_form_is_stable((p, offset, pre, per) in raw_series()) {
        let a = EpSeries::new(p, offset, pre.clone(), per.clone()).unwrap();
        let again = EpSeries::new(p, a.offset(), a.preperiod().to_vec(), a.period().to_vec()).unwrap();
        prop_assert_eq!(&again, &a);
        // digits agree with the raw stream
        for i in offset..offset + 40 {
            let k = (i - offset) as usize;
            let raw = if k < pre.len() { pre[k] } else { per[(k - pre.len()) % per.len()] };
            prop_assert_eq!(a.digit(i), raw);
        }
        prop_assert_eq!(EpSeries::parse(p, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn ring_operations_match_rational_arithmetic((ctx, f, g) in with_two(5)) {
        let (a, b) = (ctx.expand(&f), ctx.expand(&g));
        prop_assert_eq!(a.add(&b), ctx.expand(&(&f + &g)));
        prop_assert_eq!(a.mul(&b), ctx.expand(&(&f * &g)));
        prop_assert!(a.add(&a.neg()).is_zero());
        if a.valuation() == Some(0) {
            prop_assert_eq!(a.unit_inverse().unwrap(), ctx.expand(&f.inverse().unwrap()));
        }
    }

    #[test]
    fn finite_factors_multiply_digitwise((ctx, f) in with_rational(5), digits in prop::collection::vec(0u32..3, 0..8), off in -2i64..3) {
        let p = ctx.p();
        let w = EpSeries::finite(p, off, digits.into_iter().map(|c| c % p).collect());
        let a = ctx.expand(&f);
        let expected = ctx.expand(&(&ctx.to_rational(&w) * &f));
        prop_assert_eq!(w.mul(&a), expected.clone());
        prop_assert_eq!(a.mul(&w), expected);
    }

    #[test]
    fn truncation_and_shift((ctx, f) in with_rational(6), lo in -3i64..4, len in 0i64..6, e in -3i64..4) {
        let a = ctx.expand(&f);
        let t = a.truncate(Some(lo), Some(lo + len));
        for i in lo - 2..lo + len + 2 {
            let want = if (lo..lo + len).contains(&i) { a.digit(i) } else { 0 };
            prop_assert_eq!(t.digit(i), want);
        }
        let head = a.truncate(None, Some(lo));
        let tail = a.truncate(Some(lo), None);
        prop_assert_eq!(head.add(&tail), a.clone());
        prop_assert_eq!(a.shift(e).digit(lo - e), a.digit(lo));
    }

    #[test]
    fn pole_lemma((ctx, f) in with_rational(6), j in 0i64..8) {
        // the tail π^(-j)[f]_j is an S-integer exactly when f is
        let a = ctx.expand(&f);
        prop_assume!(a.is_integral());
        let tail = ctx.to_rational(&a.truncate(Some(j), None).shift(j));
        prop_assert_eq!(is_s_integer(&tail, ctx.places()), is_s_integer(&f, ctx.places()));
    }

    #[test]
    fn residue_is_the_constant_digit((ctx, f) in with_rational(6)) {
        let a = ctx.expand(&f);
        prop_assume!(a.is_integral());
        prop_assert_eq!(ctx.residue(&f), a.digit(0));
    }
}
