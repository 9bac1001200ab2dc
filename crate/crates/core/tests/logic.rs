mod common;

use std::collections::HashSet;

use common::corpus::{FORMULAS, TYPES};
use lpforge_core::logic::cauchy::rate_violation;
use lpforge_core::logic::*;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

fn arb_type() -> impl Strategy<Value = FiniteType> {
    let leaf = prop_oneof![Just(FiniteType::Nat), Just(FiniteType::Space)];
    leaf.prop_recursive(5, 24, 2, |inner| {
        (inner.clone(), inner).prop_map(|(res, arg)| FiniteType::fun(res, arg))
    })
}

fn arb_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "c", "x", "y", "f1", "g_2", "h'"]).prop_map(str::to_owned)
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        arb_name().prop_map(Term::Var),
        (0u32..20).prop_map(|n| Term::Nat(n.into())),
        (0i64..9, 1i64..5).prop_map(|(n, d)| Term::Real(BigRational::new(n.into(), d.into()))),
        prop::sample::select(vec![
            Constant::ZeroX,
            Constant::OneX,
            Constant::Norm,
            Constant::Cp,
            Constant::Limit
        ])
        .prop_map(Term::Const),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, x)| Term::app(f, x)),
            (arb_name(), arb_type(), inner.clone()).prop_map(|(v, t, b)| Term::lam(&v, t, b)),
            (prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul]), inner.clone(), inner)
                .prop_map(|(op, a, b)| Term::bin(op, a, b)),
        ]
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let rel = prop::sample::select(vec![
        Relation::EqR,
        Relation::LeR,
        Relation::EqNat,
        Relation::LeNat,
        Relation::EqX,
        Relation::Preceq,
    ]);
    let leaf = (rel, arb_term(), arb_term()).prop_map(|(r, a, b)| Formula::Atom(r, a, b));
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Formula::Not(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (
                prop::bool::ANY,
                arb_name(),
                arb_type(),
                prop::option::of(arb_term()),
                inner
            )
                .prop_map(|(all, v, t, bound, body)| {
                    let q = if all { Quantifier::Forall } else { Quantifier::Exists };
                    Formula::quant(q, &v, t, bound, body)
                }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn small_types_are_admissible(t in arb_type()) {
        if is_small(&t) {
            prop_assert!(is_admissible(&t));
        }
    }

    #[test]
    fn hat_is_x_free_and_idempotent(t in arb_type()) {
        let h = hat_type(&t);
        prop_assert!(!h.contains_space());
        prop_assert_eq!(hat_type(&h), h.clone());
        prop_assert_eq!(h.depth(), t.depth());
    }

    #[test]
    fn types_print_and_parse(t in arb_type()) {
        prop_assert_eq!(parse_type(&t.to_string()).unwrap(), t.clone());
        prop_assert_eq!(parse_type(&t.arrow_string()).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn formulas_print_and_parse(f in arb_formula()) {
        let text = f.to_string();
        let back = parse_formula(&text);
        prop_assert!(back.is_ok(), "{}: {:?}", text, back);
        prop_assert_eq!(back.unwrap(), f);
    }

    #[test]
    fn terms_print_and_parse(t in arb_term()) {
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }
}

#[test]
fn corpus_classification_and_round_trip() {
    assert_eq!(FORMULAS.len(), 30);
    for (text, label) in FORMULAS {
        let f = parse_formula(text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(f.to_string(), *text, "print after parse");
        let class = classify(&f).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(class.to_string(), *label, "{text}");
        let again = parse_formula(&f.to_string()).unwrap();
        assert_eq!(classify(&again).unwrap(), class, "stable under re-parsing: {text}");
    }
}

#[test]
fn corpus_types() {
    for (text, small, admissible, hat) in TYPES {
        let t = parse_type(text).unwrap();
        assert_eq!(t.to_string(), *text);
        assert_eq!(is_small(&t), *small, "{text}");
        assert_eq!(is_admissible(&t), *admissible, "{text}");
        assert_eq!(hat_type(&t).to_string(), *hat, "{text}");
    }
}

#[test]
fn corpus_skolemization() {
    let mut count = 0;
    for (text, label) in FORMULAS {
        if *label != "delta-sentence" {
            continue;
        }
        count += 1;
        let f = parse_formula(text).unwrap();
        let delta = DeltaSentence::from_formula(&f).unwrap();
        let s = skolem_normal_form(&delta);
        let printed = s.to_string();
        let reparsed = parse_formula(&printed).unwrap();
        assert_eq!(reparsed, s, "{printed}");
        assert_eq!(classify(&reparsed).unwrap(), Classification::SkolemForm, "{printed}");

        // The Skolem matrix is B₀ with b ↦ B(a₁)…(aₙ), substituted here independently.
        let names = delta.skolem_names();
        let mut expected = delta.matrix.clone();
        for (b, name) in delta.bounded.iter().zip(&names) {
            let app = delta
                .universal
                .iter()
                .fold(Term::var(name), |t, a| Term::app(t, Term::var(&a.name)));
            expected = expected.substitute(&b.name, &app);
        }
        assert_eq!(s.prefix().1, &expected, "{printed}");

        // Types and bounds of the Skolem functions.
        let (prefix, _) = s.prefix();
        for ((q, binder), b) in prefix.iter().zip(&delta.bounded) {
            assert_eq!(*q, Quantifier::Exists);
            let want = delta.universal.iter().rev().fold(b.ty.clone(), |t, a| FiniteType::fun(t, a.ty.clone()));
            assert_eq!(binder.ty, want);
            assert!(binder.bound.as_ref().unwrap().free_vars().is_empty());
        }
    }
    assert!(count >= 8);
}

#[test]
fn skolem_example_from_the_definition() {
    let f = parse_formula("forall a:0. exists b:0 <~ a. forall c:X. b <=0 a").unwrap();
    let s = skolemize(&f).unwrap();
    let want = parse_formula("exists B:0(0) <~ (\\a:0. a). forall a:0. forall c:X. B(a) <=0 a").unwrap();
    assert_eq!(s, want);
}

#[test]
fn non_delta_sentences_are_rejected_by_skolemize() {
    for text in ["exists x:X. forall y:X. norm(x) <=R norm(y)", "forall a:0(0(X)). 0 =0 0"] {
        let f = parse_formula(text).unwrap();
        assert!(skolemize(&f).is_err(), "{text}");
    }
}

#[test]
fn ill_typed_formulas_name_the_subterm() {
    let f = parse_formula("forall x:X. norm(x) <=0 1").unwrap();
    match classify(&f) {
        Err(lpforge_core::Error::Type(msg)) => assert!(msg.contains("norm(x) <=0 1"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

fn exact_dist(a: &BigRational, b: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(&(a - b).abs()).unwrap()
}

fn exact_rate_holds(points: &[BigRational]) -> bool {
    for n in 0..points.len() {
        for m in n + 1..points.len() {
            let bound = BigRational::new(8.into(), num_bigint::BigInt::from(1) << n);
            if (&points[n] - &points[m]).abs() > bound {
                return false;
            }
        }
    }
    true
}

#[test]
fn cauchy_hat_examples() {
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    let x = vec![zero.clone(), zero.clone(), zero.clone(), one.clone(), one];
    let h = cauchy_hat(&x, exact_dist, 4);
    assert_eq!(h.first_failure, Some(2));
    assert!(h.points.iter().all(|p| *p == zero));
    let c = vec![BigRational::new(3.into(), 7.into()); 65];
    let h = cauchy_hat(&c, exact_dist, 64);
    assert_eq!(h.points, c);
    assert_eq!(rate_violation(&h.points, exact_dist), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cauchy_hat_rate_on_random_steps(steps in prop::collection::vec((0i64..16, prop::bool::ANY, -2i64..3), 64)) {
        // Step k has size (s + j·2^-40)·2^-(k+1) around the guard threshold s = 6.
        let mut x = vec![BigRational::from_integer(0.into())];
        for (k, (s, up, jitter)) in steps.iter().enumerate() {
            let tiny = BigRational::new((*jitter).into(), num_bigint::BigInt::from(1) << 40u32);
            let size = (BigRational::from_integer((*s).into()) + tiny).abs()
                / BigRational::from_integer(num_bigint::BigInt::from(1) << (k + 1));
            let last = x.last().unwrap().clone();
            x.push(if *up { last + size } else { last - size });
        }
        let h = cauchy_hat(&x, exact_dist, 64);
        prop_assert_eq!(h.points.len(), 65);
        prop_assert!(exact_rate_holds(&h.points));
    }
}

#[test]
fn cantor_pair_is_injective() {
    let mut seen = HashSet::new();
    for x in 0..=500u32 {
        for y in 0..=500u32 {
            assert!(seen.insert(cantor_pair(&x.into(), &y.into())));
        }
    }
    assert_eq!(cantor_pair(&1u32.into(), &2u32.into()), BigUint::from(8u32));
    assert_eq!(cantor_pair(&0u32.into(), &0u32.into()), BigUint::from(0u32));
}

#[test]
fn majorant_is_monotone() {
    for b in 1..=16u32 {
        for n in 0..64u32 {
            let bb = BigUint::from(b);
            assert!(majorant_m(&bb, n + 1) > majorant_m(&bb, n));
            assert!(majorant_m(&BigUint::from(b + 1), n) > majorant_m(&bb, n));
        }
    }
}

#[test]
fn majorant_dominates_real_codes() {
    for b in 1..=16i64 {
        let bb = BigUint::from(b as u64);
        for n in 0..=64u32 {
            let m = majorant_m(&bb, n);
            for k in 0..=(4 * b) {
                let r = BigRational::new(k.into(), 4.into());
                assert!(code_real(&r, n) <= m, "b={b} n={n} r={r}");
                assert!(code_real(&-r.clone(), n) <= m, "b={b} n={n} r=-{r}");
            }
        }
    }
}

#[test]
fn ground_comparisons() {
    let norm = |p: &f64| p.abs();
    let nat = |v: u32| GroundValue::<f64>::Nat(v.into());
    let x = parse_type("X").unwrap();
    let n = FiniteType::Nat;
    assert!(check_preceq(&nat(2), &nat(3), &n, norm).unwrap());
    assert!(!check_preceq(&nat(4), &nat(3), &n, norm).unwrap());
    assert!(check_preceq(&GroundValue::Point(-0.5), &GroundValue::Point(0.7), &x, norm).unwrap());
    assert!(check_majorizes(&nat(1), &GroundValue::Point(-0.9), &x, 0, norm).unwrap());
    assert!(!check_majorizes(&nat(0), &GroundValue::Point(-0.9), &x, 0, norm).unwrap());

    let seq = |v: &[u32]| GroundValue::<f64>::NatSeq(v.iter().map(|&k| k.into()).collect());
    let one = FiniteType::one();
    assert!(check_majorizes(&seq(&[1, 2, 3, 4]), &seq(&[1, 0, 3, 2]), &one, 3, norm).unwrap());
    // Not monotone: x*(1) < x*(0).
    assert!(!check_majorizes(&seq(&[3, 2, 3, 4]), &seq(&[1, 0, 1, 0]), &one, 3, norm).unwrap());
    // Dominates pointwise but not x*(y*) ≥ x(y) for y < y*.
    assert!(!check_majorizes(&seq(&[1, 1, 1, 1]), &seq(&[0, 0, 1, 2]), &one, 3, norm).unwrap());
    assert!(check_majorizes(&seq(&[1, 2]), &seq(&[0, 0]), &one, 3, norm).is_err());

    let xs = parse_type("X(0)").unwrap();
    let pts = GroundValue::PointSeq(vec![0.5, -1.5, 2.0]);
    assert!(check_majorizes(&seq(&[1, 2, 2]), &pts, &xs, 2, norm).unwrap());
    assert!(!check_majorizes(&seq(&[1, 1, 2]), &pts, &xs, 2, norm).unwrap());
    assert!(check_preceq(&nat(1), &nat(1), &parse_type("0(X)").unwrap(), norm).is_err());
}
