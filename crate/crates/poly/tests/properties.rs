use lpgraph_poly::{den, gcd, Int, LaurentPoly, VarId};
use proptest::prelude::*;

const VARS: [VarId; 4] = [VarId::a(1), VarId::x(1), VarId::x(2), VarId::x(3)];

fn poly_with(exp: std::ops::Range<i32>, vars: &'static [VarId]) -> impl Strategy<Value = LaurentPoly> {
    let term = (-5i64..=5, prop::collection::vec(exp, vars.len()));
    prop::collection::vec(term, 0..5).prop_map(move |terms| {
        LaurentPoly::from_terms(
            terms.into_iter().map(|(c, es)| (vars.iter().copied().zip(es).collect(), Int::from(c))).collect(),
        )
    })
}

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    poly_with(-2..3, &VARS)
}

fn polynomial() -> impl Strategy<Value = LaurentPoly> {
    poly_with(0..3, &VARS)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(p in laurent(), q in laurent(), r in laurent()) {
        prop_assert_eq!(&(&p + &q) - &q, p.clone());
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
    }

    #[test]
    fn exact_division_round_trip(p in laurent(), q in laurent()) {
        prop_assume!(!q.is_zero());
        prop_assert_eq!((&p * &q).exact_divide(&q).unwrap(), Some(p));
    }

    #[test]
    fn non_multiples_are_rejected(p in polynomial(), q in polynomial()) {
        prop_assume!(!q.is_zero());
        // p·q + 1 is divisible by q only when q is a unit
        let r = &(&p * &q) + &LaurentPoly::one();
        let divides = r.exact_divide(&q).unwrap().is_some();
        prop_assert_eq!(divides, q.is_laurent_unit());
    }

    #[test]
    fn substitution_is_a_homomorphism(p in polynomial(), q in polynomial(), e in laurent()) {
        let v = VarId::x(2);
        let lhs = (&p * &q).substitute(v, &e).unwrap();
        let rhs = &p.substitute(v, &e).unwrap() * &q.substitute(v, &e).unwrap();
        prop_assert_eq!(lhs, rhs);
        let sum = (&p + &q).substitute(v, &e).unwrap();
        prop_assert_eq!(sum, &p.substitute(v, &e).unwrap() + &q.substitute(v, &e).unwrap());
    }

    #[test]
    fn exact_substitution_clears_denominators(p in laurent(), e in polynomial()) {
        prop_assume!(!e.is_zero());
        // q = p·e^k has X2 denominators in p; substituting X2 <- e into p·X2^{-k}·X2^{k} is exact
        let v = VarId::x(2);
        let all = p.substitute_all(&|w| (w == v).then(|| e.clone()));
        if let Ok(direct) = all {
            let single = p.substitute_exact(v, &e).unwrap();
            prop_assert_eq!(direct, single);
        }
    }

    #[test]
    fn gcd_divides_and_contains_common_factor(p in polynomial(), q in polynomial(), r in polynomial()) {
        prop_assume!(!r.is_zero() && !(p.is_zero() && q.is_zero()));
        let a = &p * &r;
        let b = &q * &r;
        let g = gcd(&a, &b);
        prop_assert!(!g.is_zero());
        prop_assert!(a.divisible_by(&g));
        prop_assert!(b.divisible_by(&g));
        prop_assert!(g.divisible_by(&r.polynomial_part().normalize_sign().exact_divide(&LaurentPoly::constant(r.int_content())).unwrap().unwrap()));
        prop_assert!(!g.trailing_coeff().unwrap().is_negative());
    }

    #[test]
    fn den_is_additive_for_an_irreducible(p1 in polynomial(), p2 in polynomial(), shift in 0i32..3) {
        prop_assume!(!p1.is_zero() && !p2.is_zero());
        // X1 + A1·X3 is irreducible and free of the mutated variable X2
        let q: LaurentPoly = "X1 + A1*X3".parse().unwrap();
        let x = VarId::x(2);
        let p1 = &p1 * &q.pow(shift as u32);
        let lhs = den(&(&p1 * &p2), x, &q).unwrap();
        prop_assert_eq!(lhs, den(&p1, x, &q).unwrap() + den(&p2, x, &q).unwrap());
    }

    #[test]
    fn text_and_json_round_trip(p in laurent()) {
        let back: LaurentPoly = p.to_string().parse().unwrap();
        prop_assert_eq!(&back, &p);
        let json = serde_json::to_string(&p).unwrap();
        let back: LaurentPoly = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn split_and_sign(p in laurent()) {
        let (m, rest) = p.split_monomial();
        prop_assert_eq!(&m * &rest, p.clone());
        prop_assert!(rest.is_polynomial());
        let n = p.normalize_sign();
        prop_assert_eq!(n.normalize_sign(), n.clone());
        prop_assert!(n == p || n == -&p);
    }
}
