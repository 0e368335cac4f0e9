use cmtrace::canonical::{canonical_bracket, CanonicalPoly, Monomial};
use cmtrace::{bracket, is_normal, Letter, NPoly, Reducer, TracePolynomial, TraceProduct, TraceWord};
use proptest::prelude::*;

fn word(max_len: usize) -> impl Strategy<Value = TraceWord> {
    prop::collection::vec(any::<bool>(), 1..=max_len).prop_map(|bits| {
        let letters: Vec<Letter> = bits.into_iter().map(|b| if b { Letter::X } else { Letter::Y }).collect();
        TraceWord::from_letters(&letters)
    })
}

fn product(max_len: usize, max_factors: usize) -> impl Strategy<Value = TraceProduct> {
    prop::collection::vec(word(max_len), 0..=max_factors).prop_map(TraceProduct::from_factors)
}

fn coeff() -> impl Strategy<Value = NPoly> {
    prop_oneof![
        (-4i64..=4).prop_map(NPoly::from_int),
        (-3i64..=3, 1i64..=3).prop_map(|(a, b)| NPoly::from_ratio(a, b)),
        (-2i64..=2).prop_map(|a| &NPoly::n() * &NPoly::from_int(a)),
    ]
}

fn poly(max_len: usize, max_factors: usize, max_terms: usize) -> impl Strategy<Value = TracePolynomial> {
    prop::collection::vec((product(max_len, max_factors), coeff()), 1..=max_terms).prop_map(|terms| {
        let mut f = TracePolynomial::zero();
        for (p, c) in terms {
            f.add_term(p, c);
        }
        f
    })
}

fn small() -> impl Strategy<Value = TracePolynomial> {
    poly(3, 2, 2)
}

fn canonical(n: usize) -> impl Strategy<Value = CanonicalPoly> {
    let mono = prop::collection::vec((0u16..=2, 0u16..=2), n).prop_map(|e| {
        let xs: Vec<u16> = e.iter().map(|p| p.0).collect();
        let ys: Vec<u16> = e.iter().map(|p| p.1).collect();
        Monomial::from_exponents(&xs, &ys)
    });
    prop::collection::vec((mono, -3i64..=3), 1..=3).prop_map(|terms| {
        let mut f = CanonicalPoly::zero();
        for (m, c) in terms {
            f.add_term(m, NPoly::from_int(c));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric(f in poly(4, 2, 3), g in poly(4, 2, 3)) {
        prop_assert_eq!(bracket(&f, &g), -&bracket(&g, &f));
    }

    #[test]
    fn bracket_satisfies_jacobi(f in small(), g in small(), h in small()) {
        let a = bracket(&f, &bracket(&g, &h));
        let b = bracket(&g, &bracket(&h, &f));
        let c = bracket(&h, &bracket(&f, &g));
        prop_assert!((&(&a + &b) + &c).is_zero());
    }

    #[test]
    fn bracket_is_a_derivation(f in small(), g in small(), h in small()) {
        let lhs = bracket(&f, &g.mul(&h));
        let rhs = &bracket(&f, &g).mul(&h) + &g.mul(&bracket(&f, &h));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_adds_weights(v in word(5), w in word(5)) {
        let (f, g) = (TracePolynomial::from_product(TraceProduct::single(v)), TracePolynomial::from_product(TraceProduct::single(w)));
        let b = bracket(&f, &g);
        for p in b.keys() {
            prop_assert_eq!(p.weight(), v.weight() + w.weight());
        }
    }

    #[test]
    fn bracket_lowers_degree_by_two(f in poly(4, 2, 3), g in poly(4, 2, 3)) {
        let b = bracket(&f, &g);
        if !b.is_zero() {
            prop_assert!(b.degree() + 2 <= f.degree() + g.degree());
        }
    }

    #[test]
    fn reduction_is_idempotent_and_normal(f in poly(6, 2, 3)) {
        let r = Reducer::new();
        let once = r.reduce_poly(&f);
        prop_assert!(is_normal(&once));
        prop_assert_eq!(r.reduce_poly(&once), once);
    }

    #[test]
    fn reduction_keeps_leading_word_and_weight(w in word(8)) {
        let (i, j) = w.double_degree();
        let f = TracePolynomial::from_product(TraceProduct::single(w));
        let red = Reducer::new().reduce(&f);
        prop_assert_eq!(&red.leading, &TracePolynomial::trace_sorted(i, j));
        for p in red.corrections.keys() {
            prop_assert!(p.degree() + 4 <= i + j);
            prop_assert_eq!(p.weight(), i as i64 - j as i64);
        }
    }

    #[test]
    fn canonical_bracket_is_antisymmetric_and_jacobi(f in canonical(2), g in canonical(2), h in canonical(2)) {
        let br = |a: &CanonicalPoly, b: &CanonicalPoly| canonical_bracket(2, a, b).unwrap();
        prop_assert_eq!(br(&f, &g), -&br(&g, &f));
        let sum = &(&br(&f, &br(&g, &h)) + &br(&g, &br(&h, &f))) + &br(&h, &br(&f, &g));
        prop_assert!(sum.is_zero());
    }
}
