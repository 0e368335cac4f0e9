use std::collections::BTreeMap;

use cmtrace::closure::{
    all_trace_words, closure, enumerate_products, Certificate, ClosureConfig, ClosureState, GeneratorSet, Membership,
    Mode, TraceAlgebra,
};
use cmtrace::{bracket, parse, Reducer, TracePolynomial, TraceProduct};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

type Vector = BTreeMap<TraceProduct, BigRational>;

/// Row echelon form over `Q` with `n` specialized to a fixed rational.
struct Dense {
    n: BigRational,
    rows: Vec<(TraceProduct, Vector)>,
}

impl Dense {
    fn new(n: (i64, i64)) -> Self {
        Dense { n: BigRational::new(BigInt::from(n.0), BigInt::from(n.1)), rows: Vec::new() }
    }

    fn vector(&self, f: &TracePolynomial) -> Vector {
        f.iter().map(|(p, c)| (p.clone(), c.eval_rational(&self.n))).filter(|(_, c)| !c.is_zero()).collect()
    }

    fn residual(&self, f: &TracePolynomial) -> Vector {
        let mut v = self.vector(f);
        for (pivot, row) in &self.rows {
            if let Some(c) = v.get(pivot).cloned() {
                for (k, x) in row {
                    let e = v.entry(k.clone()).or_insert_with(BigRational::zero);
                    *e -= &c * x;
                    if e.is_zero() {
                        v.remove(k);
                    }
                }
            }
        }
        v
    }

    fn contains(&self, f: &TracePolynomial) -> bool {
        self.residual(f).is_empty()
    }

    fn insert(&mut self, f: &TracePolynomial) -> bool {
        let v = self.residual(f);
        let Some((pivot, lead)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let row: Vector = v.into_iter().map(|(k, c)| (k, c / &lead)).collect();
        for (_, other) in self.rows.iter_mut() {
            if let Some(c) = other.get(&pivot).cloned() {
                for (k, x) in &row {
                    let e = other.entry(k.clone()).or_insert_with(BigRational::zero);
                    *e -= &c * x;
                    if e.is_zero() {
                        other.remove(k);
                    }
                }
            }
        }
        self.rows.push((pivot, row));
        true
    }
}

fn build(gens: &[&str], mode: Mode, budget: usize, slack: usize) -> ClosureState<TraceAlgebra> {
    let mut set = GeneratorSet::default();
    for g in gens {
        set.push(g, parse(g).unwrap());
    }
    let mut config = ClosureConfig::new(budget, slack);
    config.threads = Some(2);
    closure(TraceAlgebra::new(mode), &set.named(), config).unwrap()
}

const SPECIALIZATIONS: [(i64, i64); 3] = [(113, 7), (-29, 3), (1009, 13)];

const F: [&str; 4] = ["tr(Y)", "tr(Y^2)", "tr(X^3)", "tr(X)^2"];

fn check_span(state: &ClosureState<TraceAlgebra>, mode: Mode) {
    let reducer = Reducer::new();
    let normal = |f: TracePolynomial| match mode {
        Mode::RankOne => reducer.reduce_poly(&f),
        Mode::Ambient => f,
    };
    let values: Vec<TracePolynomial> = state.basis().iter().map(|b| b.value.clone()).collect();
    assert!(values.len() <= 200);
    let cap = state.config().effective_budget();
    let brackets: Vec<TracePolynomial> = values
        .iter()
        .enumerate()
        .flat_map(|(i, a)| values[i..].iter().map(|b| normal(bracket(a, b))).collect::<Vec<_>>())
        .filter(|c| !c.is_zero() && c.degree() <= cap)
        .collect();
    for n in SPECIALIZATIONS {
        let mut dense = Dense::new(n);
        for v in &values {
            assert!(dense.insert(v), "basis element dependent at n = {n:?}: {v}");
        }
        for c in &brackets {
            assert!(dense.contains(c), "bracket escapes the span at n = {n:?}: {c}");
        }
    }
}

#[test]
fn ambient_span_agrees_with_dense_elimination() {
    let state = build(&F, Mode::Ambient, 5, 0);
    check_span(&state, Mode::Ambient);
}

#[test]
fn rank_one_span_agrees_with_dense_elimination() {
    let state = build(&F, Mode::RankOne, 5, 0);
    check_span(&state, Mode::RankOne);
}

#[test]
fn membership_agrees_with_dense_elimination() {
    let state = build(&["tr(X^2)", "tr(Y^2)", "tr(X^3)"], Mode::Ambient, 4, 0);
    let mut dense = Dense::new(SPECIALIZATIONS[1]);
    for b in state.basis() {
        dense.insert(&b.value);
    }
    let products = enumerate_products(&all_trace_words(4), 4);
    let mut members = 0;
    for (k, p) in products.iter().enumerate() {
        let single = TracePolynomial::from_product(p.clone());
        let mixed = &single + &TracePolynomial::from_product(products[(7 * k + 3) % products.len()].clone());
        for t in [single, mixed] {
            let verdict = state.membership(&t).unwrap();
            assert_eq!(verdict.is_member(), dense.contains(&t), "{t}");
            if let Membership::Member(cert) = verdict {
                members += 1;
                assert_eq!(state.replay(&cert).unwrap(), t);
            }
        }
    }
    assert!(members > 0 && members < 2 * products.len());
}

#[test]
fn larger_budgets_contain_smaller_closures() {
    let mut previous: Option<ClosureState<TraceAlgebra>> = None;
    for budget in 3..=5 {
        let state = build(&F, Mode::Ambient, budget, 0);
        if let Some(prev) = &previous {
            for (d, k) in prev.dimension_by_degree() {
                assert!(state.dimension_by_degree()[&d] >= k);
            }
            for b in prev.basis() {
                assert!(state.membership(&b.value).unwrap().is_member(), "{}", b.value);
            }
        }
        previous = Some(state);
    }
}

#[test]
fn certificates_survive_text_round_trip() {
    let state = build(&F, Mode::RankOne, 4, 1);
    assert!(state.verify_certificates().is_ok());
    for b in state.basis() {
        let text = b.certificate.to_text();
        let parsed = Certificate::parse(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        assert_eq!(state.replay(&parsed).unwrap(), b.value);
    }
}

#[test]
fn thread_count_does_not_change_the_basis() {
    let run = |threads| {
        let mut set = GeneratorSet::default();
        for g in F {
            set.push(g, parse(g).unwrap());
        }
        let mut config = ClosureConfig::new(5, 1);
        config.threads = Some(threads);
        let s = closure(TraceAlgebra::new(Mode::RankOne), &set.named(), config).unwrap();
        s.basis().iter().map(|b| (b.value.to_string(), b.certificate.to_text())).collect::<Vec<_>>()
    };
    assert_eq!(run(1), run(4));
}
