//! Rewriting of trace polynomials into products of `tr(X^i Y^j)`, valid on
//! the locus where `A = [X, Y] + id` has rank one.
//!
//! Three identities drive the rewriting, with `B = [X, Y]`:
//!
//! * swap: `tr(M'·YX·N') = tr(M'·XY·N') - tr(N'M'·B)`, and inside a trace
//!   that already carries a `B`: `tr(M'·YX·N'·B) = tr(M'·XY·N'·B) - tr(M'BN'B)`;
//! * the double-`B` expansion, from `tr(MCNC) = tr(MC)·tr(NC)` for rank-one `C`:
//!   `tr(MBNB) = tr(MB)tr(NB) + tr(M)tr(NB) + tr(MB)tr(N) + tr(M)tr(N)
//!   - tr(MNB) - tr(NMB) - tr(MN)`;
//! * the sorted case, from differentiating `tr((X + tY^j)^{i+1} B) = 0` at
//!   `t = 0` (the flow leaves `B` unchanged):
//!   `Σ_{m=0}^{i} tr(X^{i-m} Y^j X^m B) = 0`.
//!
//! Every recursive call strictly lowers the number of letters, and each swap
//! lowers the inversion count of the linear word, so rewriting terminates.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::npoly::NPoly;
use crate::trace::{TracePolynomial, TraceProduct};
use crate::word::{Letter, TraceWord, Word};

/// A reduced trace polynomial with its top-degree part split off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedForm {
    pub value: TracePolynomial,
    pub leading: TracePolynomial,
    pub corrections: TracePolynomial,
}

impl ReducedForm {
    fn new(value: TracePolynomial) -> Self {
        let top = value.degree();
        let leading = value.degree_part(top);
        let corrections = value.filter(|p| p.degree() < top);
        ReducedForm { value, leading, corrections }
    }
}

/// `true` iff every factor of every term has the shape `X^i Y^j`.
pub fn is_normal(f: &TracePolynomial) -> bool {
    f.keys().all(TraceProduct::is_sorted_shape)
}

/// Memoizing reduction engine; safe to share between threads.
#[derive(Default)]
pub struct Reducer {
    words: RwLock<HashMap<TraceWord, Arc<TracePolynomial>>>,
    b_words: RwLock<HashMap<Word, Arc<TracePolynomial>>>,
    sorted_b: RwLock<HashMap<(usize, usize), Arc<TracePolynomial>>>,
    products: RwLock<HashMap<TraceProduct, Arc<TracePolynomial>>>,
}

fn cached<K, F>(map: &RwLock<HashMap<K, Arc<TracePolynomial>>>, key: K, compute: F) -> Arc<TracePolynomial>
where
    K: std::hash::Hash + Eq,
    F: FnOnce() -> TracePolynomial,
{
    if let Some(v) = map.read().expect("memo lock").get(&key) {
        return v.clone();
    }
    let v = Arc::new(compute());
    map.write().expect("memo lock").entry(key).or_insert(v).clone()
}

impl Reducer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Plain trace of a linear word, reduced.
    fn trace_linear(&self, w: Word) -> TracePolynomial {
        if w.is_empty() {
            TracePolynomial::constant(NPoly::n())
        } else {
            (*self.reduce_word(&TraceWord::new(w))).clone()
        }
    }

    /// Reduced form of `tr(w)`.
    pub fn reduce_word(&self, w: &TraceWord) -> Arc<TracePolynomial> {
        cached(&self.words, *w, || {
            let mut word = w.word();
            let mut acc = TracePolynomial::zero();
            while let Some(k) = word.first_yx() {
                let left = word.slice(0, k);
                let right = word.slice(k + 2, word.len());
                acc -= &*self.reduce_b(right.concat(&left));
                word = word.swap_adjacent(k);
            }
            acc += &TracePolynomial::trace_of(word);
            acc
        })
    }

    /// Reduced form of `tr(w · B)` for a linear word `w`.
    pub fn reduce_b(&self, w: Word) -> Arc<TracePolynomial> {
        cached(&self.b_words, w, || {
            if w.is_empty() {
                return TracePolynomial::zero();
            }
            let (mut acc, sorted) = self.sort_b(w);
            let (i, j) = (sorted.x_count(), sorted.y_count());
            acc += &*self.resolve_sorted(i, j);
            acc
        })
    }

    /// Bubble-sorts `w` toward `X^i Y^j` inside `tr(w · B)`, returning the
    /// accumulated corrections and the sorted word.
    fn sort_b(&self, w: Word) -> (TracePolynomial, Word) {
        let mut word = w;
        let mut acc = TracePolynomial::zero();
        while let Some(k) = word.first_yx() {
            let left = word.slice(0, k);
            let right = word.slice(k + 2, word.len());
            acc -= &self.double_b(left, right);
            word = word.swap_adjacent(k);
        }
        (acc, word)
    }

    /// `tr(M B N B)`.
    fn double_b(&self, m: Word, n: Word) -> TracePolynomial {
        let mb = self.reduce_b(m);
        let nb = self.reduce_b(n);
        let tm = self.trace_linear(m);
        let tn = self.trace_linear(n);
        let mut acc = mb.mul(&nb);
        acc += &tm.mul(&nb);
        acc += &mb.mul(&tn);
        acc += &tm.mul(&tn);
        acc -= &*self.reduce_b(m.concat(&n));
        acc -= &*self.reduce_b(n.concat(&m));
        acc -= &self.trace_linear(m.concat(&n));
        acc
    }

    /// `tr(X^i Y^j B)`.
    fn resolve_sorted(&self, i: usize, j: usize) -> Arc<TracePolynomial> {
        cached(&self.sorted_b, (i, j), || {
            if i == 0 || j == 0 {
                return TracePolynomial::zero();
            }
            // (i + 1) tr(X^i Y^j B) + Σ_{m≥1} corrections(X^{i-m} Y^j X^m) = 0
            let mut acc = TracePolynomial::zero();
            for m in 1..=i {
                let w = Word::sorted(i - m, j).concat(&Word::sorted(m, 0));
                let (corr, sorted) = self.sort_b(w);
                debug_assert_eq!(sorted, Word::sorted(i, j));
                acc += &corr;
            }
            acc.scale(&NPoly::from_ratio(-1, i as i64 + 1))
        })
    }

    pub fn reduce_product(&self, p: &TraceProduct) -> Arc<TracePolynomial> {
        if p.is_sorted_shape() {
            return Arc::new(TracePolynomial::from_product(p.clone()));
        }
        cached(&self.products, p.clone(), || {
            p.factors()
                .iter()
                .fold(TracePolynomial::constant(NPoly::one()), |acc, w| acc.mul(&self.reduce_word(w)))
        })
    }

    /// Reduced value of `f` on the rank-one locus.
    pub fn reduce_poly(&self, f: &TracePolynomial) -> TracePolynomial {
        let mut out = TracePolynomial::zero();
        for (p, c) in f.iter() {
            if p.is_sorted_shape() {
                out.add_term(p.clone(), c.clone());
            } else {
                out.add_scaled(&self.reduce_product(p), c);
            }
        }
        out
    }

    pub fn reduce(&self, f: &TracePolynomial) -> ReducedForm {
        ReducedForm::new(self.reduce_poly(f))
    }

    /// `tr` of a word in `X`, `Y` and `B` (`None`), with `B = XY - YX`.
    /// With `via_slot`, a single `B` is rotated to the end and resolved by
    /// [`Reducer::reduce_b`]; otherwise every `B` is expanded. The result is
    /// not yet reduced when no `B` survives to the slot.
    pub fn trace_with_commutator(&self, symbols: &[Option<Letter>], via_slot: bool) -> TracePolynomial {
        let slots: Vec<usize> = symbols.iter().enumerate().filter(|(_, s)| s.is_none()).map(|(k, _)| k).collect();
        match slots.as_slice() {
            [] => {
                let letters: Vec<Letter> = symbols.iter().flatten().copied().collect();
                TracePolynomial::trace_letters(&letters)
            }
            [k] if via_slot => {
                let rotated: Vec<Letter> = symbols[k + 1..].iter().chain(&symbols[..*k]).flatten().copied().collect();
                (*self.reduce_b(Word::from_letters(&rotated))).clone()
            }
            [k, ..] => {
                let splice = |a: Letter, b: Letter| {
                    let mut w = symbols[..*k].to_vec();
                    w.extend([Some(a), Some(b)]);
                    w.extend_from_slice(&symbols[k + 1..]);
                    self.trace_with_commutator(&w, via_slot)
                };
                &splice(Letter::X, Letter::Y) - &splice(Letter::Y, Letter::X)
            }
        }
    }

    /// `tr(left · right · B)` for letter sequences.
    pub fn reduce_b_letters(&self, left: &[Letter], right: &[Letter]) -> TracePolynomial {
        let w = Word::from_letters(left).concat(&Word::from_letters(right));
        (*self.reduce_b(w)).clone()
    }
}

/// One-shot reduction with a fresh memo table.
pub fn reduce(f: &TracePolynomial) -> ReducedForm {
    Reducer::new().reduce(f)
}

/// One-shot `tr(left · right · B)` with a fresh memo table.
pub fn reduce_b(left: &[Letter], right: &[Letter]) -> TracePolynomial {
    Reducer::new().reduce_b_letters(left, right)
}

/// Procesi–Razmyslov bound on the degree of trace generators for `n × n`
/// matrices; reported as metadata only.
pub fn generator_degree_bound(n: usize) -> usize {
    n * n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use Letter::{X, Y};

    fn binom2() -> TracePolynomial {
        parse("(1/2)*n^2 - (1/2)*n").unwrap()
    }

    #[test]
    fn commutator_slot_agrees_with_expansion() {
        let r = Reducer::new();
        for src in ["tr(X*Y*B)", "tr(B*X^2*Y)", "tr(X*B*Y^2*X)", "tr(B^2)", "tr(X*B*Y*B)", "tr(X^3*B)"] {
            let slot = crate::expr::parse_with_commutator(src, &|s| r.trace_with_commutator(s, true)).unwrap();
            let expanded = crate::expr::parse_with_commutator(src, &|s| r.trace_with_commutator(s, false)).unwrap();
            assert_eq!(r.reduce_poly(&slot), r.reduce_poly(&expanded), "{src}");
        }
        let xyb = crate::expr::parse_with_commutator("tr(X*Y*B)", &|s| r.trace_with_commutator(s, true)).unwrap();
        assert_eq!(xyb, binom2());
    }

    #[test]
    fn trace_of_power_of_x_times_b_vanishes() {
        for k in 0..=5 {
            let left = vec![X; k];
            assert!(reduce_b(&left, &[]).is_zero(), "k = {k}");
        }
    }

    #[test]
    fn trace_xy_b_is_binomial() {
        assert_eq!(reduce_b(&[X], &[Y]), binom2());
    }

    #[test]
    fn xyxy_reduces_with_constant_correction() {
        let r = reduce(&parse("tr(X*Y*X*Y)").unwrap());
        assert_eq!(r.value, &parse("tr(X^2*Y^2)").unwrap() + &binom2());
        assert_eq!(r.leading, parse("tr(X^2*Y^2)").unwrap());
        assert_eq!(r.corrections, binom2());
    }

    #[test]
    fn trace_b_squared() {
        let b2 = parse("2*tr(X*Y*X*Y) - 2*tr(X^2*Y^2)").unwrap();
        assert_eq!(reduce(&b2).value, parse("n^2 - n").unwrap());
    }

    #[test]
    fn normal_shapes() {
        assert!(is_normal(&parse("tr(X^2*Y)").unwrap()));
        assert!(!is_normal(&parse("tr(X*Y*X*Y)").unwrap()));
        assert!(is_normal(&TracePolynomial::zero()));
        assert_eq!(reduce(&parse("tr(X^3)").unwrap()).value, parse("tr(X^3)").unwrap());
    }
}
