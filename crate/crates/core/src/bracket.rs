//! The Poisson bracket on trace polynomials induced by `tr(dX ∧ dY)`.
//!
//! On matrix entries `{X_ij, Y_kl} = δ_jk δ_li`. For two traces this gives
//! the splice rule: every `X` of `v` paired with every `Y` of `w` contributes
//! `+tr(v₂v₁w₂w₁)` where `v = v₁Xv₂` and `w = w₁Yw₂` (cyclically), and every
//! `Y` of `v` paired with an `X` of `w` contributes the same splice with a
//! minus sign. Spliced empty words are `tr(id) = n`.

use std::collections::BTreeMap;

use crate::npoly::NPoly;
use crate::trace::{TracePolynomial, TraceProduct};
use crate::word::{Letter, TraceWord, Word};

/// Integer-coefficient splice terms; `None` stands for the empty word.
fn splice_terms(v: &TraceWord, w: &TraceWord) -> BTreeMap<Option<TraceWord>, i64> {
    let v = v.word();
    let w = w.word();
    let mut out: BTreeMap<Option<TraceWord>, i64> = BTreeMap::new();
    let (a, b) = (v.len(), w.len());
    // Rotations that bring each letter to the end, with the letter removed.
    let v_cuts: Vec<(Letter, Word)> = (0..a).map(|p| (v.letter(p), v.rotate(p + 1).drop_last())).collect();
    let w_cuts: Vec<(Letter, Word)> = (0..b).map(|q| (w.letter(q), w.rotate(q + 1).drop_last())).collect();
    for (lv, vr) in &v_cuts {
        for (lw, wr) in &w_cuts {
            let sign = match (lv, lw) {
                (Letter::X, Letter::Y) => 1,
                (Letter::Y, Letter::X) => -1,
                _ => continue,
            };
            let joined = vr.concat(wr);
            let key = (!joined.is_empty()).then(|| TraceWord::new(joined));
            *out.entry(key).or_insert(0) += sign;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// `{tr v, tr w}`.
pub fn bracket_words(v: &TraceWord, w: &TraceWord) -> TracePolynomial {
    let mut out = TracePolynomial::zero();
    for (key, c) in splice_terms(v, w) {
        match key {
            Some(word) => out.add_term(TraceProduct::single(word), NPoly::from_int(c)),
            None => out.add_term(TraceProduct::one(), &NPoly::n() * &NPoly::from_int(c)),
        }
    }
    out
}

/// `{P, Q}` for two trace products, by the Leibniz rule over factors.
pub fn bracket_products(p: &TraceProduct, q: &TraceProduct) -> TracePolynomial {
    let mut acc: BTreeMap<TraceProduct, NPoly> = BTreeMap::new();
    for (v, mv) in p.grouped() {
        let p_rest = p.remove_one(&v);
        for (w, mw) in q.grouped() {
            let q_rest = q.remove_one(&w);
            let rest = p_rest.mul(&q_rest);
            let mult = (mv * mw) as i64;
            for (key, c) in splice_terms(&v, &w) {
                let (prod, coeff) = match key {
                    Some(word) => (rest.with_factor(word), NPoly::from_int(c * mult)),
                    None => (rest.clone(), NPoly::n().scale(&num_rational::BigRational::from_integer((c * mult).into()))),
                };
                let entry = acc.entry(prod).or_insert_with(NPoly::zero);
                *entry += &coeff;
            }
        }
    }
    TracePolynomial::from_terms(acc)
}

/// `{f, g}`, the bilinear extension of [`bracket_products`].
pub fn bracket(f: &TracePolynomial, g: &TracePolynomial) -> TracePolynomial {
    let mut acc: BTreeMap<TraceProduct, NPoly> = BTreeMap::new();
    for (p, c) in f.iter() {
        if p.is_one() {
            continue;
        }
        for (q, d) in g.iter() {
            if q.is_one() {
                continue;
            }
            let cd = c * d;
            for (prod, e) in bracket_products(p, q).into_terms() {
                let entry = acc.entry(prod).or_insert_with(NPoly::zero);
                *entry += &(&e * &cd);
            }
        }
    }
    TracePolynomial::from_terms(acc)
}
