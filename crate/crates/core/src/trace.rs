//! Products of traces and trace polynomials.

use std::fmt;

use crate::lincomb::LinComb;
use crate::npoly::{write_signed_term, NPoly};
use crate::word::{Letter, TraceWord, Word};

/// A product of traces of non-empty cyclic words, as a multiset.
///
/// Factors are kept sorted in descending order. The empty product is the
/// constant function `1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TraceProduct {
    degree: u32,
    factors: Vec<TraceWord>,
}

impl TraceProduct {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn single(w: TraceWord) -> Self {
        assert!(!w.is_empty(), "empty trace word inside a product");
        TraceProduct { degree: w.degree() as u32, factors: vec![w] }
    }

    pub fn from_factors(mut factors: Vec<TraceWord>) -> Self {
        assert!(factors.iter().all(|w| !w.is_empty()), "empty trace word inside a product");
        factors.sort_unstable_by(|a, b| b.cmp(a));
        let degree = factors.iter().map(|w| w.degree() as u32).sum();
        TraceProduct { degree, factors }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[TraceWord] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn double_degree(&self) -> (usize, usize) {
        self.factors.iter().fold((0, 0), |(a, b), w| {
            let (x, y) = w.double_degree();
            (a + x, b + y)
        })
    }

    pub fn weight(&self) -> i64 {
        self.factors.iter().map(TraceWord::weight).sum()
    }

    pub fn mul(&self, other: &TraceProduct) -> TraceProduct {
        if other.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return other.clone();
        }
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            if self.factors[i] >= other.factors[j] {
                factors.push(self.factors[i]);
                i += 1;
            } else {
                factors.push(other.factors[j]);
                j += 1;
            }
        }
        factors.extend_from_slice(&self.factors[i..]);
        factors.extend_from_slice(&other.factors[j..]);
        TraceProduct { degree: self.degree + other.degree, factors }
    }

    pub fn with_factor(&self, w: TraceWord) -> TraceProduct {
        self.mul(&TraceProduct::single(w))
    }

    /// Distinct factors with their multiplicities, in descending order.
    pub fn grouped(&self) -> Vec<(TraceWord, usize)> {
        let mut out: Vec<(TraceWord, usize)> = Vec::new();
        for w in &self.factors {
            match out.last_mut() {
                Some((last, m)) if last == w => *m += 1,
                _ => out.push((*w, 1)),
            }
        }
        out
    }

    /// The product with one copy of `w` removed.
    pub fn remove_one(&self, w: &TraceWord) -> TraceProduct {
        let mut factors = self.factors.clone();
        let pos = factors.iter().position(|f| f == w).expect("factor present");
        factors.remove(pos);
        TraceProduct { degree: self.degree - w.degree() as u32, factors }
    }

    /// `true` iff every factor has the shape `X^i Y^j`.
    pub fn is_sorted_shape(&self) -> bool {
        self.factors.iter().all(TraceWord::is_sorted)
    }

    pub fn swap_letters(&self) -> TraceProduct {
        TraceProduct::from_factors(self.factors.iter().map(TraceWord::swap_letters).collect())
    }
}

impl fmt::Display for TraceProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut groups = self.grouped();
        groups.sort_by_key(|(w, _)| (std::cmp::Reverse(w.degree()), *w));
        let parts: Vec<String> = groups
            .into_iter()
            .map(|(w, m)| if m == 1 { w.to_string() } else { format!("{w}^{m}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Debug for TraceProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A linear combination of trace products over `Q[n]`.
pub type TracePolynomial = LinComb<TraceProduct>;

impl LinComb<TraceProduct> {
    pub fn constant(c: NPoly) -> Self {
        Self::term(TraceProduct::one(), c)
    }

    pub fn from_product(p: TraceProduct) -> Self {
        Self::term(p, NPoly::one())
    }

    /// `tr(w)`; the empty word gives `tr(id) = n`.
    pub fn trace_of(w: Word) -> Self {
        if w.is_empty() {
            Self::constant(NPoly::n())
        } else {
            Self::from_product(TraceProduct::single(TraceWord::new(w)))
        }
    }

    pub fn trace_letters(letters: &[Letter]) -> Self {
        Self::trace_of(Word::from_letters(letters))
    }

    /// `tr(X^i Y^j)`.
    pub fn trace_sorted(i: usize, j: usize) -> Self {
        Self::trace_of(Word::sorted(i, j))
    }

    /// Product of trace polynomials (multiset union of factors).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (p, c) in self.iter() {
            for (q, d) in other.iter() {
                out.add_term(p.mul(q), c * d);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(NPoly::one()), |acc, _| acc.mul(self))
    }

    /// Maximal total degree of a term; zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.keys().map(TraceProduct::degree).max().unwrap_or(0)
    }

    /// The common weight of all terms, if there is one.
    pub fn homogeneous_weight(&self) -> Option<i64> {
        let mut it = self.keys().map(TraceProduct::weight);
        let w = it.next()?;
        it.all(|v| v == w).then_some(w)
    }

    /// The common double degree of all terms, if there is one.
    pub fn homogeneous_double_degree(&self) -> Option<(usize, usize)> {
        let mut it = self.keys().map(TraceProduct::double_degree);
        let d = it.next()?;
        it.all(|v| v == d).then_some(d)
    }

    /// Terms of exactly the given degree.
    pub fn degree_part(&self, degree: usize) -> Self {
        self.filter(|p| p.degree() == degree)
    }

    /// The constant coefficient (empty product).
    pub fn constant_part(&self) -> NPoly {
        self.coeff(&TraceProduct::one()).cloned().unwrap_or_else(NPoly::zero)
    }

    /// Interchanges `X` and `Y` in every word.
    pub fn swap_letters(&self) -> Self {
        Self::from_terms(self.iter().map(|(p, c)| (p.swap_letters(), c.clone())))
    }

    /// Byte-stable textual form: terms in descending product order, each
    /// coefficient expanded over powers of `n`.
    pub fn to_expr_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        let mut first = true;
        for (p, c) in self.iter().rev() {
            let rest = if p.is_one() { String::new() } else { p.to_string() };
            for (e, coef) in c.terms().rev() {
                write_signed_term(&mut out, coef, e, &rest, first);
                first = false;
            }
        }
        out
    }
}

impl fmt::Display for LinComb<TraceProduct> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::{X, Y};

    #[test]
    fn product_is_a_multiset() {
        let a = TraceWord::from_letters(&[X]);
        let b = TraceWord::from_letters(&[Y, X]);
        let p = TraceProduct::from_factors(vec![a, b, a]);
        let q = TraceProduct::single(a).mul(&TraceProduct::from_factors(vec![b, a]));
        assert_eq!(p, q);
        assert_eq!(p.degree(), 4);
        assert_eq!(p.double_degree(), (3, 1));
        assert_eq!(p.weight(), 2);
        assert_eq!(p.to_string(), "tr(X*Y)*tr(X)^2");
    }

    #[test]
    fn empty_word_folds_into_n() {
        let t = TracePolynomial::trace_letters(&[]);
        assert_eq!(t, TracePolynomial::constant(NPoly::n()));
        assert_eq!(t.to_string(), "n");
    }

    #[test]
    fn printer_orders_by_degree_then_power_of_n() {
        let t = TracePolynomial::trace_sorted(2, 2)
            + TracePolynomial::constant(NPoly::from_coeffs(vec![
                num_rational::BigRational::from_integer(0.into()),
                num_rational::BigRational::new((-1).into(), 2.into()),
                num_rational::BigRational::new(1.into(), 2.into()),
            ]));
        assert_eq!(t.to_string(), "tr(X^2*Y^2) + (1/2)*n^2 - (1/2)*n");
    }
}
