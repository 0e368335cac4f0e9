//! Polynomials on `T*C^n` with the canonical bracket `{x_j, y_k} = δ_jk`,
//! the shear Hamiltonians and a monomial coverage check built on the
//! closure engine.
//!
//! Hamiltonians are taken modulo constants: constant terms are dropped
//! from generators, bracket results and membership targets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::closure::{closure, ClosureAlgebra, ClosureConfig, ClosureError, ClosureState, Grade, Membership};
use crate::expr::{parse_with, Cursor, ExprRing, ParseError};
use crate::lincomb::LinComb;
use crate::npoly::{write_signed_term, NPoly};

/// A monomial `x_1^{a_1} y_1^{b_1} ... x_n^{a_n} y_n^{b_n}`, stored sparsely
/// by variable slot (`x_k` is slot `2(k-1)`, `y_k` is slot `2k-1`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u32,
    exps: Vec<(u16, u16)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    fn from_slots(mut exps: Vec<(u16, u16)>) -> Self {
        exps.retain(|&(_, e)| e > 0);
        exps.sort_unstable();
        let degree = exps.iter().map(|&(_, e)| e as u32).sum();
        Monomial { degree, exps }
    }

    /// `x_k^e`, `k` counted from one.
    pub fn x(k: usize, e: u16) -> Self {
        Self::from_slots(vec![(2 * (k as u16 - 1), e)])
    }

    pub fn y(k: usize, e: u16) -> Self {
        Self::from_slots(vec![(2 * (k as u16 - 1) + 1, e)])
    }

    /// From exponent vectors `(a_1..a_n)` of `x` and `(b_1..b_n)` of `y`.
    pub fn from_exponents(xs: &[u16], ys: &[u16]) -> Self {
        let mut slots = Vec::new();
        for (k, &a) in xs.iter().enumerate() {
            slots.push((2 * k as u16, a));
        }
        for (k, &b) in ys.iter().enumerate() {
            slots.push((2 * k as u16 + 1, b));
        }
        Self::from_slots(slots)
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    fn exp(&self, slot: u16) -> u16 {
        self.exps.iter().find(|&&(s, _)| s == slot).map_or(0, |&(_, e)| e)
    }

    pub fn x_exp(&self, k: usize) -> u16 {
        self.exp(2 * (k as u16 - 1))
    }

    pub fn y_exp(&self, k: usize) -> u16 {
        self.exp(2 * (k as u16 - 1) + 1)
    }

    /// Largest variable index present (zero for the constant monomial).
    pub fn max_index(&self) -> usize {
        self.exps.last().map_or(0, |&(s, _)| s as usize / 2 + 1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut slots = self.exps.clone();
        for &(s, e) in &other.exps {
            match slots.iter_mut().find(|(t, _)| *t == s) {
                Some((_, f)) => *f += e,
                None => slots.push((s, e)),
            }
        }
        Self::from_slots(slots)
    }

    /// Exponent of slot `s` lowered by one, with the old exponent.
    fn lower(&self, slot: u16) -> Option<(u16, Monomial)> {
        let e = self.exp(slot);
        (e > 0).then(|| {
            let slots = self.exps.iter().map(|&(s, f)| if s == slot { (s, f - 1) } else { (s, f) }).collect();
            (e, Self::from_slots(slots))
        })
    }

    /// `deg x_k - deg y_k` for `k = 1..=n`.
    pub fn weights(&self, n: usize) -> Vec<i64> {
        (1..=n).map(|k| self.x_exp(k) as i64 - self.y_exp(k) as i64).collect()
    }
}

impl Ord for Monomial {
    /// Graded lexicographic with `x_1 > y_1 > x_2 > ...`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            let top = self.exps.iter().chain(&other.exps).map(|&(s, _)| s).max().unwrap_or(0);
            for s in 0..=top {
                match self.exp(s).cmp(&other.exp(s)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut slots = self.exps.clone();
        slots.sort_by_key(|&(s, _)| (s % 2, s / 2));
        let parts: Vec<String> = slots
            .iter()
            .map(|&(s, e)| {
                let var = format!("{}{}", if s % 2 == 0 { 'x' } else { 'y' }, s / 2 + 1);
                if e == 1 {
                    var
                } else {
                    format!("{var}^{e}")
                }
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Rational-coefficient polynomial in `x_1..x_n, y_1..y_n` (coefficients are
/// constant elements of `Q[n]`).
pub type CanonicalPoly = LinComb<Monomial>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("variable index {index} exceeds the dimension {n}")]
    DimensionMismatch { index: usize, n: usize },
}

pub fn max_index(f: &CanonicalPoly) -> usize {
    f.keys().map(Monomial::max_index).max().unwrap_or(0)
}

fn bracket_unchecked(f: &CanonicalPoly, g: &CanonicalPoly, n: usize) -> CanonicalPoly {
    let mut out = CanonicalPoly::zero();
    for (m1, c1) in f.iter() {
        for (m2, c2) in g.iter() {
            let c = c1 * c2;
            for k in 0..n as u16 {
                let (xs, ys) = (2 * k, 2 * k + 1);
                if let (Some((a, p)), Some((b, q))) = (m1.lower(xs), m2.lower(ys)) {
                    out.add_term(p.mul(&q), c.scale(&BigRational::from_integer((a as i64 * b as i64).into())));
                }
                if let (Some((a, p)), Some((b, q))) = (m1.lower(ys), m2.lower(xs)) {
                    out.add_term(p.mul(&q), c.scale(&BigRational::from_integer((-(a as i64) * b as i64).into())));
                }
            }
        }
    }
    out
}

/// `Σ_k ∂f/∂x_k ∂g/∂y_k - ∂f/∂y_k ∂g/∂x_k` on `T*C^n`.
pub fn canonical_bracket(n: usize, f: &CanonicalPoly, g: &CanonicalPoly) -> Result<CanonicalPoly, CanonicalError> {
    for h in [f, g] {
        let index = max_index(h);
        if index > n {
            return Err(CanonicalError::DimensionMismatch { index, n });
        }
    }
    Ok(bracket_unchecked(f, g, n))
}

pub fn poly_to_string(f: &CanonicalPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (first, (m, c)) in f.iter().rev().enumerate().map(|(i, t)| (i == 0, t)) {
        let rest = if m.is_one() { String::new() } else { m.to_string() };
        let coef = c.as_constant().expect("canonical coefficients are rational");
        write_signed_term(&mut out, &coef, 0, &rest, first);
    }
    out
}

impl ExprRing for CanonicalPoly {
    fn from_rational(c: BigRational) -> Self {
        CanonicalPoly::term(Monomial::one(), NPoly::constant(c))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = CanonicalPoly::zero();
        for (m1, c1) in self.iter() {
            for (m2, c2) in other.iter() {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Parses a polynomial in `x1..xn, y1..yn`.
pub fn parse_canonical(src: &str, n: usize) -> Result<CanonicalPoly, ParseError> {
    let resolve = |name: &str, pos: usize, _: &mut Cursor| -> Result<CanonicalPoly, ParseError> {
        let unknown = || ParseError::UnknownSymbol { pos, name: name.to_string() };
        let (kind, idx) = name.split_at(1.min(name.len()));
        let k: usize = idx.parse().map_err(|_| unknown())?;
        if k == 0 || k > n {
            return Err(unknown());
        }
        let m = match kind {
            "x" => Monomial::x(k, 1),
            "y" => Monomial::y(k, 1),
            _ => return Err(unknown()),
        };
        Ok(CanonicalPoly::term(m, NPoly::one()))
    };
    parse_with(src, &resolve)
}

/// Closure backend for `T*C^n`, graded by total degree and by the weights
/// `deg x_k - deg y_k`.
pub struct CanonicalAlgebra {
    n: usize,
}

impl CanonicalAlgebra {
    pub fn new(n: usize) -> Self {
        CanonicalAlgebra { n }
    }
}

fn drop_constant(f: &CanonicalPoly) -> CanonicalPoly {
    f.filter(|m| !m.is_one())
}

/// All non-constant monomials in `2n` variables of degree at most `max_degree`.
pub fn monomials_up_to(n: usize, max_degree: usize) -> Vec<Monomial> {
    fn go(slots: usize, slot: usize, budget: usize, cur: &mut Vec<(u16, u16)>, out: &mut Vec<Monomial>) {
        if slot == slots {
            let m = Monomial::from_slots(cur.clone());
            if !m.is_one() {
                out.push(m);
            }
            return;
        }
        for e in 0..=budget {
            cur.push((slot as u16, e as u16));
            go(slots, slot + 1, budget - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(2 * n, 0, max_degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

impl ClosureAlgebra for CanonicalAlgebra {
    type Key = Monomial;

    fn bracket(&self, f: &CanonicalPoly, g: &CanonicalPoly) -> CanonicalPoly {
        drop_constant(&bracket_unchecked(f, g, self.n))
    }

    fn normalize(&self, f: &CanonicalPoly) -> CanonicalPoly {
        drop_constant(f)
    }

    fn check_target(&self, f: &CanonicalPoly) -> Result<CanonicalPoly, ClosureError> {
        let index = max_index(f);
        if index > self.n {
            return Err(ClosureError::ModeMismatch {
                mode: format!("T*C^{}", self.n),
                detail: format!("variable index {index} out of range"),
            });
        }
        Ok(drop_constant(f))
    }

    fn key_degree(&self, k: &Monomial) -> usize {
        k.degree()
    }

    fn grade(&self, k: &Monomial) -> Grade {
        let mut g = vec![k.degree() as i64];
        g.extend(k.weights(self.n));
        g
    }

    fn bracket_grade(&self, a: &Grade, b: &Grade) -> Grade {
        let mut g: Grade = a.iter().zip(b).map(|(x, y)| x + y).collect();
        g[0] -= 2;
        g
    }

    fn component_sizes(&self, max_degree: usize) -> Option<HashMap<Grade, usize>> {
        let mut sizes = HashMap::new();
        for m in monomials_up_to(self.n, max_degree) {
            *sizes.entry(self.grade(&m)).or_insert(0) += 1;
        }
        Some(sizes)
    }

    fn render(&self, f: &CanonicalPoly) -> String {
        poly_to_string(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShearGenerator {
    pub name: String,
    pub value: CanonicalPoly,
    /// Hamiltonian field is a shear, hence complete.
    pub complete: bool,
}

/// The shear Hamiltonians `-x_k^{p+1}/(p+1)`, `y_k^{q+1}/(q+1)` of degree at
/// most `max(cap, 2)` and `-x_j x_k`, `y_j y_k` for `j < k`.
pub fn shear_generators(n: usize, degree_cap: usize) -> Vec<ShearGenerator> {
    let cap = degree_cap.max(2);
    let mut out = Vec::new();
    let mut push = |value: CanonicalPoly| {
        out.push(ShearGenerator { name: poly_to_string(&value), value, complete: true });
    };
    for d in 1..=cap {
        for k in 1..=n {
            push(CanonicalPoly::term(Monomial::x(k, d as u16), NPoly::from_ratio(-1, d as i64)));
            push(CanonicalPoly::term(Monomial::y(k, d as u16), NPoly::from_ratio(1, d as i64)));
        }
    }
    for j in 1..=n {
        for k in j + 1..=n {
            push(CanonicalPoly::term(Monomial::x(j, 1).mul(&Monomial::x(k, 1)), NPoly::from_int(-1)));
            push(CanonicalPoly::term(Monomial::y(j, 1).mul(&Monomial::y(k, 1)), NPoly::one()));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct CoverageReport {
    pub n: usize,
    pub budget: usize,
    pub slack: usize,
    pub dimension: usize,
    pub members: Vec<Monomial>,
    pub missing: Vec<Monomial>,
}

impl CoverageReport {
    pub fn complete(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Builds the closure of [`shear_generators`] and checks every non-constant
/// monomial of degree at most `budget`; certificates are replayed.
pub fn monomial_coverage(n: usize, budget: usize, slack: usize) -> Result<(CoverageReport, ClosureState<CanonicalAlgebra>), ClosureError> {
    let gens: Vec<(String, CanonicalPoly)> =
        shear_generators(n, budget).into_iter().map(|g| (g.name, g.value)).collect();
    let mut config = ClosureConfig::new(budget, slack);
    config.threads = Some(1);
    let state = closure(CanonicalAlgebra::new(n), &gens, config)?;
    let mut members = Vec::new();
    let mut missing = Vec::new();
    for m in monomials_up_to(n, budget) {
        let target = CanonicalPoly::term(m.clone(), NPoly::one());
        match state.membership(&target)? {
            Membership::Member(cert) if state.replay(&cert).as_ref() == Ok(&target) => members.push(m),
            _ => missing.push(m),
        }
    }
    let report = CoverageReport { n, budget, slack, dimension: state.dimension(), members, missing };
    Ok((report, state))
}
