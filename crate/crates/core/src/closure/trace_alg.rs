//! The trace-polynomial algebra as a closure backend, in ambient or
//! rank-one mode, and the preset generator sets.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::bracket::bracket;
use crate::expr::{parse, ParseError};
use crate::reduction::{is_normal, Reducer};
use crate::trace::{TracePolynomial, TraceProduct};
use crate::word::{TraceWord, Word};

use super::{ClosureAlgebra, ClosureError, Grade};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// All pairs of matrices; trace words are independent symbols.
    Ambient,
    /// The locus `rank([X, Y] + id) = 1`; values are kept in reduced form.
    RankOne,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ambient => "ambient",
            Mode::RankOne => "rank-one",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ambient" => Ok(Mode::Ambient),
            "rank-one" | "rankone" | "rank_one" => Ok(Mode::RankOne),
            _ => Err(format!("unknown mode `{s}` (expected ambient or rank-one)")),
        }
    }
}

pub struct TraceAlgebra {
    mode: Mode,
    reducer: Reducer,
}

impl TraceAlgebra {
    pub fn new(mode: Mode) -> Self {
        TraceAlgebra { mode, reducer: Reducer::new() }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn reducer(&self) -> &Reducer {
        &self.reducer
    }
}

/// All products of the given trace words (with repetition) of total degree
/// at most `max_degree`, including the empty product.
pub fn enumerate_products(words: &[TraceWord], max_degree: usize) -> Vec<TraceProduct> {
    fn go(words: &[TraceWord], start: usize, budget: usize, current: &mut Vec<TraceWord>, out: &mut Vec<TraceProduct>) {
        out.push(TraceProduct::from_factors(current.clone()));
        for i in start..words.len() {
            let d = words[i].degree();
            if d <= budget {
                current.push(words[i]);
                go(words, i, budget - d, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(words, 0, max_degree, &mut Vec::new(), &mut out);
    out
}

/// Every cyclic word of length `1..=max_len`.
pub fn all_trace_words(max_len: usize) -> Vec<TraceWord> {
    let mut set = BTreeSet::new();
    for len in 1..=max_len {
        for bits in 0u32..(1 << len) {
            let letters: Vec<_> = (0..len)
                .map(|k| if bits >> (len - 1 - k) & 1 == 1 { crate::word::Letter::Y } else { crate::word::Letter::X })
                .collect();
            set.insert(TraceWord::from_letters(&letters));
        }
    }
    set.into_iter().collect()
}

/// `X^i Y^j` words of length `1..=max_len`.
pub fn sorted_trace_words(max_len: usize) -> Vec<TraceWord> {
    let mut out = Vec::new();
    for d in 1..=max_len {
        for i in 0..=d {
            out.push(TraceWord::new(Word::sorted(i, d - i)));
        }
    }
    out
}

impl ClosureAlgebra for TraceAlgebra {
    type Key = TraceProduct;

    fn bracket(&self, f: &TracePolynomial, g: &TracePolynomial) -> TracePolynomial {
        let b = bracket(f, g);
        match self.mode {
            Mode::Ambient => b,
            Mode::RankOne => self.reducer.reduce_poly(&b),
        }
    }

    fn normalize(&self, f: &TracePolynomial) -> TracePolynomial {
        match self.mode {
            Mode::Ambient => f.clone(),
            Mode::RankOne => self.reducer.reduce_poly(f),
        }
    }

    fn check_target(&self, f: &TracePolynomial) -> Result<TracePolynomial, ClosureError> {
        if self.mode == Mode::RankOne && !is_normal(f) {
            let bad = f.keys().find(|p| !p.is_sorted_shape()).map(|p| p.to_string()).unwrap_or_default();
            return Err(ClosureError::ModeMismatch {
                mode: self.mode.to_string(),
                detail: format!("{bad} has a factor not of the form tr(X^i*Y^j); reduce it first"),
            });
        }
        Ok(f.clone())
    }

    fn key_degree(&self, k: &TraceProduct) -> usize {
        k.degree()
    }

    fn grade(&self, k: &TraceProduct) -> Grade {
        match self.mode {
            Mode::Ambient => {
                let (i, j) = k.double_degree();
                vec![i as i64, j as i64]
            }
            Mode::RankOne => vec![k.weight()],
        }
    }

    fn bracket_grade(&self, a: &Grade, b: &Grade) -> Grade {
        match self.mode {
            Mode::Ambient => vec![a[0] + b[0] - 1, a[1] + b[1] - 1],
            Mode::RankOne => vec![a[0] + b[0]],
        }
    }

    fn component_sizes(&self, max_degree: usize) -> Option<HashMap<Grade, usize>> {
        let words = match self.mode {
            Mode::Ambient => all_trace_words(max_degree),
            Mode::RankOne => sorted_trace_words(max_degree),
        };
        let mut sizes = HashMap::new();
        for p in enumerate_products(&words, max_degree) {
            *sizes.entry(self.grade(&p)).or_insert(0) += 1;
        }
        Some(sizes)
    }

    fn render(&self, f: &TracePolynomial) -> String {
        f.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub value: TracePolynomial,
    /// The Hamiltonian field is complete: the function depends on `X` only,
    /// on `Y` only, or is a multiple of `tr(XY)`.
    pub complete: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorSet {
    pub elements: Vec<Generator>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorFileError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: duplicate name `{name}`")]
    Duplicate { line: usize, name: String },
}

fn has_complete_field(f: &TracePolynomial) -> bool {
    let words = || f.keys().flat_map(|p| p.factors().iter());
    let only_x = words().all(|w| w.double_degree().1 == 0);
    let only_y = words().all(|w| w.double_degree().0 == 0);
    let scale_field = f.iter().all(|(p, _)| p.is_one() || *p == TraceProduct::single(TraceWord::sorted(1, 1)));
    only_x || only_y || scale_field
}

impl GeneratorSet {
    pub fn push(&mut self, name: &str, value: TracePolynomial) {
        let complete = has_complete_field(&value);
        self.elements.push(Generator { name: name.to_string(), value, complete });
    }

    fn from_exprs(exprs: &[&str]) -> Self {
        let mut set = GeneratorSet::default();
        for e in exprs {
            let v = parse(e).expect("preset expression");
            set.push(&v.to_string(), v);
        }
        set
    }

    /// `{tr Y, tr Y², tr X³, (tr X)²}`.
    pub fn preset_f() -> Self {
        Self::from_exprs(&["tr(Y)", "tr(Y^2)", "tr(X^3)", "tr(X)^2"])
    }

    /// `tr X^i`, `tr Y^j` of degree at most `cap`, and `(tr X^i)²`, `(tr Y^j)²`
    /// of degree at most `cap`.
    pub fn preset_d(cap: usize) -> Self {
        let mut exprs = Vec::new();
        for i in 1..=cap {
            exprs.push(format!("tr(X^{i})"));
            exprs.push(format!("tr(Y^{i})"));
        }
        for i in 1..=cap / 2 {
            exprs.push(format!("tr(X^{i})^2"));
            exprs.push(format!("tr(Y^{i})^2"));
        }
        let refs: Vec<&str> = exprs.iter().map(String::as_str).collect();
        Self::from_exprs(&refs)
    }

    pub fn preset(name: &str, cap: usize) -> Option<Self> {
        match name {
            "F" | "f" => Some(Self::preset_f()),
            "D" | "d" => Some(Self::preset_d(cap)),
            _ => None,
        }
    }

    /// One expression per line, optionally prefixed by `name :=`; blank
    /// lines and lines starting with `#` are skipped.
    pub fn parse_file(text: &str) -> Result<Self, GeneratorFileError> {
        let mut set = GeneratorSet::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, expr) = match line.split_once(":=") {
                Some((n, e)) => (Some(n.trim().to_string()), e.trim()),
                None => (None, line),
            };
            let value = parse(expr).map_err(|source| GeneratorFileError::Parse { line: idx + 1, source })?;
            let name = name.unwrap_or_else(|| value.to_string());
            if set.elements.iter().any(|g| g.name == name) {
                return Err(GeneratorFileError::Duplicate { line: idx + 1, name });
            }
            set.push(&name, value);
        }
        Ok(set)
    }

    pub fn named(&self) -> Vec<(String, TracePolynomial)> {
        self.elements.iter().map(|g| (g.name.clone(), g.value.clone())).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.elements.iter().map(|g| g.value.degree()).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}
