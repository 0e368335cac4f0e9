//! Text syntax for trace polynomials.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT ['/' INT] | 'n' | 'tr' '(' word ')' | a | b | c | d | e | '(' expr ')'
//! word   := wfac ('*' wfac)*
//! wfac   := (LETTERS | '(' word ')') ('^' INT)?     LETTERS ∈ {X, Y}+
//! ```
//!
//! [`parse_with_commutator`] also admits the letter `B` inside words.
//! The aliases are `a = tr(X)`, `b = tr(Y)`, `c = tr(X^2)/2`, `d = tr(Y^2)/2`
//! and `e = tr(X*Y)`. The tokenizer and operator grammar are shared with the
//! commutative phase-space polynomials, which supply their own identifiers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::npoly::NPoly;
use crate::trace::TracePolynomial;
use crate::word::{Letter, Word, MAX_WORD_LEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at offset {pos}")]
    UnknownSymbol { pos: usize, name: String },
}

fn syntax<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax { pos, msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Num(BigInt),
    Ident(String),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let pos = i;
        let single = match ch {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            b'/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, pos });
            i += 1;
        } else if ch.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[pos..i].parse().expect("digits parse");
            out.push(Token { tok: Tok::Num(n), pos });
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[pos..i].to_string()), pos });
        } else {
            let c = src[pos..].chars().next().unwrap_or('?');
            return syntax(pos, format!("unexpected character `{c}`"));
        }
    }
    out.push(Token { tok: Tok::End, pos: src.len() });
    Ok(out)
}

/// Token stream handed to identifier resolvers.
pub struct Cursor {
    tokens: Vec<Token>,
    idx: usize,
}

impl Cursor {
    pub fn peek(&self) -> &Tok {
        &self.tokens[self.idx].tok
    }

    pub fn pos(&self) -> usize {
        self.tokens[self.idx].pos
    }

    pub fn next(&mut self) -> Tok {
        let t = self.tokens[self.idx].tok.clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    pub fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            syntax(self.pos(), format!("expected {what}"))
        }
    }

    /// A non-negative integer exponent after `^`.
    pub fn exponent(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.next() {
            Tok::Num(n) => n.to_u32().map_or_else(|| syntax(pos, "exponent too large"), Ok),
            _ => syntax(pos, "expected integer exponent"),
        }
    }
}

/// Ring operations needed by the generic expression grammar.
pub trait ExprRing: Sized + Clone {
    fn from_rational(c: BigRational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_rational(BigRational::from_integer(1.into()));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Parses `src` with the shared grammar; identifiers are delegated to
/// `resolve`, which receives the name, its offset and the cursor positioned
/// just after the identifier.
pub fn parse_with<R, F>(src: &str, resolve: &F) -> Result<R, ParseError>
where
    R: ExprRing,
    F: Fn(&str, usize, &mut Cursor) -> Result<R, ParseError>,
{
    let mut cur = Cursor { tokens: tokenize(src)?, idx: 0 };
    if *cur.peek() == Tok::End {
        return syntax(0, "empty expression");
    }
    let v = parse_expr(&mut cur, resolve)?;
    if *cur.peek() != Tok::End {
        return syntax(cur.pos(), "unexpected trailing input");
    }
    Ok(v)
}

fn parse_expr<R: ExprRing, F>(cur: &mut Cursor, resolve: &F) -> Result<R, ParseError>
where
    F: Fn(&str, usize, &mut Cursor) -> Result<R, ParseError>,
{
    let mut acc = match cur.peek() {
        Tok::Plus => {
            cur.next();
            parse_term(cur, resolve)?
        }
        _ => parse_term(cur, resolve)?,
    };
    loop {
        match cur.peek() {
            Tok::Plus => {
                cur.next();
                acc = acc.add(&parse_term(cur, resolve)?);
            }
            Tok::Minus => {
                cur.next();
                acc = acc.sub(&parse_term(cur, resolve)?);
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term<R: ExprRing, F>(cur: &mut Cursor, resolve: &F) -> Result<R, ParseError>
where
    F: Fn(&str, usize, &mut Cursor) -> Result<R, ParseError>,
{
    let mut acc = parse_unary(cur, resolve)?;
    while *cur.peek() == Tok::Star {
        cur.next();
        acc = acc.mul(&parse_unary(cur, resolve)?);
    }
    Ok(acc)
}

fn parse_unary<R: ExprRing, F>(cur: &mut Cursor, resolve: &F) -> Result<R, ParseError>
where
    F: Fn(&str, usize, &mut Cursor) -> Result<R, ParseError>,
{
    if *cur.peek() == Tok::Minus {
        cur.next();
        return Ok(parse_unary(cur, resolve)?.neg());
    }
    let base = parse_atom(cur, resolve)?;
    if *cur.peek() == Tok::Caret {
        cur.next();
        let e = cur.exponent()?;
        return Ok(base.pow(e));
    }
    Ok(base)
}

fn parse_atom<R: ExprRing, F>(cur: &mut Cursor, resolve: &F) -> Result<R, ParseError>
where
    F: Fn(&str, usize, &mut Cursor) -> Result<R, ParseError>,
{
    let pos = cur.pos();
    match cur.next() {
        Tok::Num(num) => {
            if *cur.peek() == Tok::Slash {
                cur.next();
                let dpos = cur.pos();
                let Tok::Num(den) = cur.next() else {
                    return syntax(dpos, "expected denominator");
                };
                if den.is_zero() {
                    return syntax(dpos, "zero denominator");
                }
                Ok(R::from_rational(BigRational::new(num, den)))
            } else {
                Ok(R::from_rational(BigRational::from_integer(num)))
            }
        }
        Tok::Ident(name) => resolve(&name, pos, cur),
        Tok::LParen => {
            let v = parse_expr(cur, resolve)?;
            cur.expect(Tok::RParen, "`)`")?;
            Ok(v)
        }
        Tok::End => syntax(pos, "unexpected end of input"),
        other => syntax(pos, format!("unexpected token {other:?}")),
    }
}

impl ExprRing for TracePolynomial {
    fn from_rational(c: BigRational) -> Self {
        TracePolynomial::constant(NPoly::constant(c))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        TracePolynomial::mul(self, other)
    }
    fn neg(&self) -> Self {
        -self
    }
}

fn parse_word(cur: &mut Cursor) -> Result<Vec<Letter>, ParseError> {
    Ok(parse_symbols(cur, false)?.into_iter().flatten().collect())
}

/// Word over `X`, `Y` and, if `allow_b`, the commutator slot `B` (as `None`).
fn parse_symbols(cur: &mut Cursor, allow_b: bool) -> Result<Vec<Option<Letter>>, ParseError> {
    let mut letters = parse_word_factor(cur, allow_b)?;
    while *cur.peek() == Tok::Star {
        cur.next();
        letters.extend(parse_word_factor(cur, allow_b)?);
    }
    Ok(letters)
}

fn parse_word_factor(cur: &mut Cursor, allow_b: bool) -> Result<Vec<Option<Letter>>, ParseError> {
    let pos = cur.pos();
    let base: Vec<Option<Letter>> = match cur.next() {
        Tok::Ident(s) => s
            .chars()
            .map(|ch| match ch {
                'X' => Ok(Some(Letter::X)),
                'Y' => Ok(Some(Letter::Y)),
                'B' if allow_b => Ok(None),
                _ => Err(ParseError::UnknownSymbol { pos, name: s.clone() }),
            })
            .collect::<Result<_, _>>()?,
        Tok::LParen => {
            let w = parse_symbols(cur, allow_b)?;
            cur.expect(Tok::RParen, "`)`")?;
            w
        }
        _ => return syntax(pos, if allow_b { "expected X, Y or B" } else { "expected X or Y" }),
    };
    let mut out = base.clone();
    if *cur.peek() == Tok::Caret {
        cur.next();
        let epos = cur.pos();
        let e = cur.exponent()? as usize;
        if base.len().saturating_mul(e) > MAX_WORD_LEN {
            return syntax(epos, format!("word longer than {MAX_WORD_LEN} letters"));
        }
        out = base.iter().copied().cycle().take(base.len() * e).collect();
    }
    if out.len() > MAX_WORD_LEN {
        return syntax(pos, format!("word longer than {MAX_WORD_LEN} letters"));
    }
    Ok(out)
}

fn half(p: TracePolynomial) -> TracePolynomial {
    p.scale(&NPoly::from_ratio(1, 2))
}

/// The aliases `a..e` for the quadratic generators.
pub fn alias(name: &str) -> Option<TracePolynomial> {
    Some(match name {
        "a" => TracePolynomial::trace_sorted(1, 0),
        "b" => TracePolynomial::trace_sorted(0, 1),
        "c" => half(TracePolynomial::trace_sorted(2, 0)),
        "d" => half(TracePolynomial::trace_sorted(0, 2)),
        "e" => TracePolynomial::trace_sorted(1, 1),
        _ => return None,
    })
}

fn resolve_trace(name: &str, pos: usize, cur: &mut Cursor) -> Result<TracePolynomial, ParseError> {
    match name {
        "n" => Ok(TracePolynomial::constant(NPoly::n())),
        "tr" => {
            cur.expect(Tok::LParen, "`(` after tr")?;
            let letters = parse_word(cur)?;
            cur.expect(Tok::RParen, "`)`")?;
            Ok(TracePolynomial::trace_of(Word::from_letters(&letters)))
        }
        _ => alias(name).ok_or_else(|| ParseError::UnknownSymbol { pos, name: name.to_string() }),
    }
}

/// Parses a trace polynomial.
pub fn parse(src: &str) -> Result<TracePolynomial, ParseError> {
    parse_with(src, &resolve_trace)
}

/// Parses a trace polynomial whose trace words may also contain `B`; every
/// `tr(...)` is handed to `trace` as a symbol list with `None` for `B`.
pub fn parse_with_commutator<F>(src: &str, trace: &F) -> Result<TracePolynomial, ParseError>
where
    F: Fn(&[Option<Letter>]) -> TracePolynomial,
{
    let resolve = |name: &str, pos: usize, cur: &mut Cursor| -> Result<TracePolynomial, ParseError> {
        if name == "tr" {
            cur.expect(Tok::LParen, "`(` after tr")?;
            let symbols = parse_symbols(cur, true)?;
            if symbols.len() + symbols.iter().filter(|s| s.is_none()).count() > MAX_WORD_LEN {
                return syntax(pos, format!("word longer than {MAX_WORD_LEN} letters once B is expanded"));
            }
            cur.expect(Tok::RParen, "`)`")?;
            Ok(trace(&symbols))
        } else {
            resolve_trace(name, pos, cur)
        }
    };
    parse_with(src, &resolve)
}

/// Parses an expression that must not contain traces (a polynomial in `n`).
pub fn parse_npoly(src: &str) -> Result<NPoly, ParseError> {
    let p = parse(src)?;
    if p.keys().any(|k| !k.is_one()) {
        return syntax(0, "expected a polynomial in n without traces");
    }
    Ok(p.constant_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_equality_cancels() {
        assert!(parse("tr(X*Y) - tr(Y*X)").unwrap().is_zero());
    }

    #[test]
    fn alias_c_is_half_trace_of_square() {
        assert_eq!(parse("(1/2)*tr(X^2)").unwrap(), parse("c").unwrap());
    }

    #[test]
    fn n_coefficient() {
        let p = parse("n*tr(X)*tr(Y)").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.iter().next().unwrap().1, &NPoly::n());
    }

    #[test]
    fn word_syntax_variants() {
        let a = parse("tr(X^2*Y^2)").unwrap();
        assert_eq!(parse("tr(XXYY)").unwrap(), a);
        assert_eq!(parse("tr(Y*(X)^2*Y)").unwrap(), a);
        assert_eq!(parse("tr((X*Y)^2)").unwrap(), parse("tr(X*Y*X*Y)").unwrap());
        assert_eq!(parse("tr(X)^2").unwrap(), parse("tr(X)*tr(X)").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("tr(X) + q").unwrap_err(),
            ParseError::UnknownSymbol { pos: 8, name: "q".into() }
        );
        assert!(matches!(parse("tr(X) +"), Err(ParseError::Syntax { pos: 7, .. })));
        assert!(matches!(parse("tr(Z)"), Err(ParseError::UnknownSymbol { pos: 3, .. })));
        assert!(matches!(parse("1/0"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse(""), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn printer_round_trip() {
        for s in ["3*tr(X^2)", "tr(X^2*Y^2) + (1/2)*n^2 - (1/2)*n", "-tr(X)^2*tr(Y) + 6*n", "0"] {
            let p = parse(s).unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(parse(&p.to_string()).unwrap(), p);
        }
    }
}
