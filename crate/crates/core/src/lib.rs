//! Exact Poisson calculus of invariant trace polynomials on pairs of
//! matrices `(X, Y)`, the rank-one reduction valid where
//! `rank([X, Y] + id) = 1`, a degree-truncated Lie-closure engine with
//! replayable certificates, and a floating-point matrix oracle.

pub mod bracket;
pub mod canonical;
pub mod closure;
pub mod expr;
pub mod lincomb;
pub mod modp;
pub mod npoly;
pub mod numerics;
pub mod reduction;
pub mod trace;
pub mod verify;
pub mod word;

pub use bracket::{bracket, bracket_products, bracket_words};
pub use expr::{parse, ParseError};
pub use lincomb::LinComb;
pub use npoly::NPoly;
pub use reduction::{is_normal, reduce, reduce_b, ReducedForm, Reducer};
pub use trace::{TracePolynomial, TraceProduct};
pub use word::{canonicalize, Letter, TraceWord, Word};
