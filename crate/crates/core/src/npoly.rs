//! Univariate polynomials in the formal matrix-size symbol `n` with exact
//! rational coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::modp;

/// A polynomial `c_0 + c_1 n + c_2 n^2 + ...` over the rationals.
///
/// Coefficients are stored densely by exponent with no trailing zeros, so
/// the zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct NPoly {
    coeffs: Vec<BigRational>,
}

impl NPoly {
    pub fn zero() -> Self {
        NPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The symbol `n` itself.
    pub fn n() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `c * n^exp`.
    pub fn monomial(c: BigRational, exp: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); exp + 1];
        coeffs[exp] = c;
        NPoly { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = NPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree in `n`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Coefficient of `n^exp`.
    pub fn coeff(&self, exp: usize) -> BigRational {
        self.coeffs.get(exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Non-zero `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NPoly { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiply by `n^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        NPoly { coeffs }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Polynomial long division; panics on division by zero.
    pub fn div_rem(&self, divisor: &NPoly) -> (NPoly, NPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if sd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let c = &rem[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    rem[k + i] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        (NPoly::from_coeffs(quot), NPoly::from_coeffs(rem))
    }

    /// Exact quotient, or `None` if `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &NPoly) -> Option<NPoly> {
        if divisor.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &NPoly) -> NPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> NPoly {
        match self.leading_coeff() {
            None => Self::zero(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Scalar factor making the coefficients coprime integers with a
    /// positive leading coefficient: `self = content * primitive`.
    pub fn content(&self) -> BigRational {
        let Some(lead) = self.leading_coeff() else {
            return BigRational::one();
        };
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.coeffs.iter().filter(|c| !c.is_zero()) {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let g = BigRational::new(num, den);
        if lead.is_negative() {
            -g
        } else {
            g
        }
    }

    pub fn eval_rational(&self, n: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * n + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_complex(&self, n: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * n + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    /// Evaluation modulo the engine prime at `n = point`; `None` if a
    /// coefficient denominator vanishes modulo the prime.
    pub fn eval_mod(&self, point: u64) -> Option<u64> {
        let mut acc = 0u64;
        for c in self.coeffs.iter().rev() {
            acc = modp::add(modp::mul(acc, point), modp::from_rational(c)?);
        }
        Some(acc)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }
}

impl fmt::Debug for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NPoly({self})")
    }
}

pub(crate) fn fmt_rational_coeff(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("({}/{})", c.numer(), c.denom())
    }
}

/// Writes `c * n^e * rest` with sign handling; `first` controls whether a
/// leading `+` is suppressed. `rest` is an already formatted factor string.
pub(crate) fn write_signed_term(
    out: &mut String,
    c: &BigRational,
    exp: usize,
    rest: &str,
    first: bool,
) {
    let neg = c.is_negative();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let abs = c.abs();
    let mut factors: Vec<String> = Vec::new();
    if !abs.is_one() {
        factors.push(fmt_rational_coeff(&abs));
    }
    match exp {
        0 => {}
        1 => factors.push("n".into()),
        e => factors.push(format!("n^{e}")),
    }
    if !rest.is_empty() {
        factors.push(rest.to_string());
    }
    if factors.is_empty() {
        factors.push("1".into());
    }
    out.push_str(&factors.join("*"));
}

impl fmt::Display for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms().rev().enumerate() {
            write_signed_term(&mut out, c, e, "", i == 0);
        }
        f.write_str(&out)
    }
}

impl Add<&NPoly> for &NPoly {
    type Output = NPoly;
    fn add(self, rhs: &NPoly) -> NPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&NPoly> for &NPoly {
    type Output = NPoly;
    fn sub(self, rhs: &NPoly) -> NPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&NPoly> for NPoly {
    fn add_assign(&mut self, rhs: &NPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl SubAssign<&NPoly> for NPoly {
    fn sub_assign(&mut self, rhs: &NPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.trim();
    }
}

impl Mul<&NPoly> for &NPoly {
    type Output = NPoly;
    fn mul(self, rhs: &NPoly) -> NPoly {
        if self.is_zero() || rhs.is_zero() {
            return NPoly::zero();
        }
        if rhs.coeffs.len() == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        if self.coeffs.len() == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        NPoly::from_coeffs(coeffs)
    }
}

impl Neg for &NPoly {
    type Output = NPoly;
    fn neg(self) -> NPoly {
        NPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for NPoly {
    type Output = NPoly;
    fn neg(self) -> NPoly {
        -&self
    }
}

impl Add for NPoly {
    type Output = NPoly;
    fn add(self, rhs: NPoly) -> NPoly {
        &self + &rhs
    }
}

impl Sub for NPoly {
    type Output = NPoly;
    fn sub(self, rhs: NPoly) -> NPoly {
        &self - &rhs
    }
}

impl Mul for NPoly {
    type Output = NPoly;
    fn mul(self, rhs: NPoly) -> NPoly {
        &self * &rhs
    }
}

impl From<i64> for NPoly {
    fn from(c: i64) -> Self {
        NPoly::from_int(c)
    }
}

impl From<BigRational> for NPoly {
    fn from(c: BigRational) -> Self {
        NPoly::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom_n2() -> NPoly {
        // n(n-1)/2
        NPoly::from_coeffs(vec![
            BigRational::zero(),
            BigRational::new((-1).into(), 2.into()),
            BigRational::new(1.into(), 2.into()),
        ])
    }

    #[test]
    fn display_matches_printer_conventions() {
        assert_eq!(binom_n2().to_string(), "(1/2)*n^2 - (1/2)*n");
        assert_eq!(NPoly::n().to_string(), "n");
        assert_eq!(NPoly::from_int(-3).to_string(), "-3");
        assert_eq!(NPoly::zero().to_string(), "0");
    }

    #[test]
    fn division_and_gcd() {
        let n = NPoly::n();
        let one = NPoly::one();
        let nm1 = &n - &one;
        let p = &(&n * &nm1) * &NPoly::from_int(6);
        assert_eq!(p.exact_div(&nm1), Some(&n * &NPoly::from_int(6)));
        assert_eq!(p.exact_div(&(&n + &one)), None);
        let q = &nm1 * &(&n + &one);
        assert_eq!(p.gcd(&q), nm1);
        assert_eq!(p.content(), BigRational::from_integer(6.into()));
    }

    #[test]
    fn evaluation() {
        let p = binom_n2();
        assert_eq!(p.eval_f64(4.0), 6.0);
        assert_eq!(p.eval_rational(&BigRational::from_integer(3.into())), BigRational::from_integer(3.into()));
        assert_eq!(p.eval_mod(5), Some(10));
    }
}
