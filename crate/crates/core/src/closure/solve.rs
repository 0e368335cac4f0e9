//! Fraction-free solving of square systems over `Q[n]`.

use crate::npoly::NPoly;

/// Solution `A x = b` written as `x = num / den` with polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionFreeSolution {
    pub numerators: Vec<NPoly>,
    pub denominator: NPoly,
}

/// Bareiss elimination on the augmented matrix `[A | b]` followed by
/// fraction-free back substitution. Returns `None` if `A` is singular.
pub fn bareiss_solve(a: &[Vec<NPoly>], b: &[NPoly]) -> Option<FractionFreeSolution> {
    let s = a.len();
    assert_eq!(b.len(), s);
    let mut m: Vec<Vec<NPoly>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), s);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut prev = NPoly::one();
    for k in 0..s {
        let pivot_row = (k..s).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, pivot_row);
        for i in k + 1..s {
            for j in k + 1..=s {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.exact_div(&prev).expect("Bareiss step divides exactly");
            }
            m[i][k] = NPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = prev;
    let mut x = vec![NPoly::zero(); s];
    for i in (0..s).rev() {
        let mut acc = &det * &m[i][s];
        for j in i + 1..s {
            acc -= &(&m[i][j] * &x[j]);
        }
        x[i] = acc.exact_div(&m[i][i]).expect("back substitution divides exactly");
    }
    Some(normalize(x, det))
}

/// Cancels the common factor of numerators and denominator; a constant
/// denominator is divided out entirely.
fn normalize(mut num: Vec<NPoly>, mut den: NPoly) -> FractionFreeSolution {
    let g = num.iter().fold(den.clone(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        num = num.iter().map(|x| x.exact_div(&g).expect("gcd divides")).collect();
        den = den.exact_div(&g).expect("gcd divides");
    }
    if let Some(c) = den.as_constant() {
        let inv = num_traits::Inv::inv(c);
        num = num.iter().map(|x| x.scale(&inv)).collect();
        den = NPoly::one();
    } else if let Some(lc) = den.leading_coeff().cloned() {
        let inv = num_traits::Inv::inv(lc);
        num = num.iter().map(|x| x.scale(&inv)).collect();
        den = den.scale(&inv);
    }
    FractionFreeSolution { numerators: num, denominator: den }
}
