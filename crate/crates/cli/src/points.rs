//! Complex lists, point files and matrix output.

use cmtrace::numerics::{wilson_point, CMatrix, MatrixPair};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::UsageError;

pub fn parse_complex(s: &str) -> Result<Complex64, UsageError> {
    let t = s.trim();
    t.parse::<Complex64>().map_err(|_| UsageError(format!("bad complex number `{t}`")))
}

/// Comma- or whitespace-separated complex numbers.
pub fn parse_list(s: &str) -> Result<Vec<Complex64>, UsageError> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(parse_complex).collect()
}

/// Point-file entries: separated by whitespace or `;`, each either a complex
/// literal or an `re,im` pair.
pub fn parse_entries(s: &str) -> Result<Vec<Complex64>, UsageError> {
    s.split(|c: char| c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| match t.split_once(',') {
            Some((re, im)) => {
                let num = |x: &str| x.trim().parse::<f64>().map_err(|_| UsageError(format!("bad entry `{t}`")));
                Ok(Complex64::new(num(re)?, num(im)?))
            }
            None => parse_complex(t),
        })
        .collect()
}

fn square(entries: Vec<Complex64>, what: &str) -> Result<CMatrix, UsageError> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != entries.len() {
        return Err(UsageError(format!("`{what}` needs n² entries, got {}", entries.len())));
    }
    Ok(CMatrix::from_row_slice(n, n, &entries))
}

/// Point file: either `alphas`/`betas` lines (a Wilson point) or `x`/`y`
/// lines with row-major entries, and optionally `n`. `#` starts a comment
/// line.
pub fn parse_point(text: &str) -> Result<MatrixPair, UsageError> {
    let mut fields = std::collections::BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("point file line {}: expected `key = value`", idx + 1)))?;
        fields.insert(k.trim().to_lowercase(), v.trim().to_string());
    }
    let get = |k: &str| fields.get(k).map(|s| parse_entries(s)).transpose();
    let point = match (get("alphas")?, get("betas")?, get("x")?, get("y")?) {
        (Some(a), Some(b), None, None) => wilson_point(&a, &b)?,
        (None, None, Some(x), Some(y)) => MatrixPair::new(square(x, "x")?, square(y, "y")?)?,
        _ => return Err(UsageError("point file needs `alphas` and `betas`, or `x` and `y`".into())),
    };
    if let Some(n) = fields.get("n") {
        let n: usize = n.parse().map_err(|_| UsageError(format!("bad size `{n}`")))?;
        if n != point.n() {
            return Err(UsageError(format!("point file declares n = {n} but has size {}", point.n())));
        }
    }
    Ok(point)
}

pub fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Value> =
        (0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())).collect();
    Value::Array(rows)
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

pub fn matrix_text(m: &CMatrix) -> String {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| fmt_complex(m[(i, j)])).collect::<Vec<_>>().join("  "))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_accept_commas_and_spaces() {
        let v = parse_list("1, 2+1i -0.5i").unwrap();
        assert_eq!(v, vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0), Complex64::new(0.0, -0.5)]);
        assert!(parse_list("1,zz").is_err());
    }

    #[test]
    fn point_files() {
        let p = parse_point("alphas = 0 1\nbetas = 0 1i\n").unwrap();
        assert!(p.rank_one);
        let q = parse_point("# raw\nn = 2\nx = 1,0 0,0 0,0 2,0\ny = 0 1 1-0.5i 0\n").unwrap();
        assert_eq!(q.n(), 2);
        assert_eq!(q.y[(1, 0)], Complex64::new(1.0, -0.5));
        assert!(parse_point("n = 3\nalphas = 0 1\nbetas = 0 0").is_err());
        assert!(parse_point("x = 1 2 3\ny = 1 2 3").is_err());
        assert!(parse_point("alphas = 1").is_err());
    }
}
