//! Recovering exact `Q(n)` solutions of square systems from modular images:
//! dense solving modulo many primes, Newton interpolation in `n`, rational
//! function reconstruction, Chinese remaindering and rational number
//! reconstruction.
//!
//! Everything here produces candidates; callers verify the exact identity.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::solve::FractionFreeSolution;
use crate::npoly::NPoly;

/// Largest number of primes combined before giving up.
const MAX_PRIMES: usize = 512;
/// Largest number of sample points in `n` per prime.
const MAX_POINTS: usize = 128;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let (mut x, mut e, mut base) = (1u64, d, a);
        while e > 0 {
            if e & 1 == 1 {
                x = mulmod(x, base);
            }
            base = mulmod(base, base);
            e >>= 1;
        }
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `k`-th prime below `2^62`, counting down.
fn prime(k: usize) -> u64 {
    static CACHE: Mutex<Vec<u64>> = Mutex::new(Vec::new());
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    let mut candidate = cache.last().map_or((1u64 << 62) + 1, |&p| p);
    while cache.len() <= k {
        candidate -= 2;
        if is_prime(candidate) {
            cache.push(candidate);
        }
    }
    cache[k]
}

/// Arithmetic modulo an odd prime below `2^62`. Values are plain residues;
/// `solve` works internally in Montgomery form.
#[derive(Clone, Copy, Debug)]
struct Fp {
    q: u64,
    /// `-q^{-1} mod 2^64`
    neg_inv: u64,
    /// `2^128 mod q`
    r2: u64,
}

impl Fp {
    fn new(q: u64) -> Self {
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        let r2 = ((r as u128 * r as u128) % q as u128) as u64;
        Fp { q, neg_inv: inv.wrapping_neg(), r2 }
    }

    fn redc(self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.q as u128) >> 64) as u64;
        if u >= self.q {
            u - self.q
        } else {
            u
        }
    }

    fn mont_mul(self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    fn to_mont(self, a: u64) -> u64 {
        self.mont_mul(a, self.r2)
    }

    fn from_mont(self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    fn mul(self, a: u64, b: u64) -> u64 {
        self.mont_mul(self.mont_mul(a, b), self.r2)
    }

    fn pow(self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn inv(self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, self.q - 2))
    }

    fn of_int(self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.q)).to_u64().expect("reduced residue")
    }

    fn of_rational(self, c: &BigRational) -> Option<u64> {
        Some(self.mul(self.of_int(c.numer()), self.inv(self.of_int(c.denom()))?))
    }

    fn of_npoly(self, p: &NPoly) -> Option<Poly> {
        p.coeffs().iter().map(|c| self.of_rational(c)).collect()
    }

    fn eval(self, p: &Poly, x: u64) -> u64 {
        p.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Solves `a x = b`; `None` if singular.
    fn solve(self, mut a: Vec<Vec<u64>>, mut b: Vec<u64>) -> Option<Vec<u64>> {
        let s = a.len();
        for row in a.iter_mut() {
            for x in row.iter_mut() {
                *x = self.to_mont(*x);
            }
        }
        for x in b.iter_mut() {
            *x = self.to_mont(*x);
        }
        for k in 0..s {
            let piv = (k..s).find(|&i| a[i][k] != 0)?;
            a.swap(k, piv);
            b.swap(k, piv);
            let inv = self.to_mont(self.inv(self.from_mont(a[k][k]))?);
            let (top, rest) = a.split_at_mut(k + 1);
            let pivot_row = &mut top[k];
            for x in pivot_row[k..].iter_mut() {
                *x = self.mont_mul(*x, inv);
            }
            b[k] = self.mont_mul(b[k], inv);
            for (off, row) in rest.iter_mut().enumerate() {
                let f = row[k];
                if f == 0 {
                    continue;
                }
                for j in k..s {
                    if pivot_row[j] != 0 {
                        row[j] = self.sub(row[j], self.mont_mul(f, pivot_row[j]));
                    }
                }
                b[k + 1 + off] = self.sub(b[k + 1 + off], self.mont_mul(f, b[k]));
            }
        }
        for k in (0..s).rev() {
            let mut acc = b[k];
            for j in k + 1..s {
                if a[k][j] != 0 {
                    acc = self.sub(acc, self.mont_mul(a[k][j], b[j]));
                }
            }
            b[k] = acc;
        }
        Some(b.into_iter().map(|x| self.from_mont(x)).collect())
    }
}

/// Dense polynomial modulo a prime, lowest degree first, no trailing zeros.
type Poly = Vec<u64>;

fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn deg(p: &Poly) -> isize {
    p.len() as isize - 1
}

fn sub_poly(f: Fp, a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    out[..a.len()].copy_from_slice(a);
    for (i, y) in b.iter().enumerate() {
        out[i] = f.sub(out[i], *y);
    }
    trim(out)
}

fn mul_poly(f: Fp, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(*x, *y));
        }
    }
    trim(out)
}

fn divrem_poly(f: Fp, a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = f.inv(b[db]).expect("non-zero leading coefficient");
    let mut q = vec![0; r.len() - db];
    for k in (0..q.len()).rev() {
        let c = f.mul(r[k + db], inv);
        q[k] = c;
        if c != 0 {
            for (j, y) in b.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(c, *y));
            }
        }
    }
    (trim(q), trim(r))
}

/// Newton interpolation through `(xs[i], ys[i])`.
fn interpolate(f: Fp, xs: &[u64], ys: &[u64]) -> Poly {
    let k = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..k {
        for i in (j..k).rev() {
            let num = f.sub(coef[i], coef[i - 1]);
            let den = f.sub(xs[i], xs[i - j]);
            coef[i] = f.mul(num, f.inv(den).expect("distinct points"));
        }
    }
    let mut p: Poly = Vec::new();
    for i in (0..k).rev() {
        let mut next = vec![0; p.len() + 1];
        for (d, c) in p.iter().enumerate() {
            next[d + 1] = f.add(next[d + 1], *c);
            next[d] = f.sub(next[d], f.mul(*c, xs[i]));
        }
        next[0] = f.add(next[0], coef[i]);
        p = trim(next);
    }
    p
}

/// `(num, den)` with `den` monic, `num ≡ den · r (mod m)`,
/// `deg num < k/2` and `deg den ≤ k/2` where `k = deg m`.
fn rational_function(f: Fp, r: &Poly, m: &Poly) -> Option<(Poly, Poly)> {
    let k = deg(m);
    let (mut r0, mut r1) = (m.clone(), r.clone());
    let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![1]);
    while deg(&r1) >= (k + 1) / 2 {
        let (q, rem) = divrem_poly(f, &r0, &r1);
        let t2 = sub_poly(f, &t0, &mul_poly(f, &q, &t1));
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_empty() || deg(&t1) > k / 2 {
        return None;
    }
    let inv = f.inv(*t1.last()?)?;
    let scale = |p: Poly| -> Poly { p.into_iter().map(|c| f.mul(c, inv)).collect() };
    Some((scale(r1), scale(t1)))
}

/// The rational `a/b` with `|a|, b ≤ sqrt(m/2)` congruent to `x` modulo `m`.
pub fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let (q, r2) = r0.div_rem(&r1);
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// The system reduced modulo one prime, with its samples so far.
struct PrimeSamples {
    field: Fp,
    a: Vec<(usize, usize, Poly)>,
    b: Vec<Poly>,
    s: usize,
    xs: Vec<u64>,
    ys: Vec<Vec<u64>>,
    next: u64,
    tries: usize,
}

impl PrimeSamples {
    fn new(q: u64, a: &[Vec<NPoly>], b: &[NPoly], seed: u64) -> Option<Self> {
        let field = Fp::new(q);
        let mut entries = Vec::new();
        for (i, row) in a.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    entries.push((i, j, field.of_npoly(p)?));
                }
            }
        }
        let b = b.iter().map(|p| field.of_npoly(p)).collect::<Option<Vec<_>>>()?;
        Some(PrimeSamples { field, a: entries, s: b.len(), b, xs: Vec::new(), ys: Vec::new(), next: seed % q, tries: 0 })
    }

    /// Solution at a fresh point, or `None` after too many singular points.
    fn sample(&mut self) -> Option<(u64, Vec<u64>)> {
        let f = self.field;
        loop {
            if self.tries > 2 * self.xs.len() + 16 {
                return None;
            }
            self.tries += 1;
            let x = self.next;
            self.next = f.add(self.next, 0x9e37_79b9);
            let mut am = vec![vec![0u64; self.s]; self.s];
            for (i, j, p) in &self.a {
                am[*i][*j] = f.eval(p, x);
            }
            let bm: Vec<u64> = self.b.iter().map(|p| f.eval(p, x)).collect();
            if let Some(y) = f.solve(am, bm) {
                return Some((x, y));
            }
        }
    }

    fn fill(&mut self, want: usize) -> bool {
        while self.xs.len() < want {
            let Some((x, y)) = self.sample() else { return false };
            self.xs.push(x);
            self.ys.push(y);
        }
        true
    }

    /// Per coordinate, the reduced rational function through the samples.
    fn functions(&self) -> Option<Vec<(Poly, Poly)>> {
        let f = self.field;
        let mut m: Poly = vec![1];
        for &x in &self.xs {
            m = mul_poly(f, &m, &vec![f.sub(0, x), 1]);
        }
        (0..self.s)
            .map(|i| {
                let vals: Vec<u64> = self.ys.iter().map(|v| v[i]).collect();
                let r = interpolate(f, &self.xs, &vals);
                if self.xs.len() == 1 {
                    Some((r, vec![1]))
                } else {
                    rational_function(f, &r, &m)
                }
            })
            .collect()
    }
}

/// Chinese remaindering of all coefficient images, one prime at a time.
struct Crt {
    modulus: BigInt,
    /// Per coordinate, numerator and denominator coefficient residues.
    values: Vec<(Vec<BigInt>, Vec<BigInt>)>,
}

impl Crt {
    fn new(q: u64, first: &[(Poly, Poly)]) -> Self {
        let lift = |p: &Poly| p.iter().map(|&c| BigInt::from(c)).collect();
        Crt { modulus: BigInt::from(q), values: first.iter().map(|(n, d)| (lift(n), lift(d))).collect() }
    }

    fn shape_matches(&self, images: &[(Poly, Poly)]) -> bool {
        self.values.iter().zip(images).all(|((n, d), (ni, di))| n.len() == ni.len() && d.len() == di.len())
    }

    fn absorb(&mut self, q: u64, images: &[(Poly, Poly)]) {
        let f = Fp::new(q);
        let qb = BigInt::from(q);
        let m_inv = f.inv(f.of_int(&self.modulus)).expect("distinct primes");
        let step = |x: &mut BigInt, r: u64, modulus: &BigInt| {
            let diff = f.sub(r, f.of_int(x));
            *x += modulus * f.mul(diff, m_inv);
        };
        for ((n, d), (ni, di)) in self.values.iter_mut().zip(images) {
            for (x, &r) in n.iter_mut().zip(ni) {
                step(x, r, &self.modulus);
            }
            for (x, &r) in d.iter_mut().zip(di) {
                step(x, r, &self.modulus);
            }
        }
        self.modulus *= qb;
    }

    fn lift(&self) -> Option<Vec<(NPoly, NPoly)>> {
        let rec = |v: &Vec<BigInt>| -> Option<NPoly> {
            Some(NPoly::from_coeffs(v.iter().map(|x| rational_reconstruct(x, &self.modulus)).collect::<Option<Vec<_>>>()?))
        };
        self.values.iter().map(|(n, d)| Some((rec(n)?, rec(d)?))).collect()
    }
}

fn assemble(parts: Vec<(NPoly, NPoly)>) -> Option<FractionFreeSolution> {
    let mut common = NPoly::one();
    for (_, den) in &parts {
        let g = common.gcd(den);
        common = (&common * den).exact_div(&g)?;
    }
    let numerators =
        parts.into_iter().map(|(num, den)| Some(&num * &common.exact_div(&den)?)).collect::<Option<Vec<_>>>()?;
    Some(FractionFreeSolution { numerators, denominator: common })
}

/// Number of sample points after which the reconstruction through the
/// first `k` points predicts one more sample exactly.
fn point_count(ps: &mut PrimeSamples) -> Option<usize> {
    let mut k = 1;
    while k <= MAX_POINTS {
        if !ps.fill(k) {
            return None;
        }
        if let Some(fs) = ps.functions() {
            let (x, y) = ps.sample()?;
            let f = ps.field;
            let predicts = fs.iter().zip(&y).all(|((num, den), &v)| {
                let d = f.eval(den, x);
                d != 0 && f.mul(f.eval(num, x), f.inv(d).unwrap_or(0)) == v
            });
            if predicts {
                return Some(k);
            }
        }
        k *= 2;
    }
    None
}

/// Searches for the exact solution of the square system `a y = b` over
/// `Q(n)`, accepting the first candidate for which `verify` holds.
pub fn lift_solution(
    a: &[Vec<NPoly>],
    b: &[NPoly],
    seed: u64,
    verify: impl Fn(&FractionFreeSolution) -> bool,
) -> Option<FractionFreeSolution> {
    let mut k = 0;
    let mut first = loop {
        if k >= 8 {
            return None;
        }
        if let Some(ps) = PrimeSamples::new(prime(k), a, b, seed) {
            break ps;
        }
        k += 1;
    };
    let points = point_count(&mut first)?;
    first.xs.truncate(points);
    first.ys.truncate(points);
    let mut crt = Crt::new(first.field.q, &first.functions()?);
    let mut used = 1;
    let mut next_check = 1;
    k += 1;
    while used <= MAX_PRIMES && k < 2 * MAX_PRIMES {
        if used >= next_check {
            next_check *= 2;
            if let Some(sol) = crt.lift().and_then(assemble) {
                if verify(&sol) {
                    return Some(sol);
                }
            }
        }
        let q = prime(k);
        k += 1;
        let Some(mut ps) = PrimeSamples::new(q, a, b, seed) else { continue };
        if !ps.fill(points) {
            continue;
        }
        let Some(fs) = ps.functions() else { continue };
        if !crt.shape_matches(&fs) {
            continue;
        }
        crt.absorb(q, &fs);
        used += 1;
    }
    None
}
