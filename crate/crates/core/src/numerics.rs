//! Floating-point oracle on concrete matrix pairs.
//!
//! Points of the rank-one locus come from Wilson coordinates: `X = diag(α)`
//! and `Y_jj = β_j`, `Y_jk = 1/(α_j - α_k)`, which makes every entry of
//! `[X, Y] + id` equal to one.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::trace::{TracePolynomial, TraceProduct};
use crate::word::{Letter, TraceWord, Word};

pub type CMatrix = DMatrix<Complex64>;

/// Default minimum pairwise distance between Wilson eigenvalues.
pub const DEFAULT_SEPARATION: f64 = 0.5;
/// Radius of the discs α and β are sampled from.
pub const SAMPLE_RADIUS: f64 = 3.0;
/// σ₂/σ₁ threshold for certifying the rank-one condition.
pub const RANK_ONE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("eigenvalues {j} and {k} are closer than the separation floor {floor} (distance {dist:.3e})")]
    EigenvalueCollision { j: usize, k: usize, dist: f64, floor: f64 },
    #[error("alpha and beta lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty coordinate list")]
    Empty,
    #[error("matrix sizes do not match")]
    DimensionMismatch,
    #[error("finite differencing is unstable: estimates at h and h/2 differ by {spread:.3e}")]
    StepSize { spread: f64 },
}

/// A point `(X, Y)` of pairs of complex `n × n` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPair {
    pub x: CMatrix,
    pub y: CMatrix,
    /// Set when constructed on the rank-one locus and checked.
    pub rank_one: bool,
}

/// A tangent vector `(U, V)` at a matrix pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPair {
    pub u: CMatrix,
    pub v: CMatrix,
}

impl MatrixPair {
    pub fn new(x: CMatrix, y: CMatrix) -> Result<Self, NumericsError> {
        if !x.is_square() || x.shape() != y.shape() || x.nrows() == 0 {
            return Err(NumericsError::DimensionMismatch);
        }
        Ok(MatrixPair { x, y, rank_one: false })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// `[X, Y]`.
    pub fn commutator(&self) -> CMatrix {
        &self.x * &self.y - &self.y * &self.x
    }

    /// `σ₂/σ₁` of `[X, Y] + id` (zero for `n = 1`).
    pub fn rank_one_ratio(&self) -> f64 {
        let a = self.commutator() + CMatrix::identity(self.n(), self.n());
        let mut sv: Vec<f64> = a.svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|p, q| q.total_cmp(p));
        match sv.as_slice() {
            [s1, s2, ..] if *s1 > 0.0 => s2 / s1,
            _ => 0.0,
        }
    }

    pub fn certify(&mut self, tol: f64) -> bool {
        self.rank_one = self.rank_one_ratio() < tol;
        self.rank_one
    }

    pub fn displace(&self, t: &TangentPair, h: Complex64) -> MatrixPair {
        MatrixPair { x: &self.x + &t.u * h, y: &self.y + &t.v * h, rank_one: false }
    }

    fn matrix(&self, l: Letter) -> &CMatrix {
        match l {
            Letter::X => &self.x,
            Letter::Y => &self.y,
        }
    }

    pub fn word_matrix(&self, w: &Word) -> CMatrix {
        w.letters().fold(CMatrix::identity(self.n(), self.n()), |acc, l| acc * self.matrix(l))
    }

    pub fn trace_word(&self, w: &TraceWord) -> Complex64 {
        self.word_matrix(&w.word()).trace()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.x.iter().chain(self.y.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl TangentPair {
    pub fn zero(n: usize) -> Self {
        TangentPair { u: CMatrix::zeros(n, n), v: CMatrix::zeros(n, n) }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        TangentPair { u: random_matrix(n, rng), v: random_matrix(n, rng) }
    }
}

pub fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Wilson point with the default separation floor.
pub fn wilson_point(alphas: &[Complex64], betas: &[Complex64]) -> Result<MatrixPair, NumericsError> {
    wilson_point_with_floor(alphas, betas, DEFAULT_SEPARATION)
}

pub fn wilson_point_with_floor(
    alphas: &[Complex64],
    betas: &[Complex64],
    floor: f64,
) -> Result<MatrixPair, NumericsError> {
    if alphas.len() != betas.len() {
        return Err(NumericsError::LengthMismatch(alphas.len(), betas.len()));
    }
    let n = alphas.len();
    if n == 0 {
        return Err(NumericsError::Empty);
    }
    for j in 0..n {
        for k in j + 1..n {
            let dist = (alphas[j] - alphas[k]).norm();
            if dist < floor {
                return Err(NumericsError::EigenvalueCollision { j, k, dist, floor });
            }
        }
    }
    let x = CMatrix::from_fn(n, n, |j, k| if j == k { alphas[j] } else { Complex64::new(0.0, 0.0) });
    let y = CMatrix::from_fn(n, n, |j, k| if j == k { betas[j] } else { (alphas[j] - alphas[k]).inv() });
    let mut p = MatrixPair { x, y, rank_one: false };
    p.certify(RANK_ONE_TOL);
    Ok(p)
}

fn random_in_disc<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if z.norm() <= radius {
            return z;
        }
    }
}

/// Random Wilson coordinates: α in the disc of radius 3 with pairwise
/// separation at least 0.5 (by rejection), β in the disc of radius 3.
pub fn random_wilson_coords<R: Rng>(n: usize, rng: &mut R) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut alphas: Vec<Complex64> = Vec::with_capacity(n);
    while alphas.len() < n {
        let z = random_in_disc(rng, SAMPLE_RADIUS);
        if alphas.iter().all(|a| (a - z).norm() >= DEFAULT_SEPARATION) {
            alphas.push(z);
        }
    }
    let betas = (0..n).map(|_| random_in_disc(rng, SAMPLE_RADIUS)).collect();
    (alphas, betas)
}

pub fn random_wilson_point<R: Rng>(n: usize, rng: &mut R) -> MatrixPair {
    let (a, b) = random_wilson_coords(n, rng);
    wilson_point(&a, &b).expect("sampled coordinates respect the separation floor")
}

/// Per-point cache of word traces.
pub struct Evaluator<'a> {
    point: &'a MatrixPair,
    traces: HashMap<TraceWord, Complex64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(point: &'a MatrixPair) -> Self {
        Evaluator { point, traces: HashMap::new() }
    }

    pub fn trace(&mut self, w: &TraceWord) -> Complex64 {
        if let Some(v) = self.traces.get(w) {
            return *v;
        }
        let v = self.point.trace_word(w);
        self.traces.insert(*w, v);
        v
    }

    pub fn product(&mut self, p: &TraceProduct) -> Complex64 {
        p.factors().iter().fold(Complex64::new(1.0, 0.0), |acc, w| acc * self.trace(w))
    }

    pub fn eval(&mut self, f: &TracePolynomial) -> Complex64 {
        let n = Complex64::new(self.point.n() as f64, 0.0);
        f.iter().map(|(p, c)| c.eval_complex(n) * self.product(p)).sum()
    }

    /// `Σ |c(n)| · |product|`: the size of the terms being summed, a scale
    /// for relative comparisons of values that cancel.
    pub fn magnitude(&mut self, f: &TracePolynomial) -> f64 {
        let n = Complex64::new(self.point.n() as f64, 0.0);
        f.iter().map(|(p, c)| c.eval_complex(n).norm() * self.product(p).norm()).sum()
    }
}

/// Value of `f` at `p`, with the formal `n` specialized to the matrix size.
pub fn evaluate(f: &TracePolynomial, p: &MatrixPair) -> Complex64 {
    Evaluator::new(p).eval(f)
}

/// `|a - b| / max(1, |a|, |b|, scale)`.
pub fn relative_error(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm()).max(scale)
}

/// Partial derivative matrices `G_X[j][k] = ∂f/∂X_jk`, `G_Y[j][k] = ∂f/∂Y_jk`.
#[derive(Clone, Debug)]
pub struct Gradient {
    pub dx: CMatrix,
    pub dy: CMatrix,
}

/// `(∂tr(w)/∂X, ∂tr(w)/∂Y)`: each occurrence of a letter contributes the
/// transpose of the product of the remaining letters read cyclically after it.
fn word_gradient(p: &MatrixPair, w: &TraceWord) -> Gradient {
    let n = p.n();
    let word = w.word();
    let mut dx = CMatrix::zeros(n, n);
    let mut dy = CMatrix::zeros(n, n);
    for pos in 0..word.len() {
        let rest = word.rotate(pos + 1).drop_last();
        let m = p.word_matrix(&rest).transpose();
        match word.letter(pos) {
            Letter::X => dx += m,
            Letter::Y => dy += m,
        }
    }
    Gradient { dx, dy }
}

pub fn gradient(f: &TracePolynomial, p: &MatrixPair) -> Gradient {
    let n = p.n();
    let nn = Complex64::new(n as f64, 0.0);
    let mut ev = Evaluator::new(p);
    let mut grads: HashMap<TraceWord, Gradient> = HashMap::new();
    let mut out = Gradient { dx: CMatrix::zeros(n, n), dy: CMatrix::zeros(n, n) };
    for (prod, c) in f.iter() {
        let coef = c.eval_complex(nn);
        let factors = prod.factors();
        for (i, w) in factors.iter().enumerate() {
            let others: Complex64 = factors
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, v)| acc * ev.trace(v));
            let g = grads.entry(*w).or_insert_with(|| word_gradient(p, w));
            out.dx += &g.dx * (coef * others);
            out.dy += &g.dy * (coef * others);
        }
    }
    out
}

/// Hamiltonian vector field of `h`: `U_kj = ∂H/∂Y_jk`, `V_kj = -∂H/∂X_jk`.
pub fn hamiltonian_field(h: &TracePolynomial, p: &MatrixPair) -> TangentPair {
    let g = gradient(h, p);
    TangentPair { u: g.dy.transpose(), v: -g.dx.transpose() }
}

/// `Σ ∂F/∂X_jk ∂H/∂Y_kj - ∂F/∂Y_jk ∂H/∂X_kj`.
pub fn numeric_bracket(f: &TracePolynomial, h: &TracePolynomial, p: &MatrixPair) -> Complex64 {
    let gf = gradient(f, p);
    let gh = gradient(h, p);
    (&gf.dx * &gh.dy).trace() - (&gf.dy * &gh.dx).trace()
}

/// `ω̃(a, b) = tr(U_a V_b) - tr(U_b V_a)`.
pub fn omega(a: &TangentPair, b: &TangentPair) -> Complex64 {
    (&a.u * &b.v).trace() - (&b.u * &a.v).trace()
}

/// Closed-form flows of complete Hamiltonian fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowKind {
    /// `(X, Y + t X^k)`, the flow of `-tr(X^{k+1})/(k+1)`.
    YShiftXk(u32),
    /// `(X + t Y^k, Y)`, the flow of `tr(Y^{k+1})/(k+1)`.
    XShiftYk(u32),
    /// `(e^t X, e^{-t} Y)`, the flow of `tr(XY)`.
    Scale,
    /// `(X, Y + t tr(X) id)`, the flow of `-(tr X)^2/2`.
    YShiftTrXId,
    /// `(X + t id, Y)`, the flow of `tr(Y)`.
    XShiftId,
    /// `(X, Y + t tr(X^j) X^{j-1})`, the flow of `-(tr X^j)^2/(2j)`.
    YShiftTrXj(u32),
    /// `(X + t tr(Y^j) Y^{j-1}, Y)`, the flow of `(tr Y^j)^2/(2j)`.
    XShiftTrYj(u32),
}

impl FlowKind {
    /// Shift flows leave `[X, Y]` unchanged exactly.
    pub fn is_shift(&self) -> bool {
        !matches!(self, FlowKind::Scale)
    }

    /// The Hamiltonian generating this flow.
    pub fn hamiltonian(&self) -> TracePolynomial {
        use crate::npoly::NPoly;
        match *self {
            FlowKind::YShiftXk(k) => TracePolynomial::trace_sorted(k as usize + 1, 0)
                .scale(&NPoly::from_ratio(-1, k as i64 + 1)),
            FlowKind::XShiftYk(k) => TracePolynomial::trace_sorted(0, k as usize + 1)
                .scale(&NPoly::from_ratio(1, k as i64 + 1)),
            FlowKind::Scale => TracePolynomial::trace_sorted(1, 1),
            FlowKind::YShiftTrXId => TracePolynomial::trace_sorted(1, 0)
                .pow(2)
                .scale(&NPoly::from_ratio(-1, 2)),
            FlowKind::XShiftId => TracePolynomial::trace_sorted(0, 1),
            FlowKind::YShiftTrXj(j) => TracePolynomial::trace_sorted(j as usize, 0)
                .pow(2)
                .scale(&NPoly::from_ratio(-1, 2 * j as i64)),
            FlowKind::XShiftTrYj(j) => TracePolynomial::trace_sorted(0, j as usize)
                .pow(2)
                .scale(&NPoly::from_ratio(1, 2 * j as i64)),
        }
    }

    /// The four generator flows `(X + t id, Y)`, `(X + tY, Y)`,
    /// `(X, Y + tX²)`, `(X, Y + t tr(X) id)`.
    pub fn generators() -> [FlowKind; 4] {
        [FlowKind::XShiftId, FlowKind::XShiftYk(1), FlowKind::YShiftXk(2), FlowKind::YShiftTrXId]
    }

    /// Flows of `tr X^j`, `tr Y^j`, `(tr X^j)^2`, `(tr Y^j)^2` for
    /// `1 ≤ j ≤ max_j`, and of `tr(XY)`.
    pub fn table(max_j: u32) -> Vec<FlowKind> {
        let mut out = Vec::new();
        for j in 1..=max_j {
            out.extend([FlowKind::YShiftXk(j - 1), FlowKind::XShiftYk(j - 1), FlowKind::YShiftTrXj(j), FlowKind::XShiftTrYj(j)]);
        }
        out.push(FlowKind::Scale);
        out
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowKind::YShiftXk(k) => write!(f, "y_shift_xk({k})"),
            FlowKind::XShiftYk(k) => write!(f, "x_shift_yk({k})"),
            FlowKind::Scale => f.write_str("scale"),
            FlowKind::YShiftTrXId => f.write_str("y_shift_trx_id"),
            FlowKind::XShiftId => f.write_str("x_shift_id"),
            FlowKind::YShiftTrXj(j) => write!(f, "y_shift_trxj({j})"),
            FlowKind::XShiftTrYj(j) => write!(f, "x_shift_tryj({j})"),
        }
    }
}

impl std::str::FromStr for FlowKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let with_k = |prefix: &str| -> Option<Result<u32, String>> {
            let rest = s.strip_prefix(prefix)?;
            let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
            Some(inner.trim().parse::<u32>().map_err(|e| format!("bad flow parameter in `{s}`: {e}")))
        };
        if let Some(k) = with_k("y_shift_xk") {
            return k.map(FlowKind::YShiftXk);
        }
        if let Some(k) = with_k("x_shift_yk") {
            return k.map(FlowKind::XShiftYk);
        }
        if let Some(j) = with_k("y_shift_trxj") {
            return j.and_then(|j| if j == 0 { Err("y_shift_trxj needs j >= 1".into()) } else { Ok(FlowKind::YShiftTrXj(j)) });
        }
        if let Some(j) = with_k("x_shift_tryj") {
            return j.and_then(|j| if j == 0 { Err("x_shift_tryj needs j >= 1".into()) } else { Ok(FlowKind::XShiftTrYj(j)) });
        }
        match s {
            "scale" => Ok(FlowKind::Scale),
            "y_shift_trx_id" => Ok(FlowKind::YShiftTrXId),
            "x_shift_id" => Ok(FlowKind::XShiftId),
            _ => Err(format!("unknown flow kind `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub t: Complex64,
}

fn mat_pow(m: &CMatrix, k: u32) -> CMatrix {
    (0..k).fold(CMatrix::identity(m.nrows(), m.nrows()), |acc, _| acc * m)
}

pub fn apply_flow(s: &FlowSpec, p: &MatrixPair) -> MatrixPair {
    let n = p.n();
    let id = CMatrix::identity(n, n);
    let t = s.t;
    let (x, y) = match s.kind {
        FlowKind::YShiftXk(k) => (p.x.clone(), &p.y + mat_pow(&p.x, k) * t),
        FlowKind::XShiftYk(k) => (&p.x + mat_pow(&p.y, k) * t, p.y.clone()),
        FlowKind::Scale => (&p.x * t.exp(), &p.y * (-t).exp()),
        FlowKind::YShiftTrXId => (p.x.clone(), &p.y + id * (p.x.trace() * t)),
        FlowKind::XShiftId => (&p.x + id * t, p.y.clone()),
        FlowKind::YShiftTrXj(j) => {
            let c = mat_pow(&p.x, j).trace() * t;
            (p.x.clone(), &p.y + mat_pow(&p.x, j - 1) * c)
        }
        FlowKind::XShiftTrYj(j) => {
            let c = mat_pow(&p.y, j).trace() * t;
            (&p.x + mat_pow(&p.y, j - 1) * c, p.y.clone())
        }
    };
    MatrixPair { x, y, rank_one: false }
}

/// Pushforward of a tangent vector through the flow by central differences.
fn pushforward(s: &FlowSpec, p: &MatrixPair, u: &TangentPair, h: f64) -> TangentPair {
    let hc = Complex64::new(h, 0.0);
    let plus = apply_flow(s, &p.displace(u, hc));
    let minus = apply_flow(s, &p.displace(u, -hc));
    let inv = Complex64::new(0.5 / h, 0.0);
    TangentPair { u: (plus.x - minus.x) * inv, v: (plus.y - minus.y) * inv }
}

fn tangent_distance(a: &TangentPair, b: &TangentPair) -> f64 {
    (&a.u - &b.u).norm() + (&a.v - &b.v).norm()
}

fn tangent_norm(a: &TangentPair) -> f64 {
    a.u.norm() + a.v.norm()
}

/// `|ω̃(φ_* u, φ_* v) - ω̃(u, v)|` for the flow `φ`, with pushforwards by
/// central differences of step `1e-6 · (1 + max|entry|)`.
pub fn symplectic_check(
    s: &FlowSpec,
    p: &MatrixPair,
    u: &TangentPair,
    v: &TangentPair,
) -> Result<f64, NumericsError> {
    if u.u.shape() != p.x.shape() || v.u.shape() != p.x.shape() {
        return Err(NumericsError::DimensionMismatch);
    }
    let h = 1e-6 * (1.0 + p.max_abs_entry());
    let mut pushed = Vec::with_capacity(2);
    for t in [u, v] {
        let coarse = pushforward(s, p, t, h);
        let fine = pushforward(s, p, t, h / 2.0);
        let spread = tangent_distance(&coarse, &fine) / tangent_norm(&fine).max(1.0);
        if !spread.is_finite() || spread > 1e-4 {
            return Err(NumericsError::StepSize { spread });
        }
        pushed.push(fine);
    }
    let before = omega(u, v);
    let after = omega(&pushed[0], &pushed[1]);
    Ok((after - before).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scalar_wilson_point() {
        let p = wilson_point(&[c(2.0)], &[c(5.0)]).unwrap();
        assert_eq!(p.x[(0, 0)], c(2.0));
        assert_eq!(p.y[(0, 0)], c(5.0));
        assert!(p.rank_one);
    }

    #[test]
    fn two_by_two_commutator_plus_id_is_all_ones() {
        let p = wilson_point(&[c(0.0), c(1.0)], &[c(0.0), c(0.0)]).unwrap();
        let a = p.commutator() + CMatrix::identity(2, 2);
        for z in a.iter() {
            assert!((z - c(1.0)).norm() < 1e-15);
        }
        assert!((evaluate(&parse("tr(X)").unwrap(), &p) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn collision_is_rejected() {
        let err = wilson_point(&[c(0.0), c(0.2)], &[c(0.0), c(0.0)]).unwrap_err();
        assert!(matches!(err, NumericsError::EigenvalueCollision { .. }));
    }

    #[test]
    fn random_points_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = random_wilson_point(4, &mut rng);
            assert!(p.rank_one_ratio() < 1e-10);
        }
    }

    #[test]
    fn field_signs_match_flow_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_wilson_point(3, &mut rng);
        let f = hamiltonian_field(&parse("tr(X*Y)").unwrap(), &p);
        assert!((&f.u - &p.x).norm() < 1e-12);
        assert!((&f.v + &p.y).norm() < 1e-12);
        let f = hamiltonian_field(&parse("tr(X^3)").unwrap(), &p);
        assert!(f.u.norm() < 1e-12);
        assert!((&f.v + &p.x * &p.x * c(3.0)).norm() < 1e-10);
        let f = hamiltonian_field(&parse("7 + n").unwrap(), &p);
        assert_eq!(f.u.norm() + f.v.norm(), 0.0);
    }

    #[test]
    fn flow_kinds_parse_and_print() {
        for k in [
            FlowKind::YShiftXk(2),
            FlowKind::XShiftYk(0),
            FlowKind::Scale,
            FlowKind::YShiftTrXId,
            FlowKind::XShiftId,
            FlowKind::YShiftTrXj(3),
            FlowKind::XShiftTrYj(2),
        ] {
            assert_eq!(k.to_string().parse::<FlowKind>().unwrap(), k);
        }
        assert!("warp".parse::<FlowKind>().is_err());
        assert!("y_shift_trxj(0)".parse::<FlowKind>().is_err());
    }

    #[test]
    fn identity_flow_has_zero_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_wilson_point(3, &mut rng);
        let u = TangentPair::random(3, &mut rng);
        let v = TangentPair::random(3, &mut rng);
        let s = FlowSpec { kind: FlowKind::YShiftXk(2), t: c(0.0) };
        assert!(symplectic_check(&s, &p, &u, &v).unwrap() < 1e-6);
    }

    #[test]
    fn flows_are_generated_by_their_hamiltonians() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_wilson_point(3, &mut rng);
        let h = 1e-6;
        for kind in FlowKind::table(3).into_iter().chain(FlowKind::generators()) {
            let plus = apply_flow(&FlowSpec { kind, t: c(h) }, &p);
            let minus = apply_flow(&FlowSpec { kind, t: c(-h) }, &p);
            let field = hamiltonian_field(&kind.hamiltonian(), &p);
            let du = (&plus.x - &minus.x) / c(2.0 * h);
            let dv = (&plus.y - &minus.y) / c(2.0 * h);
            let err = (&du - &field.u).norm() + (&dv - &field.v).norm();
            let scale = 1.0 + field.u.norm() + field.v.norm();
            assert!(err / scale < 1e-6, "{kind}: {err}");
        }
    }
}
