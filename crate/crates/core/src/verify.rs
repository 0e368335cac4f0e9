//! Verification suites. Every suite emits one structured record per check;
//! a suite passes when all of its records pass.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::bracket::bracket;
use crate::canonical::{self, canonical_bracket, parse_canonical, poly_to_string};
use crate::closure::{
    closure, enumerate_products, sorted_trace_words, ClosureConfig, GeneratorSet, Membership, Mode, TraceAlgebra,
};
use crate::expr::{alias, parse};
use crate::npoly::NPoly;
use crate::numerics::{
    self, apply_flow, evaluate, hamiltonian_field, numeric_bracket, omega, random_wilson_coords,
    random_wilson_point, relative_error, symplectic_check, wilson_point, Evaluator, FlowKind, FlowSpec,
    MatrixPair, TangentPair,
};
use crate::reduction::Reducer;
use crate::trace::{TracePolynomial, TraceProduct};
use crate::word::{Letter, TraceWord, Word};

pub const DEFAULT_SEED: u64 = 0x5eed;
/// Symbolic-versus-numeric agreement.
pub const NUMERIC_TOL: f64 = 1e-8;
/// Differential (finite-difference) checks.
pub const DIFFERENTIAL_TOL: f64 = 1e-6;
/// Commutator preservation under shift flows.
pub const COMMUTATOR_TOL: f64 = 1e-12;
/// σ₂/σ₁ after compositions of flows.
pub const COMPOSITION_RANK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Table64,
    Lemma63,
    Reduction,
    Flows,
    Wilson,
    ClosureAmbient,
    ClosureRankOne,
    Tcn,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Table64,
        Suite::Lemma63,
        Suite::Reduction,
        Suite::Flows,
        Suite::Wilson,
        Suite::ClosureAmbient,
        Suite::ClosureRankOne,
        Suite::Tcn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Table64 => "table64",
            Suite::Lemma63 => "lemma63",
            Suite::Reduction => "reduction",
            Suite::Flows => "flows",
            Suite::Wilson => "wilson",
            Suite::ClosureAmbient => "closure-ambient",
            Suite::ClosureRankOne => "closure-rankone",
            Suite::Tcn => "tcn",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite `{s}` (expected one of: all, {})", names.join(", "))
        })
    }
}

/// Knobs shared by all suites; `None` selects the suite's own default.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: usize,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub budget: Option<usize>,
    pub slack: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: DEFAULT_SEED, threads: 1, n: None, samples: None, tol: None, budget: None, slack: None }
    }
}

impl RunConfig {
    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (suite as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn sizes(&self, default: &[usize]) -> Vec<usize> {
        self.n.map_or_else(|| default.to_vec(), |n| vec![n])
    }
}

/// One check.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub check: String,
    pub pass: bool,
    pub fields: Map<String, Value>,
}

impl Record {
    fn new(check: impl Into<String>, pass: bool) -> Self {
        Record { check: check.into(), pass, fields: Map::new() }
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn residual(&self) -> Option<f64> {
        self.fields.get("residual").and_then(Value::as_f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub threads: usize,
    pub records: Vec<Record>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.records.iter().filter_map(Record::residual).reduce(f64::max)
    }

    /// One JSON object per line.
    pub fn json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let mut obj = r.fields.clone();
            obj.insert("suite".into(), json!(self.suite.name()));
            obj.insert("check".into(), json!(r.check));
            obj.insert("pass".into(), json!(r.pass));
            obj.insert("seed".into(), json!(self.seed));
            obj.insert("threads".into(), json!(self.threads));
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let passed = self.records.iter().filter(|r| r.pass).count();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("{}: {status} {passed}/{} checks", self.suite, self.records.len());
        if let Some(m) = self.max_residual() {
            s.push_str(&format!(", max residual {m:.3e}"));
        }
        s
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> SuiteReport {
    let records = match suite {
        Suite::Table64 => table64(),
        Suite::Lemma63 => lemma63(),
        Suite::Reduction => reduction(cfg),
        Suite::Flows => flows(cfg),
        Suite::Wilson => wilson(cfg),
        Suite::ClosureAmbient => closure_ambient(cfg),
        Suite::ClosureRankOne => closure_rank_one(cfg),
        Suite::Tcn => tcn(cfg),
    };
    SuiteReport { suite, seed: cfg.seed, threads: cfg.threads, records }
}

fn exact_record(check: String, expected: &TracePolynomial, got: &TracePolynomial) -> Record {
    Record::new(check, expected == got).with("expected", expected.to_string()).with("got", got.to_string())
}

fn p(src: &str) -> TracePolynomial {
    parse(src).expect("built-in expression")
}

/// The ten brackets among `a = tr X`, `b = tr Y`, `c = tr(X^2)/2`,
/// `d = tr(Y^2)/2`, `e = tr(XY)`.
pub const TABLE: [(&str, &str, &str); 10] = [
    ("a", "b", "n"),
    ("a", "c", "0"),
    ("a", "d", "b"),
    ("a", "e", "a"),
    ("b", "c", "-a"),
    ("b", "d", "0"),
    ("b", "e", "-b"),
    ("c", "d", "e"),
    ("c", "e", "2*c"),
    ("d", "e", "-2*d"),
];

fn table64() -> Vec<Record> {
    TABLE
        .iter()
        .map(|(f, g, want)| {
            let got = bracket(&alias(f).unwrap(), &alias(g).unwrap());
            exact_record(format!("{{{f},{g}}}"), &p(want), &got)
        })
        .collect()
}

fn xy_trace(parts: &[(Letter, usize)]) -> TracePolynomial {
    let letters: Vec<Letter> = parts.iter().flat_map(|&(l, k)| std::iter::repeat(l).take(k)).collect();
    TracePolynomial::trace_letters(&letters)
}

/// `{tr X^a Y^b, tr X^c Y^d}` as the explicit double sum over the
/// positions of the contracted `X` and `Y` letters.
pub fn double_sum(a: usize, b: usize, c: usize, d: usize) -> TracePolynomial {
    use Letter::{X, Y};
    let mut out = TracePolynomial::zero();
    for p in 1..=a {
        for q in 1..=d {
            out += &xy_trace(&[(X, p - 1), (Y, d - q), (X, c), (Y, q - 1), (X, a - p), (Y, b)]);
        }
    }
    for r in 1..=b {
        for s in 1..=c {
            out -= &xy_trace(&[(Y, r - 1), (X, c - s), (Y, d), (X, s - 1), (Y, b - r), (X, a)]);
        }
    }
    out
}

/// Bracket chains of the four generators.
pub const CHAINS: [(&str, &str); 3] = [
    ("{{{tr(X^3), tr(Y^2)}, tr(Y^2)}, tr(Y^2)}", "48*tr(Y^3)"),
    ("{tr(X)^2, tr(Y^3)}", "6*tr(X)*tr(Y^2)"),
    ("{tr(X^2), tr(Y)}", "2*tr(X)"),
];

fn lemma63() -> Vec<Record> {
    let mut out = Vec::new();
    for a in 0..=4 {
        for b in 0..=4 {
            for c in 0..=4 {
                for d in 0..=4 {
                    let f = TracePolynomial::trace_sorted(a, b);
                    let g = TracePolynomial::trace_sorted(c, d);
                    out.push(exact_record(
                        format!("{{tr(X^{a}Y^{b}),tr(X^{c}Y^{d})}}"),
                        &double_sum(a, b, c, d),
                        &bracket(&f, &g),
                    ));
                }
            }
        }
    }
    let (x3, y2) = (p("tr(X^3)"), p("tr(Y^2)"));
    let chain0 = bracket(&bracket(&bracket(&x3, &y2), &y2), &y2);
    let chain1 = bracket(&p("tr(X)^2"), &p("tr(Y^3)"));
    let chain2 = bracket(&p("tr(X^2)"), &p("tr(Y)"));
    for ((name, want), got) in CHAINS.iter().zip([chain0, chain1, chain2]) {
        out.push(exact_record(name.to_string(), &p(want), &got));
    }
    out
}

pub fn random_word<R: Rng>(rng: &mut R, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let letters: Vec<Letter> = (0..len).map(|_| if rng.gen_bool(0.5) { Letter::X } else { Letter::Y }).collect();
    Word::from_letters(&letters)
}

/// A random trace polynomial of degree at most `max_degree` with up to
/// three terms and small rational coefficients, some involving `n`.
pub fn random_polynomial<R: Rng>(rng: &mut R, max_degree: usize) -> TracePolynomial {
    let mut out = TracePolynomial::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let mut budget = rng.gen_range(1..=max_degree);
        let mut factors = Vec::new();
        while budget > 0 && factors.len() < 3 {
            let w = random_word(rng, budget);
            budget -= w.len();
            factors.push(TraceWord::new(w));
        }
        let num = rng.gen_range(-5i64..=5);
        let den = rng.gen_range(1i64..=3);
        let mut coeff = NPoly::from_ratio(if num == 0 { 1 } else { num }, den);
        if rng.gen_bool(0.25) {
            coeff = &coeff * &NPoly::n();
        }
        out.add_term(TraceProduct::from_factors(factors), coeff);
    }
    out
}

fn reduction(cfg: &RunConfig) -> Vec<Record> {
    use Letter::{X, Y};
    let reducer = Reducer::new();
    let mut out = Vec::new();
    let binom = p("(1/2)*n^2 - (1/2)*n");
    for k in 0..=5 {
        let got = reducer.reduce_b_letters(&vec![X; k], &[]);
        out.push(exact_record(format!("tr(X^{k}*B)"), &TracePolynomial::zero(), &got));
    }
    out.push(exact_record("tr(X*Y*B)".into(), &binom, &reducer.reduce_b_letters(&[X], &[Y])));
    let b_squared = p("2*tr(X*Y*X*Y) - 2*tr(X^2*Y^2)");
    out.push(exact_record("tr(B^2)".into(), &p("n^2 - n"), &reducer.reduce_poly(&b_squared)));
    out.push(exact_record(
        "reduce(tr(X*Y*X*Y))".into(),
        &p("tr(X^2*Y^2) + (1/2)*n^2 - (1/2)*n"),
        &reducer.reduce_poly(&p("tr(X*Y*X*Y)")),
    ));

    // Normal form shape on every trace word of length at most 8.
    let mut shape_failures = Vec::new();
    let words = crate::closure::all_trace_words(8);
    for w in &words {
        let (i, j) = w.double_degree();
        let reduced = reducer.reduce(&TracePolynomial::from_product(TraceProduct::single(*w)));
        let leading_ok = reduced.leading == TracePolynomial::trace_sorted(i, j);
        let degree_ok = reduced.corrections.keys().all(|t| t.degree() + 4 <= i + j);
        let weight_ok = reduced.value.keys().all(|t| t.weight() == i as i64 - j as i64);
        if !(leading_ok && degree_ok && weight_ok) {
            shape_failures.push(w.to_string());
        }
    }
    out.push(
        Record::new("normal form: leading tr(X^i*Y^j), corrections of degree <= i+j-4, weight i-j", shape_failures.is_empty())
            .with("words", words.len())
            .with("failures", shape_failures),
    );

    let tol = cfg.tol.unwrap_or(NUMERIC_TOL);
    let samples = cfg.samples.unwrap_or(200);
    let mut rng = cfg.rng(Suite::Reduction);
    let words: Vec<Word> = (0..samples).map(|_| random_word(&mut rng, 8)).collect();
    for n in cfg.sizes(&[2, 3, 4]) {
        let points: Vec<MatrixPair> = (0..20).map(|_| random_wilson_point(n, &mut rng)).collect();
        for w in &words {
            let original = TracePolynomial::trace_of(w.clone());
            let reduced = reducer.reduce_poly(&original);
            let mut worst: f64 = 0.0;
            for pt in &points {
                let mut ev = Evaluator::new(pt);
                let (lhs, rhs) = (ev.eval(&original), ev.eval(&reduced));
                let scale = ev.magnitude(&reduced);
                worst = worst.max(relative_error(lhs, rhs, scale));
            }
            out.push(
                Record::new(format!("tr({w}) n={n}"), worst < tol)
                    .with("n", n)
                    .with("points", points.len())
                    .with("tol", tol)
                    .with("residual", worst),
            );
        }
    }
    out
}

fn random_time<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if z.norm() <= radius {
            return z;
        }
    }
}

fn flow_kinds() -> Vec<FlowKind> {
    let mut kinds: Vec<FlowKind> = FlowKind::generators().to_vec();
    for k in FlowKind::table(3) {
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    kinds
}

/// Time unit for a composition step: shift flows move the point by at most
/// its own size per unit time, which keeps entries within floating range.
fn step_scale(kind: FlowKind, p: &MatrixPair) -> f64 {
    if !kind.is_shift() {
        return 1.0;
    }
    let unit = apply_flow(&FlowSpec { kind, t: Complex64::new(1.0, 0.0) }, p);
    let shift = (&unit.x - &p.x).norm() + (&unit.y - &p.y).norm();
    let size = p.x.norm() + p.y.norm();
    if shift > size {
        size / shift
    } else {
        1.0
    }
}

fn flows(cfg: &RunConfig) -> Vec<Record> {
    let mut rng = cfg.rng(Suite::Flows);
    let samples = cfg.samples.unwrap_or(50);
    let sym_tol = cfg.tol.unwrap_or(DIFFERENTIAL_TOL);
    let mut out = Vec::new();
    for n in cfg.sizes(&[2, 3, 4]) {
        for kind in flow_kinds() {
            let mut commutator: f64 = 0.0;
            let mut symplectic: f64 = 0.0;
            let mut errors = Vec::new();
            for _ in 0..samples {
                let pt = random_wilson_point(n, &mut rng);
                let spec = FlowSpec { kind, t: random_time(&mut rng, 2.0) };
                let image = apply_flow(&spec, &pt);
                let c0 = pt.commutator();
                commutator = commutator.max((image.commutator() - &c0).norm() / c0.norm());
                let u = TangentPair::random(n, &mut rng);
                let v = TangentPair::random(n, &mut rng);
                match symplectic_check(&spec, &pt, &u, &v) {
                    Ok(r) => symplectic = symplectic.max(r),
                    Err(e) => errors.push(e.to_string()),
                }
            }
            if kind.is_shift() {
                out.push(
                    Record::new(format!("{kind} n={n} commutator"), commutator < COMMUTATOR_TOL)
                        .with("n", n)
                        .with("samples", samples)
                        .with("tol", COMMUTATOR_TOL)
                        .with("residual", commutator),
                );
            }
            out.push(
                Record::new(format!("{kind} n={n} symplectic"), errors.is_empty() && symplectic < sym_tol)
                    .with("n", n)
                    .with("samples", samples)
                    .with("tol", sym_tol)
                    .with("residual", symplectic)
                    .with("errors", errors),
            );
        }
        // Random compositions of the generator and table flows.
        let kinds = flow_kinds();
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let mut pt = random_wilson_point(n, &mut rng);
            for _ in 0..10 {
                let kind = *kinds.choose(&mut rng).expect("non-empty");
                let t = random_time(&mut rng, 0.5) * step_scale(kind, &pt);
                pt = apply_flow(&FlowSpec { kind, t }, &pt);
            }
            worst = worst.max(pt.rank_one_ratio());
        }
        out.push(
            Record::new(format!("compositions n={n} rank one"), worst < COMPOSITION_RANK_TOL)
                .with("n", n)
                .with("compositions", 10)
                .with("length", 10)
                .with("time_radius", 0.5)
                .with("tol", COMPOSITION_RANK_TOL)
                .with("residual", worst),
        );
    }
    out
}

fn wilson(cfg: &RunConfig) -> Vec<Record> {
    let mut rng = cfg.rng(Suite::Wilson);
    let tol = cfg.tol.unwrap_or(NUMERIC_TOL);
    let pairs = cfg.samples.unwrap_or(100);
    let mut out = Vec::new();
    let sizes = cfg.sizes(&[2, 3, 4]);
    for &n in &sizes {
        let points: Vec<MatrixPair> = (0..30).map(|_| random_wilson_point(n, &mut rng)).collect();
        let worst_rank = points.iter().map(MatrixPair::rank_one_ratio).fold(0.0, f64::max);
        out.push(
            Record::new(format!("certified points n={n}"), points.iter().all(|q| q.rank_one))
                .with("n", n)
                .with("tol", numerics::RANK_ONE_TOL)
                .with("residual", worst_rank),
        );
        for k in 0..pairs {
            let f = random_polynomial(&mut rng, 6);
            let g = random_polynomial(&mut rng, 6);
            let symbolic = bracket(&f, &g);
            let mut worst: f64 = 0.0;
            for pt in &points {
                let mut ev = Evaluator::new(pt);
                let exact = ev.eval(&symbolic);
                let scale = ev.magnitude(&symbolic);
                worst = worst.max(relative_error(exact, numeric_bracket(&f, &g, pt), scale));
            }
            out.push(
                Record::new(format!("bracket pair {k} n={n}"), worst < tol)
                    .with("n", n)
                    .with("f", f.to_string())
                    .with("g", g.to_string())
                    .with("tol", tol)
                    .with("residual", worst),
            );
        }
        // ω̃(V_H, w) = dH[w], with dH by central differences.
        let mut worst: f64 = 0.0;
        for pt in points.iter().take(10) {
            let h = random_polynomial(&mut rng, 5);
            let w = TangentPair::random(n, &mut rng);
            let step = 1e-6 * (1.0 + pt.max_abs_entry());
            let plus = evaluate(&h, &pt.displace(&w, Complex64::new(step, 0.0)));
            let minus = evaluate(&h, &pt.displace(&w, Complex64::new(-step, 0.0)));
            let dh = (plus - minus) / (2.0 * step);
            let lhs = omega(&hamiltonian_field(&h, pt), &w);
            worst = worst.max(relative_error(lhs, dh, 0.0));
        }
        out.push(
            Record::new(format!("field consistency n={n}"), worst < DIFFERENTIAL_TOL)
                .with("n", n)
                .with("tol", DIFFERENTIAL_TOL)
                .with("residual", worst),
        );
        // Simultaneous permutations of (α, β) give conjugate pairs.
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let (alphas, betas) = random_wilson_coords(n, &mut rng);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let pa: Vec<Complex64> = perm.iter().map(|&i| alphas[i]).collect();
            let pb: Vec<Complex64> = perm.iter().map(|&i| betas[i]).collect();
            let (p0, p1) = (wilson_point(&alphas, &betas).unwrap(), wilson_point(&pa, &pb).unwrap());
            let f = random_polynomial(&mut rng, 6);
            let mut ev = Evaluator::new(&p0);
            let scale = ev.magnitude(&f);
            worst = worst.max(relative_error(ev.eval(&f), evaluate(&f, &p1), scale));
        }
        out.push(
            Record::new(format!("permutation invariance n={n}"), worst < tol)
                .with("n", n)
                .with("tol", tol)
                .with("residual", worst),
        );
    }
    out
}

fn closure_config(cfg: &RunConfig, budget: usize, slack: usize) -> ClosureConfig {
    let mut c = ClosureConfig::new(cfg.budget.unwrap_or(budget), cfg.slack.unwrap_or(slack));
    c.threads = Some(cfg.threads.max(1));
    c.seed = cfg.seed;
    c
}

/// Monomials `a^i b^j c^k d^l e^p` of trace degree `1..=max_degree`.
pub fn abcde_monomials(max_degree: usize) -> Vec<(String, TracePolynomial)> {
    let gens = [("a", 1), ("b", 1), ("c", 2), ("d", 2), ("e", 2)];
    let mut out: Vec<(Vec<u32>, usize)> = vec![(Vec::new(), 0)];
    for (_, deg) in gens {
        out = out
            .into_iter()
            .flat_map(|(exps, d)| {
                (0..).map(move |e: u32| (e, d + deg * e as usize)).take_while(move |&(_, dd)| dd <= max_degree).map(
                    move |(e, dd)| {
                        let mut v = exps.clone();
                        v.push(e);
                        (v, dd)
                    },
                )
            })
            .collect();
    }
    out.into_iter()
        .filter(|(_, d)| *d > 0)
        .map(|(exps, _)| {
            let mut name = Vec::new();
            let mut value = TracePolynomial::constant(NPoly::one());
            for ((g, _), e) in gens.iter().zip(exps) {
                if e > 0 {
                    name.push(if e == 1 { g.to_string() } else { format!("{g}^{e}") });
                    value = value.mul(&alias(g).unwrap().pow(e));
                }
            }
            (name.join("*"), value)
        })
        .collect()
}

fn closure_records(
    mode: Mode,
    config: ClosureConfig,
    targets: Vec<(String, TracePolynomial)>,
) -> Vec<Record> {
    let state = match closure(TraceAlgebra::new(mode), &GeneratorSet::preset_f().named(), config.clone()) {
        Ok(s) => s,
        Err(e) => return vec![Record::new("closure", false).with("error", e.to_string())],
    };
    let mut out = Vec::new();
    let by_degree: Map<String, Value> =
        state.dimension_by_degree().into_iter().map(|(d, k)| (d.to_string(), json!(k))).collect();
    out.push(
        Record::new("closure", true)
            .with("mode", mode.to_string())
            .with("budget", config.budget)
            .with("slack", config.slack)
            .with("dimension", state.dimension())
            .with("dimension_by_degree", Value::Object(by_degree))
            .with("pairs_bracketed", state.stats().pairs_bracketed),
    );
    let replayed = state.verify_certificates();
    out.push(
        Record::new("basis certificates replay", replayed.is_ok())
            .with("basis", state.dimension())
            .with("error", replayed.err().map(|(i, e)| format!("basis element {i}: {e}")).unwrap_or_default()),
    );
    for (name, target) in targets {
        let rec = match state.membership(&target) {
            Ok(Membership::Member(cert)) => {
                let replays = state.replay(&cert).map(|v| v == target).unwrap_or(false);
                Record::new(format!("{name} member"), replays)
                    .with("target", target.to_string())
                    .with("certificate_nodes", cert.node_count())
                    .with("replays", replays)
            }
            Ok(Membership::NotFound) => Record::new(format!("{name} member"), false).with("target", target.to_string()),
            Err(e) => Record::new(format!("{name} member"), false).with("error", e.to_string()),
        };
        out.push(rec);
    }
    out
}

fn closure_ambient(cfg: &RunConfig) -> Vec<Record> {
    let config = closure_config(cfg, 10, 0);
    let budget = config.budget;
    let mut targets = abcde_monomials(budget.min(8));
    for p in 1..=5u32 {
        if 2 * p as usize > budget.min(8) && 2 * p as usize <= budget {
            targets.push((format!("e^{p}"), alias("e").unwrap().pow(p)));
        }
    }
    closure_records(Mode::Ambient, config, targets)
}

fn closure_rank_one(cfg: &RunConfig) -> Vec<Record> {
    let config = closure_config(cfg, 6, 4);
    let words = sorted_trace_words(config.budget);
    let targets = enumerate_products(&words, config.budget)
        .into_iter()
        .filter(|p| !p.is_one())
        .map(|p| (p.to_string(), TracePolynomial::from_product(p)))
        .collect();
    closure_records(Mode::RankOne, config, targets)
}

fn tcn(cfg: &RunConfig) -> Vec<Record> {
    let n = cfg.n.unwrap_or(2);
    let budget = cfg.budget.unwrap_or(5);
    let slack = cfg.slack.unwrap_or(1);
    let mut out = Vec::new();
    let c = |s: &str| parse_canonical(s, n.max(2)).expect("built-in expression");
    let fixture = |check: String, f: &str, g: &str, want: &str| {
        let got = canonical_bracket(n.max(2), &c(f), &c(g)).expect("indices in range");
        let want = c(want);
        Record::new(check, got == want).with("expected", poly_to_string(&want)).with("got", poly_to_string(&got))
    };
    for k in 1..=n.max(2) {
        out.push(fixture(format!("{{x{k}^2, y{k}^2}}"), &format!("x{k}^2"), &format!("y{k}^2"), &format!("4*x{k}*y{k}")));
    }
    out.push(fixture("{x2^2, y1*y2}".into(), "x2^2", "y1*y2", "2*x2*y1"));
    out.push(fixture("{x1^2, y2*y1}".into(), "x1^2", "y2*y1", "2*x1*y2"));
    // H = -x^(p+1)/(p+1) has field x^p d/dy: {y, H} = x^p and {x, H} = 0.
    for p in 1..=3 {
        let h = format!("-(1/{})*x1^{}", p + 1, p + 1);
        out.push(fixture(format!("field of {h} on y1"), "y1", &h, &format!("x1^{p}")));
        out.push(fixture(format!("field of {h} on x1"), "x1", &h, "0"));
    }
    match canonical::monomial_coverage(n, budget, slack) {
        Ok((report, _)) => {
            out.push(
                Record::new("coverage", report.complete())
                    .with("n", n)
                    .with("budget", budget)
                    .with("slack", slack)
                    .with("dimension", report.dimension)
                    .with("members", report.members.len())
                    .with("missing", report.missing.iter().map(|m| m.to_string()).collect::<Vec<_>>()),
            );
        }
        Err(e) => out.push(Record::new("coverage", false).with("error", e.to_string())),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("none".parse::<Suite>().is_err());
    }

    #[test]
    fn abcde_counts() {
        // degree ≤ 2: a, b, a^2, ab, b^2, c, d, e
        assert_eq!(abcde_monomials(2).len(), 8);
        assert!(abcde_monomials(8).iter().any(|(name, _)| name == "e^4"));
    }

    #[test]
    fn small_suites_pass() {
        for s in [Suite::Table64, Suite::Lemma63] {
            let r = run_suite(s, &RunConfig::default());
            assert!(r.passed(), "{}", r.summary());
        }
    }
}
