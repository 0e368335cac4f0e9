//! Acceptance criteria; one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cmtrace::canonical::{canonical_bracket, monomial_coverage, parse_canonical};
use cmtrace::closure::{all_trace_words, closure, ClosureConfig, GeneratorSet, Membership, Mode, TraceAlgebra};
use cmtrace::numerics::{apply_flow, numeric_bracket, symplectic_check, CMatrix, FlowKind, FlowSpec, MatrixPair, TangentPair};
use cmtrace::verify::{run_suite, RunConfig, Suite};
use cmtrace::{bracket, parse, Letter, Reducer, TracePolynomial, TraceProduct, TraceWord};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn p(s: &str) -> TracePolynomial {
    parse(s).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn in_disc(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    loop {
        let z = c(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if z.norm() <= r {
            return z;
        }
    }
}

fn sigma_ratio(x: &CMatrix, y: &CMatrix) -> f64 {
    let n = x.nrows();
    let a = x * y - y * x + CMatrix::identity(n, n);
    let mut sv: Vec<f64> = a.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|u, v| v.total_cmp(u));
    sv[1] / sv[0]
}

/// `X = diag(α)`, `Y_jj = β_j`, `Y_jk = 1/(α_j - α_k)`, rejected unless
/// `σ₂/σ₁ < 1e-10` for `[X, Y] + id`.
fn wilson(n: usize, rng: &mut ChaCha8Rng) -> MatrixPair {
    loop {
        let mut alphas: Vec<Complex64> = Vec::new();
        while alphas.len() < n {
            let z = in_disc(rng, 3.0);
            if alphas.iter().all(|a| (a - z).norm() >= 0.5) {
                alphas.push(z);
            }
        }
        let betas: Vec<Complex64> = (0..n).map(|_| in_disc(rng, 3.0)).collect();
        let x = CMatrix::from_fn(n, n, |j, k| if j == k { alphas[j] } else { c(0.0, 0.0) });
        let y = CMatrix::from_fn(n, n, |j, k| if j == k { betas[j] } else { (alphas[j] - alphas[k]).inv() });
        if sigma_ratio(&x, &y) < 1e-10 {
            return MatrixPair::new(x, y).unwrap();
        }
    }
}

fn word_trace(pt: &MatrixPair, w: &TraceWord) -> Complex64 {
    let n = pt.x.nrows();
    let mut m = CMatrix::identity(n, n);
    for l in w.word().letters() {
        m = match l {
            Letter::X => m * &pt.x,
            Letter::Y => m * &pt.y,
        };
    }
    m.trace()
}

/// Value and term magnitude `Σ |c(n)| |product|`.
fn eval(f: &TracePolynomial, pt: &MatrixPair) -> (Complex64, f64) {
    let n = c(pt.x.nrows() as f64, 0.0);
    let mut value = c(0.0, 0.0);
    let mut size = 0.0;
    for (prod, coeff) in f.iter() {
        let v = prod.factors().iter().fold(c(1.0, 0.0), |acc, w| acc * word_trace(pt, w)) * coeff.eval_complex(n);
        value += v;
        size += v.norm();
    }
    (value, size)
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm()).max(scale)
}

fn criterion_1() -> Outcome {
    let table = [
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
    let start = Instant::now();
    let matched = table.iter().filter(|(f, g, want)| bracket(&p(f), &p(g)) == p(want)).count();
    let t = start.elapsed();
    (matched == 10 && t < Duration::from_secs(1), format!("{matched}/10 table entries matched in {t:.2?}"))
}

fn xy_word(parts: &[(char, usize)]) -> String {
    let s: Vec<String> = parts.iter().filter(|(_, k)| *k > 0).map(|(l, k)| format!("{l}^{k}")).collect();
    if s.is_empty() {
        "n".into()
    } else {
        format!("tr({})", s.join("*"))
    }
}

fn double_sum(a: usize, b: usize, cc: usize, d: usize) -> TracePolynomial {
    let mut terms = vec!["0".to_string()];
    for i in 1..=a {
        for j in 1..=d {
            terms.push(format!("+{}", xy_word(&[('X', i - 1), ('Y', d - j), ('X', cc), ('Y', j - 1), ('X', a - i), ('Y', b)])));
        }
    }
    for r in 1..=b {
        for s in 1..=cc {
            terms.push(format!("-{}", xy_word(&[('Y', r - 1), ('X', cc - s), ('Y', d), ('X', s - 1), ('Y', b - r), ('X', a)])));
        }
    }
    p(&terms.concat())
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut matched = 0;
    for a in 0..=4 {
        for b in 0..=4 {
            for cc in 0..=4 {
                for d in 0..=4 {
                    let f = p(&xy_word(&[('X', a), ('Y', b)]));
                    let g = p(&xy_word(&[('X', cc), ('Y', d)]));
                    matched += (bracket(&f, &g) == double_sum(a, b, cc, d)) as usize;
                }
            }
        }
    }
    let t = start.elapsed();
    (matched == 625 && t < Duration::from_secs(30), format!("{matched}/625 cases in {t:.2?}"))
}

fn criterion_3() -> Outcome {
    let (x3, y2) = (p("tr(X^3)"), p("tr(Y^2)"));
    let chains = [
        (bracket(&bracket(&bracket(&x3, &y2), &y2), &y2), p("48*tr(Y^3)")),
        (bracket(&p("tr(X)^2"), &p("tr(Y^3)")), p("6*tr(X)*tr(Y^2)")),
        (bracket(&p("tr(X^2)"), &p("tr(Y)")), p("2*tr(X)")),
    ];
    let matched = chains.iter().filter(|(got, want)| got == want).count();
    (matched == 3, format!("{matched}/3 chain fixtures"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let r = Reducer::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let words: Vec<TraceWord> = (0..200)
        .map(|_| {
            let len = rng.gen_range(1..=8);
            let letters: Vec<Letter> = (0..len).map(|_| if rng.gen_bool(0.5) { Letter::X } else { Letter::Y }).collect();
            TraceWord::from_letters(&letters)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        let points: Vec<MatrixPair> = (0..20).map(|_| wilson(n, &mut rng)).collect();
        for w in &words {
            let reduced = r.reduce_poly(&TracePolynomial::from_product(TraceProduct::single(*w)));
            for pt in &points {
                let (v, size) = eval(&reduced, pt);
                worst = worst.max(rel(word_trace(pt, w), v, size));
            }
        }
    }
    use Letter::{X, Y};
    let mut fixtures = (0..=5).all(|k| r.reduce_b_letters(&vec![X; k], &[]).is_zero());
    fixtures &= r.reduce_b_letters(&[X, Y], &[]) == p("(1/2)*n*(n-1)");
    fixtures &= r.reduce_poly(&p("2*tr(X*Y*X*Y) - 2*tr(X^2*Y^2)")) == p("n*(n-1)");
    let t = start.elapsed();
    (
        worst < 1e-8 && fixtures && t < Duration::from_secs(300),
        format!("max relative error {worst:.2e} over 200 words x 20 points x n in {{2,3,4}}, fixtures {fixtures}, {t:.2?}"),
    )
}

fn criterion_5() -> Outcome {
    let r = Reducer::new();
    let words = all_trace_words(10);
    let mut bad = Vec::new();
    for w in &words {
        let (i, j) = w.double_degree();
        let red = r.reduce(&TracePolynomial::from_product(TraceProduct::single(*w)));
        let ok = red.leading == TracePolynomial::trace_sorted(i, j)
            && red.corrections.keys().all(|t| t.degree() + 4 <= i + j)
            && red.value.keys().all(|t| t.weight() == i as i64 - j as i64);
        if !ok {
            bad.push(w.to_string());
        }
    }
    (bad.is_empty(), format!("{} words of length <= 10, {} violations {:?}", words.len(), bad.len(), bad))
}

/// Multisets of `(p, q)` with `p + q ≥ 1` and total degree at most `max`.
fn sorted_products(max: usize) -> Vec<Vec<(usize, usize)>> {
    let shapes: Vec<(usize, usize)> = (1..=max).flat_map(|d| (0..=d).map(move |i| (i, d - i))).collect();
    fn extend(shapes: &[(usize, usize)], from: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for k in from..shapes.len() {
            let d = shapes[k].0 + shapes[k].1;
            if d <= left {
                cur.push(shapes[k]);
                extend(shapes, k, left - d, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&shapes, 0, max, &mut Vec::new(), &mut out);
    out
}

fn f_generators() -> Vec<(String, TracePolynomial)> {
    let mut set = GeneratorSet::default();
    for g in ["tr(Y)", "tr(Y^2)", "tr(X^3)", "tr(X)^2"] {
        set.push(g, p(g));
    }
    set.named()
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let state = match closure(TraceAlgebra::new(Mode::RankOne), &f_generators(), ClosureConfig::new(6, 4)) {
        Ok(s) => s,
        Err(e) => return (false, format!("closure failed: {e}")),
    };
    let basis_ok = state.verify_certificates().is_ok();
    let targets = sorted_products(6);
    let mut missing = Vec::new();
    for t in &targets {
        let f = t.iter().fold(p("1"), |acc, &(i, j)| acc.mul(&TracePolynomial::trace_sorted(i, j)));
        let ok = match state.membership(&f) {
            Ok(Membership::Member(cert)) => state.replay(&cert).as_ref() == Ok(&f),
            _ => false,
        };
        if !ok {
            missing.push(f.to_string());
        }
    }
    let example = p("tr(X^2*Y)*tr(X*Y^2)");
    let example_ok = matches!(state.membership(&example), Ok(Membership::Member(c)) if state.replay(&c).as_ref() == Ok(&example));
    let t = start.elapsed();
    (
        missing.is_empty() && basis_ok && example_ok && t < Duration::from_secs(600),
        format!(
            "{}/{} products members (tr(X^2*Y)*tr(X*Y^2): {example_ok}), dimension {}, basis replay {basis_ok}, {t:.2?}",
            targets.len() - missing.len(),
            targets.len(),
            state.dimension()
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let state = match closure(TraceAlgebra::new(Mode::Ambient), &f_generators(), ClosureConfig::new(10, 0)) {
        Ok(s) => s,
        Err(e) => return (false, format!("closure failed: {e}")),
    };
    let mut targets = Vec::new();
    for i in 0..=8usize {
        for j in 0..=8 - i {
            for k in 0..=(8 - i - j) / 2 {
                for l in 0..=(8 - i - j - 2 * k) / 2 {
                    for e in 0..=(8 - i - j - 2 * k - 2 * l) / 2 {
                        if i + j + k + l + e > 0 {
                            targets.push(format!("a^{i}*b^{j}*c^{k}*d^{l}*e^{e}"));
                        }
                    }
                }
            }
        }
    }
    targets.push("e^5".into());
    let mut missing = Vec::new();
    for src in &targets {
        let f = p(src);
        let ok = match state.membership(&f) {
            Ok(Membership::Member(cert)) => state.replay(&cert).as_ref() == Ok(&f),
            _ => false,
        };
        if !ok {
            missing.push(src.clone());
        }
    }
    let t = start.elapsed();
    (
        missing.is_empty() && t < Duration::from_secs(600),
        format!(
            "{}/{} monomials (degree <= 8 and e^5) members with replayed certificates, dimension {}, {t:.2?}; missing {:?}",
            targets.len() - missing.len(),
            targets.len(),
            state.dimension(),
            missing
        ),
    )
}

fn random_tangent(n: usize, rng: &mut ChaCha8Rng) -> TangentPair {
    let m = |rng: &mut ChaCha8Rng| CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    TangentPair { u: m(rng), v: m(rng) }
}

fn criterion_8() -> Outcome {
    let mut kinds: Vec<FlowKind> = FlowKind::generators().to_vec();
    kinds.extend(FlowKind::table(3).into_iter().filter(|k| !FlowKind::generators().contains(k)));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut drift, mut symplectic, mut rank): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in [2, 3, 4] {
        for &kind in &kinds {
            for _ in 0..50 {
                let pt = wilson(n, &mut rng);
                let spec = FlowSpec { kind, t: in_disc(&mut rng, 2.0) };
                let image = apply_flow(&spec, &pt);
                if kind.is_shift() {
                    let before = &pt.x * &pt.y - &pt.y * &pt.x;
                    let after = &image.x * &image.y - &image.y * &image.x;
                    drift = drift.max((after - &before).norm() / before.norm());
                }
                let (u, v) = (random_tangent(n, &mut rng), random_tangent(n, &mut rng));
                symplectic = symplectic.max(symplectic_check(&spec, &pt, &u, &v).unwrap_or(f64::INFINITY));
            }
        }
        for _ in 0..10 {
            let mut pt = wilson(n, &mut rng);
            for _ in 0..10 {
                let kind = kinds[rng.gen_range(0..kinds.len())];
                // keep each shift step no larger than the point itself
                let mut scale = 1.0;
                if kind.is_shift() {
                    let unit = apply_flow(&FlowSpec { kind, t: c(1.0, 0.0) }, &pt);
                    let shift = (&unit.x - &pt.x).norm() + (&unit.y - &pt.y).norm();
                    let size = pt.x.norm() + pt.y.norm();
                    if shift > size {
                        scale = size / shift;
                    }
                }
                pt = apply_flow(&FlowSpec { kind, t: in_disc(&mut rng, 0.5) * scale }, &pt);
            }
            rank = rank.max(sigma_ratio(&pt.x, &pt.y));
        }
    }
    (
        drift < 1e-12 && rank < 1e-9 && symplectic < 1e-6,
        format!("{} flows: commutator drift {drift:.2e}, rank ratio after compositions {rank:.2e}, symplectic residual {symplectic:.2e}", kinds.len()),
    )
}

fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> TracePolynomial {
    let mut f = TracePolynomial::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let mut budget = rng.gen_range(1..=max_degree);
        let mut factors = Vec::new();
        while budget > 0 {
            let len = rng.gen_range(1..=budget);
            let letters: Vec<Letter> = (0..len).map(|_| if rng.gen_bool(0.5) { Letter::X } else { Letter::Y }).collect();
            factors.push(TraceWord::from_letters(&letters));
            budget -= len;
        }
        let coeff = cmtrace::NPoly::from_int(rng.gen_range(1..=3)) * cmtrace::NPoly::from_int(if rng.gen_bool(0.5) { 1 } else { -1 });
        f.add_term(TraceProduct::from_factors(factors), coeff);
    }
    f
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pairs: Vec<(TracePolynomial, TracePolynomial)> = (0..100).map(|_| (random_poly(&mut rng, 6), random_poly(&mut rng, 6))).collect();
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        let points: Vec<MatrixPair> = (0..30).map(|_| wilson(n, &mut rng)).collect();
        for (f, g) in &pairs {
            let b = bracket(f, g);
            for pt in &points {
                let (sym, size) = eval(&b, pt);
                worst = worst.max(rel(numeric_bracket(f, g, pt), sym, size));
            }
        }
    }
    (worst < 1e-8, format!("max relative error {worst:.2e} over 100 pairs x 30 points x n in {{2,3,4}}"))
}

fn criterion_10() -> Outcome {
    let cp = |s: &str| parse_canonical(s, 2).unwrap();
    let mut fixtures = true;
    for k in 1..=2 {
        fixtures &= canonical_bracket(2, &cp(&format!("x{k}^2")), &cp(&format!("y{k}^2"))) == Ok(cp(&format!("4*x{k}*y{k}")));
    }
    for (j, k) in [(1, 2), (2, 1)] {
        fixtures &= canonical_bracket(2, &cp(&format!("x{k}^2")), &cp(&format!("y{j}*y{k}"))) == Ok(cp(&format!("2*x{k}*y{j}")));
    }
    match monomial_coverage(2, 5, 1) {
        Ok((report, _)) => (
            report.complete() && fixtures,
            format!(
                "{}/{} monomials of degree <= 5 covered (n = 2, slack 1), fixtures {fixtures}",
                report.members.len(),
                report.members.len() + report.missing.len()
            ),
        ),
        Err(e) => (false, format!("closure failed: {e}")),
    }
}

fn criterion_11() -> Outcome {
    let cfg = RunConfig { seed: 11, threads: 1, samples: Some(20), budget: Some(5), slack: Some(1), ..RunConfig::default() };
    let run = || Suite::ALL.iter().map(|&s| run_suite(s, &cfg).json_lines()).collect::<String>();
    let (first, second) = (run(), run());
    (
        first == second && !first.is_empty(),
        format!("{} report bytes, identical: {} (seed 11, 1 thread, budget 5 + slack 1)", first.len(), first == second),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("bracket table", criterion_1),
        ("double-sum closed form", criterion_2),
        ("bracket chains", criterion_3),
        ("reduction soundness", criterion_4),
        ("reduction degree bound", criterion_5),
        ("rank-one closure", criterion_6),
        ("ambient closure", criterion_7),
        ("flow invariance", criterion_8),
        ("symbolic/numeric brackets", criterion_9),
        ("T*C^n closure", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check();
        failed += !pass as usize;
        println!("criterion {:>2} {name}: {} ({detail})", k + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
