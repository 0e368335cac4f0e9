use std::fs;
use std::path::Path;

use cmtrace::canonical::{canonical_bracket, monomial_coverage, parse_canonical, poly_to_string};
use cmtrace::closure::{check_certificate, closure, Certificate, ClosureConfig, ClosureState, GeneratorSet, Membership, Mode, TraceAlgebra};
use cmtrace::numerics::{apply_flow, FlowKind, FlowSpec, MatrixPair};
use cmtrace::verify::{run_suite, RunConfig, Suite};
use cmtrace::{bracket, parse, Reducer, TracePolynomial};
use serde_json::{json, Map, Value};

use crate::points::{matrix_json, matrix_text, parse_complex, parse_list, parse_point};
use crate::{Cli, ClosureArgs, Command, Outcome, UsageError};

fn emit(cli: &Cli, record: Value, human: impl FnOnce() -> String) {
    if cli.json {
        println!("{record}");
    } else {
        println!("{}", human());
    }
}

fn read(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read `{}`: {e}", path.display())))
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Verified
    } else {
        Outcome::Failed
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, UsageError> {
    match &cli.command {
        Command::Bracket { f, g, canonical } => run_bracket(cli, f, g, *canonical),
        Command::Reduce { expr, keep_b_trace } => run_reduce(cli, expr, *keep_b_trace),
        Command::Closure { closure, targets, cert_dir } => run_closure(closure, targets.as_deref(), cert_dir.as_deref()),
        Command::Membership { closure, target, cert_out } => run_membership(cli, closure, target, cert_out.as_deref()),
        Command::Replay { cert, generators, preset, preset_cap, mode, claim } => {
            let gens = generator_set(generators.as_deref(), preset.as_deref(), *preset_cap)?;
            run_replay(cli, cert, &gens, mode, claim.as_deref())
        }
        Command::Wilson { alphas, betas } => run_wilson(cli, alphas, betas),
        Command::Flow { kind, t, point } => run_flow(cli, kind, t, point),
        Command::Verify { suite, n, samples, seed, tol, threads, budget, slack, report } => {
            let cfg = RunConfig {
                seed: *seed,
                threads: *threads,
                n: *n,
                samples: *samples,
                tol: *tol,
                budget: *budget,
                slack: *slack,
            };
            run_verify(suite, &cfg, report.as_deref())
        }
        Command::Coverage { n, budget, slack } => run_coverage(cli, *n, *budget, *slack),
    }
}

fn run_bracket(cli: &Cli, f: &str, g: &str, canonical: Option<usize>) -> Result<Outcome, UsageError> {
    let (fs, gs, out) = match canonical {
        Some(n) => {
            let (a, b) = (parse_canonical(f, n)?, parse_canonical(g, n)?);
            let r = canonical_bracket(n, &a, &b)?;
            (poly_to_string(&a), poly_to_string(&b), poly_to_string(&r))
        }
        None => {
            let (a, b) = (parse(f)?, parse(g)?);
            let r = bracket(&a, &b);
            (a.to_string(), b.to_string(), r.to_string())
        }
    };
    emit(cli, json!({"record": "bracket", "f": fs, "g": gs, "value": out}), || out.clone());
    Ok(Outcome::Verified)
}

fn run_reduce(cli: &Cli, expr: &str, keep_b_trace: bool) -> Result<Outcome, UsageError> {
    let reducer = Reducer::new();
    let f = cmtrace::expr::parse_with_commutator(expr, &|s| reducer.trace_with_commutator(s, keep_b_trace))?;
    let r = reducer.reduce(&f);
    let record = json!({
        "record": "reduce",
        "input": expr,
        "value": r.value.to_string(),
        "leading": r.leading.to_string(),
        "corrections": r.corrections.to_string(),
        "normal": cmtrace::is_normal(&r.value),
    });
    emit(cli, record, || r.value.to_string());
    Ok(Outcome::Verified)
}

fn generator_set(file: Option<&Path>, preset: Option<&str>, cap: usize) -> Result<GeneratorSet, UsageError> {
    let set = match (file, preset) {
        (Some(path), _) => GeneratorSet::parse_file(&read(path)?)?,
        (None, Some(name)) => {
            GeneratorSet::preset(name, cap).ok_or_else(|| UsageError(format!("unknown preset `{name}` (expected F or D)")))?
        }
        (None, None) => return Err(UsageError("give --generators FILE or --preset NAME".into())),
    };
    if set.is_empty() {
        return Err(UsageError("no generators".into()));
    }
    Ok(set)
}

fn build(args: &ClosureArgs) -> Result<(ClosureState<TraceAlgebra>, GeneratorSet, Mode), UsageError> {
    let gens = generator_set(args.generators.as_deref(), args.preset.as_deref(), args.preset_cap)?;
    let mode: Mode = args.mode.parse().map_err(UsageError)?;
    if args.threads == 0 {
        return Err(UsageError("--threads must be positive".into()));
    }
    let mut config = ClosureConfig::new(args.budget, args.slack);
    config.seed = args.seed;
    config.threads = Some(args.threads);
    config.dimension_cap = args.dimension_cap;
    let state = closure(TraceAlgebra::new(mode), &gens.named(), config)?;
    Ok((state, gens, mode))
}

fn closure_record(state: &ClosureState<TraceAlgebra>, args: &ClosureArgs, mode: Mode, gens: &GeneratorSet) -> Value {
    let by_degree: Map<String, Value> =
        state.dimension_by_degree().into_iter().map(|(d, k)| (d.to_string(), json!(k))).collect();
    let s = state.stats();
    json!({
        "record": "closure",
        "mode": mode.to_string(),
        "budget": args.budget,
        "slack": args.slack,
        "seed": args.seed,
        "threads": args.threads,
        "generators": gens.elements.iter().map(|g| json!({"name": g.name, "value": g.value.to_string(), "complete": g.complete})).collect::<Vec<_>>(),
        "dimension": state.dimension(),
        "dimension_by_degree": by_degree,
        "pairs_bracketed": s.pairs_bracketed,
        "pairs_pruned_by_degree": s.pairs_pruned_by_degree,
        "pairs_in_full_components": s.pairs_in_full_components,
    })
}

/// Membership verdict with the certificate replayed against the target.
fn decide(state: &ClosureState<TraceAlgebra>, target: &TracePolynomial) -> Result<Option<std::sync::Arc<Certificate>>, UsageError> {
    let reduced = match state.algebra().mode() {
        Mode::RankOne => state.algebra().reducer().reduce_poly(target),
        Mode::Ambient => target.clone(),
    };
    match state.membership(&reduced)? {
        Membership::Member(cert) => Ok((state.replay(&cert).as_ref() == Ok(&reduced)).then_some(cert)),
        Membership::NotFound => Ok(None),
    }
}

fn target_record(name: &str, target: &TracePolynomial, cert: &Option<std::sync::Arc<Certificate>>) -> Value {
    let mut rec = json!({"record": "target", "name": name, "target": target.to_string(), "member": cert.is_some()});
    if let Some(c) = cert {
        rec["certificate_nodes"] = json!(c.node_count());
        rec["certificate"] = json!(c.to_text());
    }
    rec
}

fn run_closure(args: &ClosureArgs, targets: Option<&Path>, cert_dir: Option<&Path>) -> Result<Outcome, UsageError> {
    let targets = targets.map(|p| read(p).and_then(|t| Ok(GeneratorSet::parse_file(&t)?))).transpose()?;
    let (state, gens, mode) = build(args)?;
    println!("{}", closure_record(&state, args, mode, &gens));
    let replay = state.verify_certificates();
    println!("{}", json!({"record": "basis-replay", "pass": replay.is_ok(), "basis": state.dimension()}));
    if let Some(dir) = cert_dir {
        fs::create_dir_all(dir).map_err(|e| UsageError(format!("cannot create `{}`: {e}", dir.display())))?;
    }
    let mut found = 0;
    let mut total = 0;
    for (k, t) in targets.iter().flat_map(|s| s.elements.iter()).enumerate() {
        total += 1;
        let cert = decide(&state, &t.value)?;
        if let (Some(dir), Some(c)) = (cert_dir, &cert) {
            let path = dir.join(format!("{k}.cert"));
            fs::write(&path, c.to_text()).map_err(|e| UsageError(format!("cannot write `{}`: {e}", path.display())))?;
        }
        found += cert.is_some() as usize;
        println!("{}", target_record(&t.name, &t.value, &cert));
    }
    let by_degree: Vec<String> = state.dimension_by_degree().iter().map(|(d, k)| format!("{d}:{k}")).collect();
    eprintln!(
        "closure ({mode}, budget {} + slack {}): dimension {} [{}]; basis replay {}; targets {found}/{total} members",
        args.budget,
        args.slack,
        state.dimension(),
        by_degree.join(" "),
        if replay.is_ok() { "ok" } else { "FAILED" },
    );
    Ok(verdict(replay.is_ok() && found == total))
}

fn run_membership(cli: &Cli, args: &ClosureArgs, target: &str, cert_out: Option<&Path>) -> Result<Outcome, UsageError> {
    let t = parse(target)?;
    let (state, _, _) = build(args)?;
    let cert = decide(&state, &t)?;
    if let (Some(path), Some(c)) = (cert_out, &cert) {
        fs::write(path, c.to_text()).map_err(|e| UsageError(format!("cannot write `{}`: {e}", path.display())))?;
    }
    let mut record = target_record(target, &t, &cert);
    record["dimension"] = json!(state.dimension());
    record["seed"] = json!(args.seed);
    emit(cli, record, || match &cert {
        Some(c) => format!("member ({} certificate nodes)\n{}", c.node_count(), c.to_text().trim_end()),
        None => "not found".to_string(),
    });
    Ok(verdict(cert.is_some()))
}

fn run_replay(cli: &Cli, cert: &Path, gens: &GeneratorSet, mode: &str, claim: Option<&str>) -> Result<Outcome, UsageError> {
    let c = Certificate::parse(&read(cert)?)?;
    let mode: Mode = mode.parse().map_err(UsageError)?;
    let alg = TraceAlgebra::new(mode);
    let leaves = gens
        .named()
        .into_iter()
        .map(|(name, v)| {
            let v = match mode {
                Mode::RankOne => alg.reducer().reduce_poly(&v),
                Mode::Ambient => v,
            };
            (name, v)
        })
        .collect();
    let value = cmtrace::closure::replay(&alg, &leaves, &c)?;
    let matches = match claim {
        Some(src) => {
            let mut want = parse(src)?;
            if mode == Mode::RankOne {
                want = alg.reducer().reduce_poly(&want);
            }
            Some(check_certificate(&alg, &leaves, &c, &want).is_ok())
        }
        None => None,
    };
    let record = json!({"record": "replay", "value": value.to_string(), "nodes": c.node_count(), "matches_claim": matches});
    emit(cli, record, || match matches {
        Some(true) => format!("{value}\nclaim verified"),
        Some(false) => format!("{value}\nclaim MISMATCH"),
        None => value.to_string(),
    });
    Ok(verdict(matches != Some(false)))
}

fn point_record(p: &MatrixPair) -> Value {
    json!({"n": p.n(), "x": matrix_json(&p.x), "y": matrix_json(&p.y), "rank_one_ratio": p.rank_one_ratio()})
}

fn point_text(p: &MatrixPair) -> String {
    format!("X =\n{}\nY =\n{}\nrank ratio of [X,Y] + id: {:.3e}", matrix_text(&p.x), matrix_text(&p.y), p.rank_one_ratio())
}

fn run_wilson(cli: &Cli, alphas: &str, betas: &str) -> Result<Outcome, UsageError> {
    let p = cmtrace::numerics::wilson_point(&parse_list(alphas)?, &parse_list(betas)?)?;
    let mut record = point_record(&p);
    record["record"] = json!("wilson");
    record["certified"] = json!(p.rank_one);
    emit(cli, record, || format!("{}\ncertified: {}", point_text(&p), p.rank_one));
    Ok(verdict(p.rank_one))
}

fn run_flow(cli: &Cli, kind: &str, t: &str, point: &Path) -> Result<Outcome, UsageError> {
    let kind: FlowKind = kind.parse().map_err(UsageError)?;
    let t = parse_complex(t)?;
    let p = parse_point(&read(point)?)?;
    let q = apply_flow(&FlowSpec { kind, t }, &p);
    let drift = (q.commutator() - p.commutator()).norm();
    let mut record = point_record(&q);
    record["record"] = json!("flow");
    record["kind"] = json!(kind.to_string());
    record["t"] = json!([t.re, t.im]);
    record["commutator_drift"] = json!(drift);
    emit(cli, record, || format!("{}\n|[X,Y] drift|: {drift:.3e}", point_text(&q)));
    Ok(Outcome::Verified)
}

fn run_verify(suite: &str, cfg: &RunConfig, report: Option<&Path>) -> Result<Outcome, UsageError> {
    let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse::<Suite>().map_err(UsageError)?] };
    if cfg.threads == 0 || cfg.n == Some(0) || cfg.samples == Some(0) || cfg.tol.is_some_and(|t| !(t > 0.0)) {
        return Err(UsageError("numeric flags must be positive".into()));
    }
    let mut records = String::new();
    let mut summaries = Vec::new();
    let mut ok = true;
    for s in suites {
        let r = run_suite(s, cfg);
        ok &= r.passed();
        summaries.push(r.summary());
        let lines = r.json_lines();
        if report.is_none() {
            print!("{lines}");
        }
        records.push_str(&lines);
    }
    if let Some(path) = report {
        fs::write(path, &records).map_err(|e| UsageError(format!("cannot write `{}`: {e}", path.display())))?;
        println!("{}", summaries.join("\n"));
    } else {
        eprintln!("{}", summaries.join("\n"));
    }
    Ok(verdict(ok))
}

fn run_coverage(cli: &Cli, n: usize, budget: usize, slack: usize) -> Result<Outcome, UsageError> {
    if n == 0 || budget == 0 {
        return Err(UsageError("--n and --budget must be positive".into()));
    }
    let (report, _) = monomial_coverage(n, budget, slack)?;
    let missing: Vec<String> = report.missing.iter().map(|m| m.to_string()).collect();
    let record = json!({
        "record": "coverage",
        "n": n,
        "budget": budget,
        "slack": slack,
        "dimension": report.dimension,
        "members": report.members.len(),
        "missing": missing,
    });
    emit(cli, record, || {
        let mut s = format!(
            "n = {n}, budget {budget} + slack {slack}: dimension {}, {}/{} monomials covered",
            report.dimension,
            report.members.len(),
            report.members.len() + report.missing.len()
        );
        if !missing.is_empty() {
            s.push_str(&format!("\nmissing: {}", missing.join(", ")));
        }
        s
    });
    Ok(verdict(report.complete()))
}
