use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn cmtrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmtrace")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cmtrace-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn bracket_prints_the_bracket() {
    let o = cmtrace(&["bracket", "tr(X^3)", "tr(Y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3*tr(X^2)");
    let o = cmtrace(&["bracket", "--canonical", "2", "x1^2", "y1^2"]);
    assert_eq!(stdout(&o).trim(), "4*x1*y1");
}

#[test]
fn reduce_reports_leading_part_and_corrections() {
    let o = cmtrace(&["reduce", "tr(X*Y*X*Y)"]);
    assert_eq!(stdout(&o).trim(), "tr(X^2*Y^2) + (1/2)*n^2 - (1/2)*n");
    let o = cmtrace(&["--json", "reduce", "tr(X*Y*X*Y)"]);
    let r = &records(&o)[0];
    assert_eq!(r["leading"], "tr(X^2*Y^2)");
    assert_eq!(r["corrections"], "(1/2)*n^2 - (1/2)*n");
    assert_eq!(r["normal"], true);
}

#[test]
fn b_slot_and_expansion_agree() {
    for src in ["tr(X*Y*B)", "tr(X^2*Y^2*B)", "tr(Y*B*X^2)", "tr(B^2)"] {
        let kept = cmtrace(&["reduce", "--keep-b-trace", src]);
        let expanded = cmtrace(&["reduce", src]);
        assert_eq!(kept.status.code(), Some(0), "{src}");
        assert_eq!(stdout(&kept), stdout(&expanded), "{src}");
    }
    assert_eq!(stdout(&cmtrace(&["reduce", "tr(X*Y*B)", "--keep-b-trace"])).trim(), "(1/2)*n^2 - (1/2)*n");
}

#[test]
fn emitted_expressions_parse_back() {
    for args in [vec!["reduce", "tr(X^2*Y*X*Y^2*X)"], vec!["bracket", "tr(X^2*Y)", "tr(X*Y^3)"]] {
        let text = stdout(&cmtrace(&args));
        let value = cmtrace::parse(text.trim()).unwrap();
        assert_eq!(value.to_string(), text.trim());
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(cmtrace(&["verify", "--suite", "none"]).status.code(), Some(2));
    assert_eq!(cmtrace(&["bracket", "tr(X", "tr(Y)"]).status.code(), Some(2));
    assert_eq!(cmtrace(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cmtrace(&["flow", "--kind", "spin", "--t", "1", "--point", "/nonexistent"]).status.code(), Some(2));
}

#[test]
fn verify_table_suite() {
    let o = cmtrace(&["verify", "--suite", "table64"]);
    assert_eq!(o.status.code(), Some(0));
    let rs = records(&o);
    assert_eq!(rs.len(), 10);
    assert!(rs.iter().all(|r| r["pass"] == true && r["seed"].is_u64() && r["threads"] == 1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("table64: PASS 10/10"));
}

#[test]
fn verify_flows_reports_small_residuals() {
    let o = cmtrace(&["verify", "--suite", "flows", "--n", "4", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let worst = records(&o).iter().filter_map(|r| r["residual"].as_f64()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = scratch("determinism");
    let run = |name: &str| {
        let path = dir.join(name);
        let args = ["verify", "--suite", "wilson", "--seed", "7", "--threads", "1", "--samples", "10", "--report"];
        let o = cmtrace(&[&args[..], &[path.to_str().unwrap()]].concat());
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.jsonl"), run("b.jsonl"));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn membership_certificate_replays() {
    let dir = scratch("membership");
    let cert = dir.join("e.cert");
    let o = cmtrace(&[
        "membership", "--preset", "F", "--budget", "4", "--mode", "ambient", "--target", "tr(X*Y)^2", "--cert-out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let ok = cmtrace(&["replay", cert.to_str().unwrap(), "--preset", "F", "--claim", "tr(X*Y)^2"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("claim verified"));
    let bad = cmtrace(&["replay", cert.to_str().unwrap(), "--preset", "F", "--claim", "tr(X*Y)"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn closure_reports_non_members_with_exit_one() {
    let dir = scratch("closure");
    let gens = dir.join("gens.txt");
    let targets = dir.join("targets.txt");
    std::fs::write(&gens, "p := tr(X^2)\nq := tr(Y^2)\n").unwrap();
    std::fs::write(&targets, "# sl2 triple\ntr(X*Y)\nab := tr(X)*tr(Y)\n").unwrap();
    let o = cmtrace(&[
        "closure", "--generators", gens.to_str().unwrap(), "--budget", "3", "--targets", targets.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let rs = records(&o);
    assert_eq!(rs[0]["record"], "closure");
    assert_eq!(rs[0]["dimension"], 3);
    let verdicts: Vec<(String, bool)> = rs
        .iter()
        .filter(|r| r["record"] == "target")
        .map(|r| (r["name"].as_str().unwrap().to_string(), r["member"].as_bool().unwrap()))
        .collect();
    assert_eq!(verdicts, vec![("tr(X*Y)".to_string(), true), ("ab".to_string(), false)]);
}

#[test]
fn wilson_and_flow() {
    let o = cmtrace(&["--json", "wilson", "--alphas", "0,1,2i", "--betas", "1,-1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &records(&o)[0];
    assert_eq!(r["certified"], true);
    assert_eq!(r["n"], 3);

    let dir = scratch("flow");
    let point = dir.join("point.txt");
    std::fs::write(&point, "n = 3\nalphas = 0 1 0,2\nbetas = 1 -1 0\n").unwrap();
    for kind in ["y_shift_xk(2)", "x_shift_yk(1)", "y_shift_trx_id", "x_shift_tryj(2)", "scale"] {
        let o = cmtrace(&["--json", "flow", "--kind", kind, "--t", "0.3-0.2i", "--point", point.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{kind}");
        let r = &records(&o)[0];
        assert!(r["commutator_drift"].as_f64().unwrap() < 1e-12, "{kind}");
        assert!(r["rank_one_ratio"].as_f64().unwrap() < 1e-9, "{kind}");
    }
}

#[test]
fn config_file_supplies_flags() {
    let dir = scratch("config");
    let conf = dir.join("run.conf");
    std::fs::write(&conf, "# defaults\nsuite = lemma63\nseed = 3\n").unwrap();
    let o = cmtrace(&["verify", "--config", conf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rs = records(&o);
    assert!(rs.iter().all(|r| r["suite"] == "lemma63" && r["seed"] == 3));
}

#[test]
fn coverage_of_the_shear_closure() {
    let o = cmtrace(&["coverage", "--n", "2", "--budget", "4", "--slack", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("monomials covered"));
}
