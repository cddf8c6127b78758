use std::path::PathBuf;
use std::process::{Command, Output};

use qdouble::drinfeld::{build_cotangent_double, BialgebroidInstance};
use qdouble::dsl::{parse, StructureFile};

fn sample(name: &str) -> String {
    format!("{}/../../samples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn qdouble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdouble")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("structured output is JSON")
}

const SAMPLES: &[&str] = &[
    "heisenberg.qd",
    "action.qd",
    "aff_bialgebra.qd",
    "tangent_double.qd",
    "tangent_double_perturbed.qd",
    "triple.qd",
];

#[test]
fn every_sample_parses() {
    for s in SAMPLES {
        let out = qdouble(&["parse-check", &sample(s)]);
        assert_eq!(code(&out), 0, "{s}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn heisenberg_is_homological() {
    let out = qdouble(&["check-q2", &sample("heisenberg.qd"), "--format", "structured"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["checks"][0]["name"], "Q");
    assert_eq!(v["checks"][0]["passed"], true);
}

#[test]
fn reorder_warnings_are_opt_in() {
    let quiet = qdouble(&["parse-check", &sample("heisenberg.qd")]);
    assert!(!stdout(&quiet).contains("warning"));
    let loud = qdouble(&["parse-check", &sample("heisenberg.qd"), "--warn-reorder"]);
    assert!(stdout(&loud).contains("warning: 10:13: odd factors xi2*xi1"), "{}", stdout(&loud));
}

#[test]
fn derived_brackets_of_the_action_algebroid() {
    let out = qdouble(&["derive-brackets", &sample("action.qd")]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("rho(e1)(x) = -x"), "{text}");
    assert!(text.contains("rho(e2)(x) = 1"), "{text}");
    assert!(text.contains("[e1,e2] = (1)*e2"), "{text}");
}

#[test]
fn commutativity_passes_and_fails() {
    assert_eq!(code(&qdouble(&["check-commutativity", &sample("tangent_double.qd")])), 0);
    assert_eq!(code(&qdouble(&["check-double", &sample("tangent_double_perturbed.qd")])), 1);
}

#[test]
fn all_conditions_agree_with_commutativity() {
    let pass = qdouble(&["check-double", "--all", &sample("tangent_double.qd"), "--format", "structured"]);
    assert_eq!(code(&pass), 0);
    let names: Vec<String> =
        json(&pass)["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect();
    assert_eq!(names, ["commutativity", "condition I", "condition II", "condition III"]);
    let fail = qdouble(&["check-double", "--all", &sample("tangent_double_perturbed.qd"), "--format", "structured"]);
    assert_eq!(code(&fail), 1);
    let v = json(&fail);
    assert_eq!(v["checks"][0]["passed"], false);
    assert!(v["checks"][0]["residuals"].as_array().unwrap().iter().all(|r| r["residual"].is_string()));
}

#[test]
fn build_double_emits_the_pair() {
    let path = tmp("built.qd");
    let out = qdouble(&["build-double", &sample("aff_bialgebra.qd"), "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let emitted = parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let input = parse(&std::fs::read_to_string(sample("aff_bialgebra.qd")).unwrap()).unwrap();
    let b = BialgebroidInstance::from_fibre_product(input.field("QE").unwrap(), input.field("QEs").unwrap()).unwrap();
    let (pair, verdict) = build_cotangent_double(&b).unwrap();
    assert!(verdict.passed());
    assert_eq!(emitted, StructureFile::from_pair(&pair));
    assert_eq!(code(&qdouble(&["check-double", "--all", path.to_str().unwrap()])), 0);
}

#[test]
fn reverse_then_dualize() {
    let reversed = tmp("reversed.qd");
    let dual = tmp("dual.qd");
    let out = qdouble(&[
        "reverse-parity",
        &sample("tangent_double.qd"),
        "--direction",
        "2",
        "--field",
        "Q1",
        "--out",
        reversed.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let f = parse(&std::fs::read_to_string(&reversed).unwrap()).unwrap();
    assert_eq!(f.chart.reversals(), &[1]);
    let out = qdouble(&["dualize", reversed.to_str().unwrap(), "--direction", "2", "--out", dual.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&qdouble(&["check-q2", dual.to_str().unwrap()])), 0);
    let both = qdouble(&["reverse-parity", &sample("tangent_double.qd"), "--direction", "2"]);
    assert_eq!(code(&both), 2);
}

#[test]
fn triple_product_commutes() {
    assert_eq!(code(&qdouble(&["check-nfold", &sample("triple.qd")])), 0);
    let out = qdouble(&["check-nfold", &sample("triple.qd"), "--fields", "Q3,Q2,Q1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn neighbor_graph_is_four_valent() {
    let out = qdouble(&["neighbors", "--format", "structured"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let nodes = v["data"]["nodes"].as_array().unwrap();
    let edges = v["data"]["edges"].as_array().unwrap();
    assert_eq!(nodes.len(), 12);
    for node in nodes {
        let id = node["id"].as_u64().unwrap();
        let valence = edges.iter().filter(|e| e["from"].as_u64() == Some(id) || e["to"].as_u64() == Some(id)).count();
        assert_eq!(valence, 4);
    }
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["check-double", "--all", "--format", "structured"],
        vec!["build-double"],
        vec!["neighbors", "--format", "structured"],
    ] {
        let mut args: Vec<String> = args.into_iter().map(str::to_string).collect();
        match args[0].as_str() {
            "check-double" => args.push(sample("tangent_double_perturbed.qd")),
            "build-double" => args.push(sample("aff_bialgebra.qd")),
            _ => {}
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(qdouble(&refs).stdout, qdouble(&refs).stdout);
    }
}

#[test]
fn input_errors_exit_with_two() {
    let out = qdouble(&["parse-check", &sample("missing.qd")]);
    assert_eq!(code(&out), 2);
    let bad = tmp("bad.qd");
    std::fs::write(&bad, "chart 1\n  base x\nfield X even\n  x <- x^\n").unwrap();
    let out = qdouble(&["check-q2", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.qd:4:10: syntax error"));
    let out = qdouble(&["check-double", &sample("tangent_double.qd"), "--q1", "Nope"]);
    assert_eq!(code(&out), 2);
    let out = qdouble(&["check-double", &sample("heisenberg.qd")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn readme_example_parses() {
    let readme = std::fs::read_to_string(format!("{}/../../README.md", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let block = readme.split("```\n").find(|b| b.starts_with("chart ")).expect("example block");
    let path = tmp("readme.qd");
    std::fs::write(&path, block).unwrap();
    let out = qdouble(&["parse-check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}
