use std::path::PathBuf;
use std::process::{Command, Output};

use desv_core::io::VerdictDocument;

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("models")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn desv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_desv")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn diagnosability_failure_prints_the_fault_and_the_cycle() {
    let o = desv(&["verify", &model("s3"), "--property", "diag"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("(f,-) -> (q5,"), "{text}");
    assert!(text.contains("(u,-) -> (q5,"), "{text}");
    assert!(text.contains("left projection:  e1 e2 f u"));
}

#[test]
fn holding_property_exits_zero() {
    let o = desv(&["verify", &model("s5"), "--property", "infso"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("infso: holds"));
}

#[test]
fn input_and_usage_errors_exit_two() {
    assert_eq!(desv(&["verify", "missing.json", "--property", "cso"]).status.code(), Some(2));
    assert_eq!(desv(&["verify", &model("s2"), "--property", "cso", "--bogus"]).status.code(), Some(2));
    assert_eq!(desv(&["verify", &model("s2"), "--property", "kso"]).status.code(), Some(2));
    assert_eq!(desv(&["verify", &model("s2"), "--property", "diag", "--k", "2"]).status.code(), Some(2));
    assert_eq!(desv(&["oracle", &model("s2"), "--property", "cso", "--bound", "0"]).status.code(), Some(2));
    let o = desv(&["gen", "--states", "0", "--events", "2", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn json_verdicts_parse_and_carry_witnesses_exactly_when_failing() {
    for (m, p) in [("s2", "star-sd"), ("s3", "pred"), ("s5", "infso"), ("s7", "diag")] {
        let o = desv(&["verify", &model(m), "--property", p, "--json"]);
        let doc: VerdictDocument = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(doc.holds, doc.witness.is_none());
        assert_eq!(o.status.code(), Some(if doc.holds { 0 } else { 1 }));
        assert!(doc.timing.is_none());
    }
    let o = desv(&["verify", &model("s2"), "--property", "skso", "--k", "5", "--json", "--timing"]);
    let doc: VerdictDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.parameters.k, Some(5));
    assert!(doc.timing.is_some());
}

#[test]
fn all_properties_reports_each_one() {
    let o = desv(&["verify", &model("s2"), "--all-properties", "--k", "2", "--json"]);
    let docs: Vec<VerdictDocument> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(docs.len(), 12);
    assert_eq!(o.status.code(), Some(1));
    let o = desv(&["verify", &model("s2"), "--all-properties"]);
    assert_eq!(stdout(&o).lines().filter(|l| !l.starts_with(' ')).count(), 10);
}

#[test]
fn build_writes_dot_and_json() {
    let dir = std::env::temp_dir().join(format!("desv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dot = dir.join("obs.dot");
    let o = desv(&["build", &model("s2"), "--artifact", "observer", "-o", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("\"{q1,q2}\" -> \"∅\" [label=\"a\"];"));

    let json = dir.join("gtp.json");
    let o = desv(&["build", &model("s7"), "--artifact", "gtp", "-o", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 6);

    let o = desv(&["build", &model("s2"), "--artifact", "twin-plant"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_exit_codes() {
    let o = desv(&["oracle", &model("s2"), "--property", "star-sd", "--bound", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("sequence: a b"));
    let o = desv(&["oracle", &model("s5"), "--property", "infso", "--bound", "6"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn oracle_respects_the_budget_variable() {
    let o = Command::new(env!("CARGO_BIN_EXE_desv"))
        .args(["oracle", &model("s3"), "--property", "diag", "--bound", "40"])
        .env("DESV_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DESV_BUDGET"));
}

#[test]
fn gen_is_deterministic_and_parses() {
    let args = ["gen", "--states", "5", "--events", "4", "--seed", "11", "--live", "--divergence-free"];
    let a = desv(&args);
    let b = desv(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let m = desv_core::io::parse_model(&stdout(&a)).unwrap();
    assert!(m.lfsa.is_live() && m.lfsa.is_divergence_free());
}
