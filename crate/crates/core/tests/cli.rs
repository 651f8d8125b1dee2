use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gsubmod"));
    for (k, _) in std::env::vars() {
        if k.starts_with("GSUBMOD_CAP_") {
            c.env_remove(k);
        }
    }
    c
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn with_stdin(mut c: Command, input: &str) -> Output {
    let mut child = c.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn run_succeeds_and_writes_out() {
    let o = bin().arg("run").arg(scenario("kneser_s4.json")).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["group_order"], 24);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = bin().arg("run").arg(scenario("sigma_fragments.json")).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved["tasks"][1]["result"]["result"]["atoms"], serde_json::json!([[5]]));
}

#[test]
fn run_reads_stdin() {
    let mut c = bin();
    c.args(["run", "-"]);
    let o = with_stdin(c, r#"{"group": "dihedral(4)", "task": {"task": "orbits"}}"#);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&o)["tasks"][0]["result"]["orbits"], serde_json::json!([[0, 1, 2, 3]]));
}

#[test]
fn usage_and_validation_errors_exit_2() {
    let cases = [
        ("{\"group\": \"cyclic(3)\",\n \"tasks\": [}", "line 2"),
        (r#"{"group": "cyclic(3)", "tasks": [{"task": "mu", "y": "Y"}]}"#, "`Y`"),
        (r#"{"group": "cyclic(3)", "params": {"alpha": "0.5"}, "tasks": [{"task": "orbits"}]}"#, "0.5"),
        (
            r#"{"group": "cyclic(3)", "representation": {"generator_images": {"p": 3, "dim": 2, "matrices": [[[0, 1], [1, 0]]]}}, "tasks": [{"task": "orbits"}]}"#,
            "homomorphism",
        ),
        (r#"{"group": "cyclic(3)", "action": {"table": [[0, 1, 2], [1, 0, 2], [0, 1, 2]]}, "tasks": [{"task": "orbits"}]}"#, "(gh)"),
    ];
    for (text, needle) in cases {
        let mut c = bin();
        c.args(["run", "-"]);
        let o = with_stdin(c, text);
        assert_eq!(code(&o), 2, "{text}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{} should mention {needle}", stderr(&o));
    }
    let o = bin().args(["run", "/nonexistent/scenario.json"]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = bin().args(["search", "--family", "klein:4", "--predicate", "kneser"]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = bin().args(["search", "--family", "symmetric:4", "--predicate", "taod", "--budget", "5"]).output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Abelian"));
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn capacity_errors_exit_3() {
    let mut c = bin();
    c.args(["run", "-"]);
    let o = with_stdin(c, r#"{"group": "symmetric(9)", "tasks": [{"task": "orbits"}]}"#);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let o = bin().env("GSUBMOD_CAP_GROUP_ORDER", "10").arg("run").arg(scenario("kneser_s4.json")).output().unwrap();
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let o = bin().env("GSUBMOD_CAP_GROUP_ORDER", "zero").arg("run").arg(scenario("kneser_s4.json")).output().unwrap();
    assert_eq!(code(&o), 2);
}

fn search(args: &[&str]) -> Value {
    let o = bin().arg("search").args(args).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    json(&o)
}

#[test]
fn kneser_search_finds_counterexamples_and_resumes() {
    let full = search(&["--family", "symmetric:4", "--predicate", "kneser", "--budget", "60", "--seed", "5"]);
    assert_eq!(full["instances"], 60);
    assert_eq!(full["violations"], 0);
    assert!(full["hits"].as_u64().unwrap() > 0);
    assert_eq!(full["next_cursor"], 60);
    let tail = search(&["--family", "symmetric:4", "--predicate", "kneser", "--budget", "30", "--seed", "5", "--cursor", "30"]);
    let later: Vec<&Value> = full["records"].as_array().unwrap().iter().filter(|r| r["cursor"].as_u64().unwrap() >= 30).collect();
    let resumed: Vec<&Value> = tail["records"].as_array().unwrap().iter().collect();
    assert_eq!(later, resumed);
}

#[test]
fn affine_five_has_no_trivial_stabilizer() {
    let v = search(&["--family", "affine:5", "--predicate", "kneser_trivial_stabilizer", "--budget", "300"]);
    assert_eq!(v["hits"], 0);
    assert!(v["small_sumsets"]["count"].as_u64().unwrap() > 0);
    assert!(v["small_sumsets"]["min_stabilizer_order"].as_u64().unwrap() >= 2);
}

#[test]
fn report_renders_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let run_out = dir.path().join("run.json");
    let o = bin().arg("run").arg(scenario("growth_d5.json")).arg("--out").arg(&run_out).output().unwrap();
    assert_eq!(code(&o), 0);
    let o = bin().args(["report", "--format", "csv"]).arg(&run_out).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap().get(1), Some("task"));
    assert_eq!(rows.records().count(), 8);

    let o = bin().args(["report"]).arg(&run_out).output().unwrap();
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&run_out).unwrap()).unwrap();
    assert_eq!(json(&o), original);

    let search_out = dir.path().join("search.json");
    let o = bin()
        .args(["search", "--family", "dihedral:5", "--predicate", "kneser", "--budget", "40", "--out"])
        .arg(&search_out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = bin().args(["report", "--format", "csv"]).arg(&search_out).output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("cursor,outcome,shape"));

    let o = bin().args(["report", "--format", "xml"]).arg(&run_out).output().unwrap();
    assert_eq!(code(&o), 2);
}
