use std::fs;
use std::path::PathBuf;

use gsubmod::scenario::{parse_scenario, run, Report, Scenario};
use gsubmod::{Caps, Error};
use serde_json::{json, Value};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn load(name: &str) -> Scenario {
    parse_scenario(&fs::read_to_string(scenario_dir().join(name)).unwrap()).unwrap()
}

fn run_named(name: &str) -> Report {
    let s = load(name);
    run(&s, &s.effective_caps(|_| None).unwrap()).unwrap()
}

#[test]
fn every_shipped_scenario_runs_clean() {
    let mut count = 0;
    for entry in fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let s = parse_scenario(&fs::read_to_string(&path).unwrap()).unwrap();
            let r = run(&s, &Caps::default()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(r.violations, 0, "{}", path.display());
            assert_eq!(r.tasks.len(), s.all_tasks().len());
            count += 1;
        }
    }
    assert!(count >= 6);
}

#[test]
fn reports_are_deterministic() {
    for name in ["growth_d5.json", "cyclic_doubling.json", "identity_atom.json"] {
        let a = run_named(name).to_json_without_timing();
        let b = run_named(name).to_json_without_timing();
        assert_eq!(a, b, "{name}");
        assert!(a["tasks"][0].get("elapsed_ms").is_none());
    }
}

#[test]
fn kneser_scenario_values() {
    let r = run_named("kneser_s4.json");
    let by_task = |t: &str| &r.tasks.iter().find(|o| o.task == t).unwrap().result;
    assert_eq!(by_task("mu")["mu"], json!("1/6"));
    assert_eq!(by_task("stabilizer")["order"], json!(6));
    assert_eq!(by_task("orbit_bounds")["exact"], json!(2));
    let k = by_task("kneser");
    assert_eq!(k["conclusion_holds"], json!(false));
    assert_eq!(k["is_theorem"], json!(false));
    assert_eq!(r.group_order, 24);
}

#[test]
fn affine_scenario_values() {
    let r = run_named("affine_f7.json");
    let k = &r.tasks[0].result;
    let ay = k["witnesses"]["AY"]["value"].clone();
    assert_eq!(ay, json!([1, 2, 6]));
    assert_eq!(r.tasks[1].result["order"], json!(3));
}

#[test]
fn sigma_scenario_atoms_are_minimal_orbits() {
    let r = run_named("sigma_fragments.json");
    assert_eq!(r.tasks[0].result["orbits"], json!([[0, 1, 2], [3, 4], [5]]));
    let cut = &r.tasks[1].result["result"];
    assert_eq!(cut["atoms"], json!([[5]]));
    assert_eq!(cut["fragment_count"], json!(7));
    assert_eq!(r.tasks[2].result["result"]["fragments"], json!([[5]]));
    assert_eq!(r.tasks[3].result["result"]["fragment_count"], json!(7));
}

#[test]
fn caps_come_from_scenario_then_env() {
    let text = r#"{"group": "symmetric(4)", "caps": {"group_order": 10}, "tasks": [{"task": "orbits"}]}"#;
    let s = parse_scenario(text).unwrap();
    let caps = s.effective_caps(|_| None).unwrap();
    assert_eq!(caps.group_order, 10);
    assert!(matches!(run(&s, &caps), Err(Error::Capacity { .. })));
    let raised = s.effective_caps(|k| (k == "GSUBMOD_CAP_GROUP_ORDER").then(|| "24".into())).unwrap();
    assert_eq!(raised.group_order, 24);
    assert!(run(&s, &raised).is_ok());
    assert!(s.effective_caps(|k| (k == "GSUBMOD_CAP_GROUP_ORDER").then(|| "many".into())).is_err());
}

#[test]
fn scenarios_round_trip_through_serde() {
    for name in ["kneser_s4.json", "linear_swap.json", "sigma_fragments.json"] {
        let s = load(name);
        let back: Scenario = serde_json::from_value(serde_json::to_value(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}

#[test]
fn validation_names_the_problem() {
    let cases = [
        (r#"{"group": "cyclic(4)", "tasks": [{"task": "kneser", "a": "Y", "y": "Y"}], "sets": {"Y": {"points": [0]}}}"#, "element set"),
        (r#"{"group": "cyclic(4)", "tasks": [{"task": "lattice_minimize", "a": "A"}], "sets": {"A": "all_elements"}}"#, "representation"),
        (r#"{"group": "cyclic(4)", "tasks": [{"task": "mu", "y": "Y"}], "sets": {"Y": {"points": [9]}}}"#, "9"),
        (r#"{"group": "cyclic(4)", "tasks": [{"task": "orbits"}], "params": {"lambda": "0.5"}}"#, "0.5"),
    ];
    for (text, needle) in cases {
        let err = parse_scenario(text).and_then(|s| run(&s, &Caps::default()).map(|_| ()));
        match err {
            Err(e @ (Error::Validation(_) | Error::Domain(_) | Error::Structural(_))) => {
                assert!(e.to_string().contains(needle), "{e} should mention {needle}")
            }
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn report_serializes_with_rationals_as_strings() {
    let r = run_named("identity_atom.json");
    let v: Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["tasks"][0]["result"]["mu"], json!("1/2"));
    assert_eq!(v["violations"], json!(0));
}
