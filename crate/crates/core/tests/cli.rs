use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_homogeneous"))
}

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../instances/{name}.json"))
}

fn run(args: &[&str], path: &Path) -> Output {
    bin().args(args).arg(path).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_reports_measure_and_phi() {
    let out = run(&["analyze", "--json", "-", "--quiet"], &instance("s3_natural"));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["measure"]["weights"], serde_json::json!(["1/3", "1/3", "1/3"]));
    let w = &v["phi"]["points"][0]["witness"];
    assert_eq!(w["beta"]["cycles"], "(0 1)");
    assert_eq!(w["sigma"]["cycles"], "(1 2)");
    assert_eq!((w["y"].as_u64(), w["image1"].as_u64(), w["image2"].as_u64()), (Some(1), Some(1), Some(2)));
}

#[test]
fn decompose_json_is_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = bin()
        .args(["decompose", "--quiet", "--json"])
        .arg(&target)
        .arg(instance("s3_regular"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let d = &v["decomposition"];
    assert_eq!(d["dims"].as_array().unwrap().len(), 4);
    assert_eq!(d["commutant_dim"], 6);
    assert_eq!(d["orbital_count"], 6);
    assert_eq!(d["multiplicity_free"], false);
}

#[test]
fn probe_exit_codes() {
    let cases = [
        ("s3_natural", "cor34", 3),
        ("s3_natural", "thm13", 3),
        ("s3_natural", "thm44", 3),
        ("s3_natural", "conjecture", 0),
        ("s3_regular", "conjecture", 3),
        ("q8_center_cosets", "cor34", 0),
        ("z6_regular", "thm44", 0),
    ];
    for (name, claim, code) in cases {
        let out = run(&["probe", "--quiet", "--claim", claim], &instance(name));
        assert_eq!(out.status.code(), Some(code), "{name} {claim}");
    }
}

#[test]
fn cor34_witness_in_report() {
    let out = run(&["probe", "--claim", "cor34", "--json", "-", "--quiet"], &instance("s3_natural"));
    let p = &json(&out)["probe"];
    assert_eq!(p["status"], "witness");
    assert_eq!(p["alpha"]["cycles"], "(1 2)");
    assert_eq!(p["x"], 0);
    assert_eq!(p["f_support"], serde_json::json!([1]));
}

#[test]
fn verify_suites_pass() {
    for name in ["z4_regular", "s3_natural", "d4_natural", "q8_center_cosets"] {
        let out = run(&["verify", "--quiet", "--suite", "all"], &instance(name));
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
    let out = run(&["verify", "--suite", "axioms", "--json", "-", "--quiet"], &instance("z4_regular"));
    let v = json(&out);
    assert_eq!(v["command"], "verify --suite axioms");
    assert_eq!(v["suites"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_and_parse_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"group": {"degree": 3, "generators": ["(0 1"]}, "action": "natural"}"#).unwrap();
    let out = run(&["analyze"], &bad);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("group.generators[0]"));

    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["analyze"], &bad).status.code(), Some(1));
    assert_eq!(run(&["analyze"], &dir.path().join("missing.json")).status.code(), Some(1));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "nope"], &instance("z4_regular")).status.code(), Some(1));
    assert_eq!(run(&["probe", "--claim", "cor34"], &instance("z2_two_orbits")).status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn seed_changes_nothing_structural() {
    let a = json(&run(&["decompose", "--json", "-", "--quiet", "--seed", "1"], &instance("d4_natural")));
    let b = json(&run(&["decompose", "--json", "-", "--quiet", "--seed", "2"], &instance("d4_natural")));
    assert_eq!(a["decomposition"]["dims"], b["decomposition"]["dims"]);
    assert_eq!(a["seed"], 1);
}

#[test]
fn summary_goes_to_stderr_when_json_on_stdout() {
    let out = run(&["analyze", "--json", "-"], &instance("z4_regular"));
    assert!(serde_json::from_slice::<Value>(&out.stdout).is_ok());
    assert!(String::from_utf8_lossy(&out.stderr).contains("transitive = true"));
}
