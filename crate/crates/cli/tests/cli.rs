use std::process::Command;

use serde_json::Value;

fn conormal(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_conormal"))
        .args(args)
        .env_remove("CONORMAL_CACHE_DIR")
        .output()
        .unwrap();
    let code = out.status.code().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

fn dim(report: &Value, quantity: &str, degree: Option<i64>) -> Option<u64> {
    report["records"][0]["dims"]
        .as_array()?
        .iter()
        .find(|d| d["quantity"] == quantity && d["degree"].as_i64() == degree)
        .and_then(|d| d["value"].as_u64())
}

#[test]
fn star_on_the_rational_normal_quartic() {
    let (code, r) = conormal(&["star", "--variety", "veronese:1,4", "--kmax", "6"]);
    assert_eq!(code, 0);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "star");
    for k in 0..=6 {
        assert_eq!(dim(&r, "h1_I2", Some(k)), Some(if k == 2 { 3 } else { 0 }));
    }
    assert_eq!(r["records"][0]["verdicts"]["star"], "HOLDS");
}

#[test]
fn star_failure_is_a_measurement_not_an_error() {
    let (code, r) = conormal(&["star", "--variety", "tetragonal:2,2,1,b=1,2", "--kmax", "5"]);
    assert_eq!(code, 0);
    assert_eq!(dim(&r, "h1_I2", Some(3)), Some(1));
    assert_eq!(r["records"][0]["verdicts"]["star"], "FAILS");
}

#[test]
fn gaussian_and_t2() {
    let (code, r) = conormal(&["gaussian", "--variety", "plane-canonical:7"]);
    assert_eq!(code, 0);
    assert_eq!(dim(&r, "gaussian_corank", None), Some(10));

    let (code, r) = conormal(&["t2", "--variety", "pentagonal:g=8", "--kmax", "4"]);
    assert_eq!(code, 0);
    for k in -4..=0 {
        assert_eq!(dim(&r, "T2", Some(k)), Some(0));
    }
}

#[test]
fn extend_writes_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("septic.json");
    let (code, _) = conormal(&["extend", "--variety", "plane-canonical:7", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let v = &r["records"][0]["verdicts"];
    assert_eq!(v["lift"], "TERMINATED");
    assert_eq!(v["flatness"], "PASS");
    let vectors = r["records"][0]["details"]["vectors"].as_array().unwrap();
    assert_eq!(vectors.len(), 10);
    assert_eq!(vectors[0]["generators"].as_array().unwrap().len(), 78);
}

#[test]
fn extend_refuses_curves_without_a_quadric_presentation() {
    let (code, r) = conormal(&["extend", "--variety", "ci:3,2,3"]);
    assert_eq!(code, 1);
    assert!(r["records"][0]["error"].as_str().unwrap().contains("rejected"));
    let (code, _) = conormal(&["extend", "--variety", "veronese:1,3"]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(conormal(&["star", "--variety", "veronese:1,2,seed=4"]).0, 1);
    assert_eq!(conormal(&["catalog", "nonexistent"]).0, 1);
    assert_eq!(conormal(&["star", "--variety", "veronese:1,2", "--prime", "1000"]).0, 1);
    assert_ne!(conormal(&["star"]).0, 0);
}

#[test]
fn unstable_saturation_is_inconclusive() {
    let (code, r) = conormal(&["star", "--variety", "tetragonal:2,2,1,b=1,2", "--kmax", "4", "--mcap", "1", "--window", "2"]);
    assert_eq!(code, 2);
    assert_eq!(r["records"][0]["verdicts"]["star"], "INCONCLUSIVE");
    assert!(r["records"][0]["flags"].as_array().unwrap().iter().any(|f| f == "UNSTABLE"));
}

#[test]
fn catalog_suite_with_jobs() {
    let (code, r) = conormal(&["catalog", "points", "--jobs", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["suite"]["criteria"][0]["pass"], true);
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut v: Value| {
        for rec in v["records"].as_array_mut().unwrap() {
            rec["timings_ms"] = Value::Null;
        }
        v
    };
    let args = ["star", "--variety", "ci:4,2,2,2", "--kmax", "4", "--seed", "11"];
    let a = strip(conormal(&args).1);
    let b = strip(conormal(&args).1);
    assert_eq!(a, b);
    assert_eq!(a["records"][0]["seed"], 11);
}
