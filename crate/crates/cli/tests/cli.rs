use std::process::{Command, Output};

use serde_json::Value;

fn sphmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphmax"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = sphmax(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_kind(args: &[&str]) -> String {
    let out = sphmax(args);
    assert!(!out.status.success(), "{args:?} should fail");
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn count_single_and_range() {
    let r = report(&["count", "--d", "4", "--lambda", "1"]);
    assert_eq!(r["result"]["count"], 8);
    assert_eq!(r["tool"], "sphmax");
    assert_eq!(r["command"], "count");
    assert_eq!(r["config"]["d"], 4);
    assert!(r["config"].get("threads").is_none());
    let r = report(&["count", "--d", "5", "--max-lambda", "3"]);
    assert_eq!(r["result"]["counts"], serde_json::json!([1, 10, 40, 80]));
    let csv = sphmax(&["count", "--d", "5", "--max-lambda", "2", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "lambda,count\n0,1\n1,10\n2,40\n");
}

#[test]
fn eta_for_naturals_is_five_thirds() {
    let r = report(&["eta", "--d", "5", "--family", "naturals", "--declared"]);
    assert_eq!(r["result"]["eta_exact"], "5/3");
    assert_eq!(r["result"]["binding"], serde_json::json!(["archimedean"]));
    assert_eq!(r["result"]["delta_inf"]["provenance"], "declared");
    assert_eq!(r["result"]["per_prime"]["97"]["provenance"], "declared");
}

#[test]
fn estimated_eta_is_labelled() {
    let r = report(&[
        "eta", "--d", "5", "--family", "naturals:bound=4096", "--estimated", "--primes-up-to", "5",
    ]);
    let res = &r["result"];
    assert!(res.get("eta_exact").is_none());
    assert_eq!(res["delta_inf"]["provenance"], "estimated");
    assert_eq!(res["per_prime"]["2"]["provenance"], "estimated");
    assert!((res["eta"].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-9);
}

#[test]
fn probe_delta_mass_count_from_text_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seven.txt");
    std::fs::write(&path, "2\n3\n5\n7\n11\n13\n17\n").unwrap();
    let r = report(&["probe-delta", "--d", "5", "--p", "1", "--seq", path.to_str().unwrap()]);
    assert_eq!(r["result"]["values"], serde_json::json!([7.0]));
    assert_eq!(r["result"]["direct_values"], serde_json::json!([7.0]));
    assert_eq!(r["result"]["kind"], "delta_test");
}

#[test]
fn generate_then_analyze_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let family = "padic_cover:prime=3,stages=3,growth=2";
    let generated = sphmax(&["generate", "--family", family, "--seed", "5"]);
    assert!(generated.status.success());
    let path = dir.path().join("cover.json");
    std::fs::write(&path, &generated.stdout).unwrap();

    let from_family = report(&["analyze", "--family", family, "--seed", "5", "--primes-up-to", "7"]);
    let from_file = report(&["analyze", "--seq", path.to_str().unwrap(), "--primes-up-to", "7"]);
    assert_eq!(from_family["result"], from_file["result"]);
    let profiles = from_file["result"]["profiles"].as_array().unwrap();
    assert_eq!(profiles.len(), 5);
    assert_eq!(profiles[4]["kind"], "dyadic");
}

#[test]
fn operators_on_grid_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"d":4,"points":[[0,0,0,0,2.0]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let r = report(&["average", "--input", p, "--lambda", "1"]);
    let points = r["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 8);
    assert!(points.iter().all(|pt| pt[4] == 0.25));
    let r = report(&["maximal", "--input", p, "--lambdas", "1,2"]);
    assert_eq!(r["result"]["points"].as_array().unwrap().len(), 8 + 24);
    let csv = sphmax(&["average", "--input", p, "--lambda", "0", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "x1,x2,x3,x4,value\n0,0,0,0,2\n");
}

#[test]
fn probes_report_stages() {
    let r = report(&[
        "probe-slope", "--d", "5", "--p", "1", "--family", "naturals", "--schedule", "100,200,400,800",
    ]);
    assert_eq!(r["result"]["values"], serde_json::json!([100.0, 200.0, 400.0, 800.0]));
    assert!((r["result"]["slope"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = sphmax(&[
        "probe-padic", "--d", "4", "--q", "2", "--prime", "2", "--level", "1", "--seq", "/dev/null",
    ]);
    assert!(!out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("four.txt");
    std::fs::write(&path, "4\n").unwrap();
    let csv = sphmax(&[
        "probe-padic", "--d", "4", "--p", "2", "--prime", "2", "--seq", path.to_str().unwrap(),
        "--format", "csv",
    ]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let value: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 5f64.sqrt() / 3.0).abs() < 1e-15);
}

#[test]
fn errors_are_structured() {
    assert_eq!(error_kind(&["count", "--d", "3", "--lambda", "1"]), "InvalidConfig");
    assert_eq!(error_kind(&["count", "--d", "4"]), "InvalidConfig");
    assert_eq!(
        error_kind(&["probe-padic", "--d", "5", "--q", "1.1", "--prime", "9", "--family", "naturals:bound=5"]),
        "NotPrime"
    );
    assert_eq!(
        error_kind(&["enumerate", "--d", "6", "--lambda", "400", "--cap-points", "1000"]),
        "CapExceeded"
    );
    assert_eq!(
        error_kind(&["probe-delta", "--d", "5", "--p", "1", "--seq", "/nonexistent/file"]),
        "IoError"
    );
    assert_eq!(error_kind(&["generate", "--family", "primes"]), "ParseError");
    assert_eq!(
        error_kind(&["probe-delta", "--d", "5", "--p", "0.5", "--family", "naturals:bound=3"]),
        "InvalidExponent"
    );
}
