use std::process::Command;

use rspin_core::cli::run;

fn rspin(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["rspin", "--no-cache"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn dr1_both_methods_agree() {
    let (code, out, _) = rspin(&["dr1", "--r", "4", "--k", "2,-2", "--a", "2,2", "--method", "both"]);
    assert_eq!(code, 0);
    let values: Vec<&str> = out.lines().map(|l| l.split_whitespace().last().unwrap()).collect();
    assert_eq!(values, ["1/32", "1/32"]);
}

#[test]
fn documented_examples() {
    assert_eq!(rspin(&["b", "--r", "4", "--a", "0"]), (0, "1/8\n".into(), String::new()));
    assert_eq!(rspin(&["dr1", "--r", "4", "--k", "1,-1", "--a", "2,2", "--method", "closed"]).1, "0\n");
    assert_eq!(rspin(&["g0", "--r", "5", "--a", "1,1,3,3"]).1, "1/5\n");
    assert_eq!(rspin(&["loopsum", "--r", "5", "--m", "2", "--x", "3,3"]).1, "1/5\n");
}

#[test]
fn negative_first_entry_parses() {
    let (code, out, _) = rspin(&["dr1", "--r", "6", "--k", "-3,2,1", "--a", "4,4,4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("1/72"));
}

#[test]
fn json_is_schema_stable() {
    let (code, out, _) = rspin(&["--format", "json", "dr1", "--r", "6", "--k", "2,1,-3", "--a", "4,4,4"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["key"], "dr1:r=6:k=3,-1,-2:a=4,4,4");
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for (m, want) in results.iter().zip(["closed", "relations"]) {
        assert_eq!(m["method"], want);
        assert_eq!(m["value"], "1/72");
        assert_eq!(m["status"], "ok");
    }

    let (_, out, _) = rspin(&["g0", "--r", "5", "--a", "2,2,2,3,3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"][0]["value"], "0/1");
    assert_eq!(v["results"][0]["status"], "dimension-mismatch-zero");
}

#[test]
fn exit_codes() {
    assert_eq!(rspin(&["frobnicate"]).0, 64);
    assert_eq!(rspin(&["g0", "--r", "5"]).0, 64);
    assert_eq!(rspin(&["g0", "--r", "5", "--a", "1,x"]).0, 64);
    assert_eq!(rspin(&["g0", "--r", "1", "--a", "0,0,0"]).0, 65);
    assert_eq!(rspin(&["g0", "--r", "5", "--a", "1,7,3"]).0, 65);
    assert_eq!(rspin(&["g0", "--r", "5", "--a", "1,1"]).0, 65);
    assert_eq!(rspin(&["dr1", "--r", "4", "--k", "1,0", "--a", "2,2"]).0, 65);
    assert_eq!(rspin(&["dr1", "--r", "4", "--k", "1,-1", "--a", "2"]).0, 65);
    assert_eq!(rspin(&["loopsum", "--r", "4", "--m", "1", "--x", "1,2"]).0, 65);
    assert_eq!(rspin(&["--help"]).0, 0);
}

#[test]
fn verify_reports_and_exit_status() {
    let (code, out, _) = rspin(&["verify", "--suite", "relations"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("PASS relations"));

    let (code, out, _) = rspin(&["--format", "json", "verify", "--suite", "oracle", "--r-max", "4"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["suite"], "oracle");
    assert!(v[0]["failures"].as_array().unwrap().is_empty());
    assert!(v[0]["elapsed_ms"].is_u64());

    // the extended loop range has known counterexamples at two insertions
    let (code, out, _) = rspin(&["verify", "--suite", "loop", "--r-max", "4", "--n-max", "4"]);
    assert_eq!(code, 1);
    assert!(out.contains("loop:r=4:m=4:x=1,1: expected 1/1 got 1/4"), "{out}");
}

#[test]
fn table_csv_and_json() {
    let (code, out, _) = rspin(&["table", "--kind", "g0", "--r-max", "5", "--n-max", "4", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rd.headers().unwrap(), vec!["r", "a", "value"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert!(rows.iter().any(|r| r == vec!["5", "1,1,3,3", "1/5"]));

    let (code, out, _) = rspin(&["table", "--kind", "dr1", "--r-max", "4", "--n-max", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let row = v.as_array().unwrap().iter().find(|r| r["key"] == "dr1:r=4:k=2,-2:a=2,2").unwrap();
    assert_eq!(row["value"], "1/32");
    assert_eq!(row["k"], serde_json::json!([2, -2]));
}

#[test]
fn cache_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let out = Command::new(env!("CARGO_BIN_EXE_rspin"))
        .args(["g0", "--r", "6", "--a", "2,2,4,4,4"])
        .env("RSPIN_CACHE", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1/18\n");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("{\"schema\":1,\"entries\":{"));
    assert!(text.contains("\"g0:r=6:a=2,2,4,4,4\":\"1/18\""));

    // a corrupt cache is reported, not silently replaced
    std::fs::write(&path, "{\"schema\":7,\"entries\":{}}").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rspin"))
        .args(["--cache", path.to_str().unwrap(), "b", "--r", "4", "--a", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(74));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "{\"schema\":7,\"entries\":{}}");
}
