use std::process::{Command, Output};

fn mop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mop")).args(args).output().expect("spawn mop")
}

/// Worst certificate status in a JSON report.
fn status(v: &serde_json::Value) -> &'static str {
    let certs = v["certificates"].as_array().expect("certificates");
    let has = |s: &str| certs.iter().any(|c| c["status"] == s);
    if has("fail") {
        "fail"
    } else if has("inconclusive") {
        "inconclusive"
    } else {
        "pass"
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn check_dw_accepts_a_classical_operator() {
    let o = mop(&["check-dw", "--weight", "hermite", "--op", "dx^2 - dx*2*x", "--format", "text"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn check_dw_rejects_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let op = dir.path().join("op.mop");
    std::fs::write(&op, "dx*I").unwrap();
    let o = mop(&["check-dw", "--weight", "hermite-2x2", "--a", "1", "--op", op.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(status(&v), "fail");
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(code(&mop(&["frobnicate"])), 2);
    assert_eq!(code(&mop(&["check-dw", "--weight", "hermite-2x2", "--a", "0.5", "--op", "dx"])), 2);
    let o = mop(&["check-dw", "--weight", "hermite", "--op", "dx*("]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("col"));
    assert_eq!(code(&mop(&["check-dw", "--weight", "hermite", "--op", "dx*zeta"])), 2);
    assert_eq!(code(&mop(&["check-dw", "--weight", "jacobi-2x2", "--a", "3", "--r", "2", "--op", "dx"])), 2);
}

#[test]
fn reproduce_is_byte_identical() {
    let args = ["reproduce", "hermite", "--a", "2/3", "--seed", "7", "--specializations", "2"];
    let a = mop(&args);
    let b = mop(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(status(&v), "pass");
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested.json");
    let o = mop(&["mops", "--weight", "laguerre", "--b", "1/2", "--nmax", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(status(&v), "pass");
    // no temporary files are left behind
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1);
    let again = mop(&["mops", "--weight", "laguerre", "--b", "1/2", "--nmax", "3"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn exceptional_reports_degrees() {
    let o = mop(&["exceptional", "--op", "dx^2 - dx*(2*x + 8*x/(1+2*x^2))", "--nmax", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = v.to_string();
    assert!(s.contains("degrees"), "{s}");
}
