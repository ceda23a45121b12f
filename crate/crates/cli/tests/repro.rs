//! The CLI must byte-reproduce its outputs for a fixed configuration.

use std::fs;
use std::process::Command;

fn run(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_memswave"))
        .args(args)
        .status()
        .expect("spawn memswave");
    assert!(status.success(), "command failed: {args:?}");
}

#[test]
fn eigen_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    for out in [&out1, &out2] {
        run(&[
            "eigen",
            "--k",
            "1",
            "--m",
            "24",
            "--lambda-max",
            "0.05",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let a = fs::read(out1.join("eigen_k1.csv")).unwrap();
    let b = fs::read(out2.join("eigen_k1.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "eigen CSV differs between runs");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,mu"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,2.4674011002723"), "first row {first}");
}

#[test]
fn steady_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    for out in [&out1, &out2] {
        run(&["steady", "--m", "24", "--steps", "25", "--out", out.to_str().unwrap()]);
    }
    let a = fs::read(out1.join("steady_branch.csv")).unwrap();
    let b = fs::read(out2.join("steady_branch.csv")).unwrap();
    assert_eq!(a, b, "steady CSV differs between runs");
}

#[test]
fn bad_flags_fail_with_report() {
    let out = Command::new(env!("CARGO_BIN_EXE_memswave"))
        .args(["eigen", "--k", "7"])
        .output()
        .expect("spawn memswave");
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err.lines().last().unwrap_or_default();
    let v: serde_json::Value = serde_json::from_str(line).expect("stderr report is JSON");
    assert!(v.get("error").is_some());
}

#[test]
fn validate_emits_certificate_enclosing_the_fold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    run(&["validate", "--m", "65", "--nu", "1.05", "--out", out.to_str().unwrap()]);
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    let lo = cert["lambda_star"][0].as_f64().unwrap();
    let hi = cert["lambda_star"][1].as_f64().unwrap();
    assert!(lo <= 0.350004119342744 && 0.350004119342744 <= hi);
    assert!(cert["r0"].as_f64().unwrap() <= 1e-9);
    assert!(cert["z1"][1].as_f64().unwrap() < 1.0);
}

#[test]
fn periodic_produces_branch_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    run(&[
        "periodic", "--k", "1", "--p", "9", "--q", "11", "--m", "16", "--K", "5", "--steps", "8",
        "--lambda-min", "0.01", "--out", out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(out.join("branch_k1_q11_p9.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("lambda,omega,p,q,sup_norm,u_center"));
    assert!(lines.count() >= 8);
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("branch_k1_q11_p9.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["p"], 9);
    assert!(sidecar["points"].as_array().unwrap()[0]["a1"].as_array().unwrap().len() == 16);
}
