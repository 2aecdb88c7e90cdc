use std::process::Command;

use serde_json::Value;

fn picard_one(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_picard-one"))
        .args(args)
        .output()
        .expect("runs");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().expect("exit code"), v)
}

#[test]
fn fermat_singular_mod_2_is_a_stage_failure() {
    let (code, v) = picard_one(&["certify", "--form", "x^4 + y^4 + z^4 + w^4"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["stage"], "smoothness");
}

#[test]
fn count_and_curve_commands() {
    let (code, v) = picard_one(&["count", "--p", "3", "--n", "2", "--h", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 119);
    let (code, v) = picard_one(&["curve", "--h", "0", "--conductor"]);
    assert_eq!(code, 0);
    assert_eq!(v["conductor"]["conductor"], 686004);
    assert_eq!(v["order"]["verdict"], "infinite_order");
}

#[test]
fn bad_input_exits_3() {
    assert_eq!(picard_one(&["count", "--p", "4", "--n", "1", "--h", "0"]).0, 3);
    assert_eq!(picard_one(&["count", "--p", "2", "--n", "1", "--form", "x^3"]).0, 3);
    assert_eq!(picard_one(&["verify", "/nonexistent/cert.json"]).0, 3);
    assert_eq!(picard_one(&["search", "--p1", "3", "--p2", "3", "--budget", "1"]).0, 3);
}

#[test]
fn zeta_from_a_count_series() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("counts");
    let cache = cache.to_str().unwrap();
    for n in 1..=10 {
        let (code, _) = picard_one(&[
            "--cache-dir",
            cache,
            "count",
            "--p",
            "2",
            "--n",
            &n.to_string(),
            "--h",
            "0",
        ]);
        assert_eq!(code, 0);
    }
    let entry = std::fs::read_dir(cache).unwrap().next().unwrap().unwrap().path();
    let stored: Value = serde_json::from_slice(&std::fs::read(&entry).unwrap()).unwrap();
    let counts: Vec<u64> = (1..=10)
        .map(|n| stored["counts"][n.to_string()].as_u64().unwrap())
        .collect();
    let fp = entry.file_stem().unwrap().to_str().unwrap();
    let series = serde_json::json!({"p": 2, "counts": counts, "fingerprint": fp});
    let path = dir.path().join("series.json");
    std::fs::write(&path, series.to_string()).unwrap();
    let path = path.to_str().unwrap();
    let (code, v) = picard_one(&["bound", "--p", "2", "--traces", path, "--known-classes", "H,C"]);
    assert_eq!(code, 0);
    assert_eq!(v["bound"], 2);
    let (code, v) = picard_one(&["zeta", "--p", "2", "--traces", path, "--known-classes", "H,C"]);
    assert_eq!(code, 0);
    assert_eq!(v["full"]["coeffs"][11], -2048);
    // without the conic the quotient has degree 21 and no functional-equation completion
    let (code, _) = picard_one(&["zeta", "--p", "2", "--traces", path, "--known-classes", "H"]);
    assert_eq!(code, 3);
}
