use std::process::{Command, Output};

use serde_json::Value;

fn morley(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morley"))
        .args(args)
        .env_remove("MORLEY_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = morley(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn rows(v: &Value) -> &Vec<Value> {
    v["rows"].as_array().unwrap()
}

fn close(a: &Value, b: f64, tol: f64) -> bool {
    (a.as_f64().unwrap() - b).abs() <= tol
}

#[test]
fn solve_first_values() {
    for (dim, bc, first) in [("2", "clamped", 1075.8563), ("2", "simply-supported", 347.5266), ("3", "simply-supported", 718.3621)] {
        let v = json(&["solve", "--dim", dim, "--n", "4", "--bc", bc, "--format", "json"]);
        let run = &v[0];
        assert_eq!(run["eigenvalues"].as_array().unwrap().len(), 6);
        assert!(close(&run["eigenvalues"][0], first, 5e-5), "{dim} {bc}: {}", run["eigenvalues"][0]);
        assert!(run["residuals"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() < 1e-8));
        assert_eq!(run["metadata"]["converged"], true);
    }
}

#[test]
fn solve_text_and_csv() {
    let out = morley(&["solve", "--dim", "2", "--n", "4", "--n", "8", "--bc", "ss", "--k", "3", "--solver", "shift-invert"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("N=4") && text.contains("N=8") && text.contains("347.5266") && text.contains("shift-invert"));
    let out = morley(&["solve", "--dim", "2", "--n", "4", "--bc", "clamped", "--format", "csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().nth(1).unwrap().starts_with("2,4,clamped,1,1075.856"));
}

#[test]
fn table_2_first_row() {
    let v = json(&["table", "2", "--format", "json"]);
    let expect = [(4, 347.5266), (8, 377.6791), (12, 384.1862), (16, 386.5430), (32, 388.8563)];
    for (n, val) in expect {
        let row = rows(&v).iter().find(|r| r["index"] == 1 && r["n"] == n).unwrap();
        assert!(close(&row["lambda_h"], val, 1e-3 * val), "N={n}");
    }
    assert_eq!(v["reference"], "exact");
}

#[test]
fn table_3_small_meshes() {
    let v = json(&["table", "3", "--n", "4", "--n", "8", "--format", "json"]);
    let first: Vec<f64> = rows(&v).iter().filter(|r| r["index"] == 1).map(|r| r["lambda_h"].as_f64().unwrap()).collect();
    assert!((first[0] - 1714.3524).abs() < 1e-3 && (first[1] - 2136.8429).abs() < 1e-3);
    assert_eq!(v["reference"], "none");
}

#[test]
fn table_1_is_increasing() {
    let v = json(&["table", "1", "--n", "4", "--n", "8", "--n", "12", "--n", "16", "--format", "json"]);
    assert_eq!(rows(&v).len(), 24);
    for r in rows(&v).iter().filter(|r| r["n"] != 4) {
        assert_eq!(r["monotone"], true);
    }
}

#[test]
fn table_is_deterministic_across_thread_counts() {
    let args = ["table", "4", "--n", "4", "--n", "8", "--format", "csv"];
    let a = morley(&args).stdout;
    let b = morley(&args).stdout;
    let c = Command::new(env!("CARGO_BIN_EXE_morley")).args(args).env("MORLEY_THREADS", "2").output().unwrap().stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
    let csv = String::from_utf8(a).unwrap();
    assert!(csv.starts_with("n,index,lambda_h,exact,error,rate,monotone,published,published_rate\n"));
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn rates_examples() {
    for (dim, ns, expect) in [("2", ["4", "8"], 1.816267), ("2", ["8", "12"], 1.937758), ("3", ["4", "8"], 1.702863)] {
        let v = json(&["rates", "--dim", dim, "--bc", "simply-supported", "--n", ns[0], "--n", ns[1], "--format", "json"]);
        assert_eq!(rows(&v).len(), 2);
        assert!(close(&rows(&v)[1]["rate"], expect, 1e-3), "{dim} {ns:?}");
    }
}

#[test]
fn clamped_rates_need_richardson() {
    let out = morley(&["rates", "--dim", "2", "--bc", "clamped", "--n", "4", "--n", "8"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--richardson"));
    let out = morley(&["rates", "--dim", "2", "--bc", "clamped", "--n", "4", "--n", "8", "--n", "12", "--richardson"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("not a published value"));
}

#[test]
fn bad_arguments_exit_3() {
    for args in [
        &["table", "4", "--n", "32"][..],
        &["table", "5"],
        &["solve", "--dim", "4", "--n", "4", "--bc", "clamped"],
        &["solve", "--dim", "2", "--n", "4", "--bc", "free"],
        &["solve", "--dim", "2", "--n", "4", "--bc", "clamped", "--solver", "qr"],
        &["verify", "lemma4d"],
        &["frobnicate"],
    ] {
        let out = morley(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_morley"))
        .args(["table", "2", "--n", "4"])
        .env("MORLEY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_and_version_succeed() {
    assert!(morley(&["--help"]).status.success());
    assert!(morley(&["--version"]).status.success());
    assert!(morley(&["table", "--help"]).status.success());
}

#[test]
fn oversized_request_is_a_solver_failure() {
    let out = morley(&["solve", "--dim", "2", "--n", "1", "--bc", "clamped"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_reports_deviations_and_passes() {
    let v = json(&["verify", "all", "--format", "json"]);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["deviations"], 5);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "deviation")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"2d/p_1_2_printed"));
    let out = morley(&["verify", "bubbles"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("25/29 pass"));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("morley-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("solve.json");
    let out = morley(&["solve", "--dim", "2", "--n", "4", "--bc", "clamped", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["n"], 4);
    std::fs::remove_dir_all(&dir).unwrap();
}
