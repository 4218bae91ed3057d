use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qkp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkp"))
        .args(args)
        .env_remove("QKP_ORACLE_MAX_N")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TRIANGLE: &str = r#"{
  "n": 3,
  "limit": 2,
  "costs": [1, 1, 1],
  "vertex_profits": [0, 0, 0],
  "edges": [[0, 1, 1], [1, 2, 1], [0, 2, 1]]
}"#;

#[test]
fn solve_triangle() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("tri.json");
    let output = dir.path().join("sol.json");
    fs::write(&input, TRIANGLE).unwrap();
    let out = qkp(&[
        "solve",
        "--input",
        path_str(&input),
        "--output",
        path_str(&output),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let sol: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(sol["profit"], 1);
    assert_eq!(sol["cost"], 2);
    assert_eq!(sol["vertices"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, "{\"n\": 3,").unwrap();
    let out = qkp(&["solve", "--input", path_str(&input)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_instance_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("loop.json");
    fs::write(
        &input,
        r#"{"n": 2, "limit": 3, "costs": [1, 1], "vertex_profits": [0, 0], "edges": [[1, 1, 2]]}"#,
    )
    .unwrap();
    let out = qkp(&["solve", "--input", path_str(&input)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-loop"));
}

#[test]
fn unknown_flag_exits_2_with_usage() {
    let out = qkp(&["solve", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn generate_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = qkp(&[
            "generate",
            "--n",
            "10",
            "--density",
            "0.5",
            "--seed",
            "7",
            "--output",
            path_str(p),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn generate_density_extremes() {
    let none = qkp(&["generate", "--n", "8", "--density", "0"]);
    let doc: serde_json::Value = serde_json::from_slice(&none.stdout).unwrap();
    assert!(doc["edges"].as_array().unwrap().is_empty());
    let full = qkp(&["generate", "--n", "8", "--density", "1"]);
    let doc: serde_json::Value = serde_json::from_slice(&full.stdout).unwrap();
    assert_eq!(doc["edges"].as_array().unwrap().len(), 28);
}

#[test]
fn generate_rejects_bad_density() {
    let out = qkp(&["generate", "--n", "8", "--density", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn round_trip_and_tampering() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("inst.json");
    let sol = dir.path().join("sol.json");
    let report = dir.path().join("report.json");
    for seed in ["1", "2", "3"] {
        assert!(qkp(&[
            "generate",
            "--n",
            "15",
            "--seed",
            seed,
            "--output",
            path_str(&inst)
        ])
        .status
        .success());
        for dks in ["greedy", "exact"] {
            let out = qkp(&[
                "solve",
                "--input",
                path_str(&inst),
                "--output",
                path_str(&sol),
                "--dks",
                dks,
                "--report",
                path_str(&report),
            ]);
            assert!(
                out.status.success(),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            let v = qkp(&[
                "verify",
                "--input",
                path_str(&inst),
                "--solution",
                path_str(&sol),
            ]);
            assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
        }
    }

    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&sol).unwrap()).unwrap();
    let profit = doc["profit"].as_i64().unwrap();
    doc["profit"] = (profit + 1).into();
    fs::write(&sol, doc.to_string()).unwrap();
    let v = qkp(&[
        "verify",
        "--input",
        path_str(&inst),
        "--solution",
        path_str(&sol),
    ]);
    assert_eq!(v.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&v.stderr).contains("profit: claimed"));
}

#[test]
fn verify_rejects_over_limit() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("tri.json");
    let sol = dir.path().join("sol.json");
    fs::write(&inst, TRIANGLE).unwrap();
    fs::write(&sol, r#"{"vertices": [0, 1, 2], "cost": 3, "profit": 3}"#).unwrap();
    let v = qkp(&[
        "verify",
        "--input",
        path_str(&inst),
        "--solution",
        path_str(&sol),
    ]);
    assert_eq!(v.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&v.stderr).contains("exceeds limit"));
}

#[test]
fn solve_is_byte_stable_with_report() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("inst.json");
    assert!(qkp(&[
        "generate",
        "--n",
        "20",
        "--seed",
        "5",
        "--output",
        path_str(&inst)
    ])
    .status
    .success());
    let mut outputs = Vec::new();
    for run in 0..2 {
        let sol = dir.path().join(format!("sol{run}.json"));
        let rep = dir.path().join(format!("rep{run}.json"));
        let dec = dir.path().join(format!("dec{run}.json"));
        let out = qkp(&[
            "solve",
            "--input",
            path_str(&inst),
            "--output",
            path_str(&sol),
            "--report",
            path_str(&rep),
            "--decomposition",
            path_str(&dec),
        ]);
        assert!(out.status.success());
        outputs.push((
            fs::read(&sol).unwrap(),
            fs::read(&rep).unwrap(),
            fs::read(&dec).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn batch_mode_solves_each_file() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in");
    let output = dir.path().join("out");
    fs::create_dir(&input).unwrap();
    fs::write(input.join("tri.json"), TRIANGLE).unwrap();
    assert!(qkp(&[
        "generate",
        "--n",
        "6",
        "--output",
        path_str(&input.join("g.json"))
    ])
    .status
    .success());
    let out = qkp(&[
        "solve",
        "--input",
        path_str(&input),
        "--output",
        path_str(&output),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(output.join("tri.solution.json").exists());
    assert!(output.join("g.solution.json").exists());
}

#[test]
fn bench_zero_trials() {
    let out = qkp(&["bench", "--trials", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 1, "header only: {text}");
}

#[test]
fn bench_skips_oversize_trials() {
    let out = Command::new(env!("CARGO_BIN_EXE_qkp"))
        .args(["bench", "--trials", "3", "--n-range", "40-50"])
        .env("QKP_ORACLE_MAX_N", "12")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("skipped").count(), 3, "{text}");
}

#[test]
fn bench_exact_meets_floor_at_n10() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = qkp(&[
            "bench",
            "--trials",
            "50",
            "--n-range",
            "10",
            "--dks",
            "exact",
            "--json",
            path_str(p),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 50);
    assert!(rows
        .iter()
        .all(|r| r["meets_floor"] == true && r["floor"] == "1/16064"));
}
