use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltawell")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let json = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (json, out.status.code().unwrap())
}

fn result(report: &Value, name: &str) -> f64 {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == name)
        .unwrap_or_else(|| panic!("no result {name}"))["value"]
        .as_f64()
        .unwrap()
}

fn energies(report: &Value) -> Vec<f64> {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["name"].as_str().unwrap().starts_with("energy."))
        .map(|e| e["value"].as_f64().unwrap())
        .collect()
}

#[test]
fn solve1d_defaults_give_five_equal_energies() {
    let (r, code) = report(&["solve1d"]);
    assert_eq!(code, 0);
    assert_eq!(r["passed"], true);
    let e = energies(&r);
    assert_eq!(e.len(), 5);
    assert!(e.iter().all(|v| (v + 0.5).abs() < 1e-8), "{e:?}");
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["tool_version", "timestamp", "command", "inputs", "results", "warnings", "passed"]);
    for entry in r["results"].as_array().unwrap() {
        assert!(entry["tolerance"].is_number());
    }
}

#[test]
fn solve1d_alpha_two_and_loose_tolerance() {
    let (r, code) = report(&["solve1d", "--alpha", "2"]);
    assert_eq!(code, 0);
    assert!(energies(&r).iter().all(|v| (v + 2.0).abs() < 1e-7));
    let (r, code) = report(&["solve1d", "--tol", "1e-3"]);
    assert_eq!(code, 0);
    assert_eq!(r["passed"], true);
}

#[test]
fn solve2d_defaults_and_sweep() {
    let (r, code) = report(&["solve2d", "--sweep-radius", "0.5,1,2"]);
    assert_eq!(code, 0);
    assert!(format!("{}", result(&r, "u0")).starts_with("0.4322837"));
    assert!((result(&r, "normalization") - 1.0).abs() <= 1e-8);
    for (radius, expected) in [("0.5", 4.0), ("1", 1.0), ("2", 0.25)] {
        assert!((result(&r, &format!("sweep.ratio[R={radius}]")) - expected).abs() < 1e-12);
    }
    let warnings = r["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().starts_with("jump convention")));
}

#[test]
fn solve2d_negative_alpha_warns() {
    let (r, code) = report(&["solve2d", "--alpha", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(r["warnings"].as_array().unwrap().len(), 2);
}

#[test]
fn profile_2d_defaults() {
    let out = run(&["profile"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,psi,psi_sq"));
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    assert_eq!(rows.len(), 1000);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[999][0] - 5.0).abs() < 1e-15);
    let spacing = 5.0 / 999.0;
    let straddle = rows.windows(2).find(|w| w[0][0] < 1.0 && w[1][0] >= 1.0).unwrap();
    // I0 rises and K0 falls, so the peak is at the samples bracketing R
    let peak = rows.iter().fold(0.0f64, |m, r| m.max(r[1]));
    assert!(peak == straddle[0][1] || peak == straddle[1][1]);
    assert!(rows[..rows.len() - 1].iter().zip(&rows[1..]).all(|(a, b)| (b[1] > a[1]) == (b[0] < 1.0)));
    assert!((straddle[1][1] - straddle[0][1]).abs() < spacing);
}

#[test]
fn profile_1d_is_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    let out =
        run(&["profile", "--dimension", "1", "--r-max", "3", "--samples", "61", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,psi,psi_sq"));
    let mut count = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - (-v[0].abs()).exp()).abs() < 1e-15);
        assert_eq!(v[2], v[1] * v[1]);
        count += 1;
    }
    assert_eq!(count, 61);
}

#[test]
fn verify_suites_pass() {
    for suite in ["bessel", "quad", "distrib", "all"] {
        let (r, code) = report(&["verify", "--suite", suite]);
        assert_eq!(code, 0, "{suite}");
        assert_eq!(r["passed"], true);
    }
}

#[test]
fn reports_are_reproducible_apart_from_timestamp() {
    let strip = |args: &[&str]| {
        let (mut r, _) = report(args);
        r["timestamp"] = Value::Null;
        serde_json::to_string(&r).unwrap()
    };
    for args in [&["solve1d"][..], &["solve2d", "--sweep-radius", "0.5,2"]] {
        assert_eq!(strip(args), strip(args));
    }
    let raw = |args: &[&str]| {
        let text = String::from_utf8(run(args).stdout).unwrap();
        text.lines().filter(|l| !l.contains("\"timestamp\"")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(raw(&["solve1d", "--alpha", "1.5"]), raw(&["solve1d", "--alpha", "1.5"]));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["solve1d", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["solve1d", "--mass", "0"]).status.code(), Some(2));
    assert_eq!(run(&["solve2d", "--alpha", "0"]).status.code(), Some(2));
    assert_eq!(run(&["profile", "--samples", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_one() {
    let out = run(&["solve1d", "--output", "/nonexistent-dir/report.json"]);
    assert_eq!(out.status.code(), Some(1));
}
