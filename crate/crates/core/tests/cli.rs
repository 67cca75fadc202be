use std::path::Path;
use std::process::{Command, Output};

use nlcrit::cli::{EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

fn nlcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlcrit")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).unwrap_or_else(|| panic!("no JSON in {text}"));
    serde_json::from_str(line).unwrap()
}

fn simulate(dir: &Path, init: &str, t_end: &str, every: &str) -> Output {
    nlcrit(&[
        "--quiet", "simulate", "--init", init, "--N", "16", "--dt", "0.01", "--T", t_end, "--snapshot-every", every, "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&nlcrit(&["frobnicate"])), EXIT_USAGE);
    assert_eq!(code(&nlcrit(&["simulate", "--N", "many"])), EXIT_USAGE);
    assert_eq!(code(&nlcrit(&["--help"])), EXIT_OK);
}

#[test]
fn invalid_input_reports_stage() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlcrit(&["--quiet", "monitor", "--series", dir.path().to_str().unwrap(), "--T", "2"]);
    assert_eq!(code(&o), EXIT_INVALID);
    assert_eq!(stderr_json(&o)["stage"], "ingest");

    let o = nlcrit(&["--quiet", "simulate", "--init", "nonsense", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_INVALID);

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"unknownKey": 1}"#).unwrap();
    let o = nlcrit(&["--quiet", "--config", cfg.to_str().unwrap(), "verify", "riesz", "--N", "8"]);
    assert_eq!(code(&o), EXIT_INVALID);
    assert_eq!(stderr_json(&o)["stage"], "config");
}

#[test]
fn cfl_violation_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlcrit(&["--quiet", "simulate", "--init", "beltrami", "--N", "16", "--dt", "10", "--T", "20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_NUMERICAL);
    assert_eq!(stderr_json(&o)["stage"], "simulate");
}

#[test]
fn verify_riesz_table() {
    let o = nlcrit(&["verify", "riesz", "--N", "16", "--seed", "3"]);
    assert_eq!(code(&o), EXIT_OK);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("invariant,value,tolerance,holds"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{text}");
}

#[test]
fn counterexample_reports_curl_and_zero_remainder() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ce.nscv");
    let o = nlcrit(&["counterexample", "--lambda", "10", "--N", "32", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["remainderMax"], 0.0);
    let w = v["curlOrigin"][1].as_f64().unwrap();
    assert!((w - 10.0).abs() < 0.1, "{w}");
    assert!(out.exists());

    let o = nlcrit(&["norms", "--input", out.to_str().unwrap(), "--space", "morrey", "--balls", "dyadic:4"]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("space,p,value,pointTerm,"));
    let value: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(value.is_finite() && value > 0.0);
}

#[test]
fn taylor_green_monitor_matches_closed_form_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("tg");
    let o = simulate(&series, "tg", "0.2", "0.1");
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let o = nlcrit(&["--quiet", "monitor", "--series", series.to_str().unwrap(), "--T", "2"]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let num = |k: usize| r[k].parse::<f64>().unwrap();
        let (t, functional, threshold, u3) = (num(0), num(1), num(2), num(3));
        let want = (2.0 - t).powf(-0.5) / u3;
        assert!((threshold - want).abs() <= 1e-12 * want, "t={t}: {threshold} vs {want}");
        assert!(functional <= threshold);
        assert_eq!(*r.last().unwrap(), "ok");
    }
}
