use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aperiodic-spectra")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn analyze_bba() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bba.json");
    std::fs::write(&cfg, r#"{"p":1,"ks":[0,1]}"#).unwrap();
    let out = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["complexity"]["class"], "Θ(n²)");
    assert_eq!(v["palindromes"]["regime"]["tag"], "CriticalB");
    assert_eq!(v["palindromes"]["regime"]["b_prime"], 4.0);
    assert_eq!(v["index"]["upper"], 2);
    assert_eq!(v["index"]["bracket"], "= 2");
    assert_eq!(v["gordon"]["holds"], false);
    assert_eq!(v["classification"]["kind"], "AlmostPrimitive");
}

#[test]
fn analyze_cubic_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["analyze", "--p", "2", "--ks", "0,3,0,1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["gordon"]["holds"], true);
    assert_eq!(v["gordon"]["witness"], "bbaaa");
}

#[test]
fn analyze_is_deterministic() {
    let a = run(&["analyze", "--p", "2", "--ks", "1,0,2"]);
    let b = run(&["analyze", "--p", "2", "--ks", "1,0,2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_rejects_trivial_and_malformed() {
    assert_eq!(code(&run(&["analyze", "--p", "1", "--ks", "0"])), 3);
    assert_eq!(code(&run(&["analyze", "--p", "1", "--ks", "1,0"])), 3);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"p":2,"ks":"#).unwrap();
    assert_eq!(code(&run(&["analyze", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["analyze"])), 2);
}

#[test]
fn generate_fixed_point() {
    let out = run(&["generate", "--p", "1", "--ks", "0,1", "--fixedpoint", "--range", "0..15", "--alphabet", "return", "--word"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "0102010301020104");
    let out = run(&["generate", "--p", "1", "--ks", "0,1", "--fixedpoint", "--range", "0..6", "--alphabet", "ab", "--word"]);
    assert_eq!(stdout(&out).trim(), "bbabbaa");
}

#[test]
fn generate_dump_format() {
    let out = run(&["generate", "--p", "1", "--ks", "0,1", "--fixedpoint", "--range", "-1..2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "-1\t∞\n0\t0\n1\t1\n2\t0\n");
    let out = run(&["generate", "--p", "1", "--ks", "0,1", "--digits", "1", "--range", "0..3"]);
    assert_eq!(stdout(&out), "0\t?\n1\t0\n2\t?\n3\t0\n");
}

#[test]
fn generate_errors() {
    assert_eq!(code(&run(&["generate", "--p", "1", "--ks", "0,1", "--digits", "0,2", "--range", "0..3"])), 2);
    assert_eq!(code(&run(&["generate", "--p", "1", "--ks", "0,1", "--digits", "1", "--range", "0..3", "--alphabet", "ab"])), 4);
    assert_eq!(code(&run(&["generate", "--p", "1", "--ks", "0,1", "--fixedpoint", "--range", "5..3"])), 2);
}

#[test]
fn palindromes_below_and_at_critical() {
    let out = run(&["palindromes", "--p", "1", "--ks", "0,1", "--b", "3.9", "--j-max", "2"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for e in entries {
        let (c, l, ratio) = (e["center"].as_f64().unwrap(), e["length"].as_f64().unwrap(), e["ratio"].as_f64().unwrap());
        assert!((ratio - 3.9f64.powf(c) / l).abs() < 1e-9 * ratio);
    }
    assert!(entries[0]["center"].as_f64() < entries[1]["center"].as_f64());
    assert!(entries[0]["ratio"].as_f64() > entries[1]["ratio"].as_f64());
    assert_eq!(code(&run(&["palindromes", "--p", "1", "--ks", "0,1", "--b", "4"])), 3);
}

#[test]
fn index_brackets() {
    let out = run(&["index", "--p", "2", "--ks", "0,3,0,1"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bracket"], "(>3, ≤4)");
    assert_eq!(v["verdicts"][2]["exceeded"], true);
    assert_eq!(v["verdicts"][3]["exceeded"], false);
}

#[test]
fn spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = run(&["spectrum", "--p", "1", "--ks", "0,1", "--va", "0", "--vb", "4", "--grid", "-3:7:0.01", "--depth", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("heuristic"));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("E,in_spectrum,trace_b_period,trace_a"));
    let rows: Vec<(f64, bool)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 1001);
    assert!(rows.iter().filter(|(e, _)| (-2.0..=2.0).contains(e)).all(|(_, inside)| *inside));
    assert!(!rows.iter().find(|(e, _)| (e - 6.9).abs() < 1e-9).unwrap().1);
}

#[test]
fn spectrum_errors() {
    let base = ["spectrum", "--p", "1", "--ks", "0,1", "--va", "0", "--vb", "4", "--grid"];
    for grid in ["-3:7:0", "-3:7:-1", "3:1:0.1", "a:b:c"] {
        let mut args = base.to_vec();
        args.push(grid);
        assert_eq!(code(&run(&args)), 2, "grid {grid}");
    }
    assert_eq!(code(&run(&["spectrum", "--p", "1", "--ks", "0,1", "--va", "1", "--vb", "1", "--grid", "0:1:0.5"])), 2);
    assert_eq!(code(&run(&["spectrum", "--p", "1", "--ks", "0,1", "--va", "1", "--vb", "1", "--grid", "0:1:0.5", "--allow-degenerate"])), 0);
}

#[test]
fn eigenvalue_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["eigenvalue", "--family", "bab4", "--p", "7", "--m-max", "30", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 2);
    for s in sols {
        assert!(s["decay_rate"].as_f64().unwrap() > 0.0);
        let series = std::fs::read_to_string(s["s_m_series_path"].as_str().unwrap()).unwrap();
        assert_eq!(series.lines().next(), Some("m\tell\tlog_s"));
    }
    assert!((sols[0]["mu"].as_f64().unwrap() - 1.7548).abs() < 1e-3);
}

#[test]
fn eigenvalue_needs_p_above_five() {
    let out = run(&["eigenvalue", "--family", "bab4", "--p", "5"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("p > 5"));
}

#[test]
fn help_documents_exit_codes() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Exit codes"));
}
