use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qusum::cli::{RunManifest, BLOCK_RATE_HEADER, SIMULATE_HEADER, UNDETECTABLE_NOTE};
use qusum::qmath::{quantum_relative_entropy, sandwiched_renyi};
use qusum::schur::CanonicalPair;
use tempfile::TempDir;

fn qusum(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qusum"))
        .args(args)
        .current_dir(dir)
        .env_remove("QUSUM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> Output {
    let out = qusum(args, dir);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn block_rate_header_and_bounds() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "l_list = 1, 2, 3, 8\n");
    ok(&["block-rate", "--config", &cfg, "--out", "o"], tmp.path());
    let text = fs::read_to_string(tmp.path().join("o/block_rate.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), BLOCK_RATE_HEADER);
    let (header, rows) = csv_rows(&tmp.path().join("o/block_rate.csv"));
    assert_eq!(header.len(), 6);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let l = num(&row[0]);
        let (hay, opt, d) = (num(&row[1]), num(&row[2]), num(&row[4]));
        assert!(d - hay <= (l + 1.0).ln() / l);
        assert!(opt >= hay - 1e-12 && opt <= d + 1e-9);
        assert!((num(&row[5]) - (d - (l + 1.0).ln() / l)).abs() < 1e-15);
        assert!(num(&row[3]) >= opt - 1e-6);
    }
    assert!((num(&rows[0][2]) - num(&rows[0][3])).abs() < 1e-4);
}

#[test]
fn variational_column_is_empty_above_limit() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "l_list = 2, 30\nvariational_max_l = 2\n");
    ok(&["block-rate", "--config", &cfg, "--out", "o"], tmp.path());
    let (_, rows) = csv_rows(&tmp.path().join("o/block_rate.csv"));
    assert!(!rows[0][3].is_empty());
    assert!(rows[1][3].is_empty());
}

#[test]
fn divergences_pass_library_values_through() {
    let tmp = TempDir::new().unwrap();
    ok(&["divergences", "--out", "o"], tmp.path());
    let (_, rows) = csv_rows(&tmp.path().join("o/divergences.csv"));
    let (rho, sigma) = CanonicalPair::new(0.9, 0.9, std::f64::consts::FRAC_PI_4).unwrap().states();
    let d = rows.iter().find(|r| r[0] == "relative_entropy").unwrap();
    assert_eq!(num(&d[2]), quantum_relative_entropy(&sigma, &rho).unwrap());
    let s2 = rows.iter().find(|r| r[0] == "sandwiched_renyi" && r[1] == "2.0").unwrap();
    assert_eq!(num(&s2[2]), sandwiched_renyi(&sigma, &rho, 2.0).unwrap());
    assert!(rows.iter().any(|r| r[0] == "sufficient_block_length"));
}

#[test]
fn equal_states_have_zero_divergences() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "r0 = 0.6\nr1 = 0.6\ntheta = 0\neps =\n");
    ok(&["divergences", "--config", &cfg, "--out", "o"], tmp.path());
    let (_, rows) = csv_rows(&tmp.path().join("o/divergences.csv"));
    for row in &rows {
        assert!(num(&row[2]).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn orthogonal_pure_states_report_infinity() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "r0 = 1\nr1 = 1\ntheta = pi\n");
    let out = ok(&["divergences", "--config", &cfg, "--out", "o"], tmp.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains(UNDETECTABLE_NOTE));
    let (_, rows) = csv_rows(&tmp.path().join("o/divergences.csv"));
    assert_eq!(rows[0][0], "relative_entropy");
    assert_eq!(num(&rows[0][2]), f64::INFINITY);
}

#[test]
fn config_errors_exit_2_with_location() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "r0 = 0.5\n# fine\nl_list = 1, x\n");
    let out = qusum(&["block-rate", "--config", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3: field `l_list`"), "{err}");
    assert!(!tmp.path().join("o").exists());

    let json = write(tmp.path(), "c.json", r#"{"r1": 3}"#);
    let out = qusum(&["divergences", "--config", &json], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("field `r1`"));

    let out = qusum(&["divergences", "--preset", "nope"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_h_list_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "h_list =\n");
    let out = qusum(&["simulate", "--config", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("h_list"));
}

#[test]
fn censoring_beyond_limit_exits_4_and_keeps_results() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "c.cfg",
        "source = bernoulli\nh_list = 30\ncap = 50\ntrials = 20\nmax_censored_fraction = 0.5\n",
    );
    let out = qusum(&["simulate", "--config", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(4));
    let (_, rows) = csv_rows(&tmp.path().join("o/simulate.csv"));
    assert_eq!(num(&rows[0][9]), 1.0);
}

fn simulate_bytes(dir: &Path, sub: &str, threads: &str) -> Vec<(String, Vec<u8>)> {
    let cfg = write(dir, "det.cfg", "source = bernoulli\np_bias = 0.2\nq_bias = 0.6\nh_list = 2, 4\ntrials = 300\ntrajectories = 2\ntrajectory_steps = 50\n");
    ok(&["simulate", "--config", &cfg, "--seed", "42", "--threads", threads, "--out", sub], dir);
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_is_deterministic_across_runs_and_threads() {
    let tmp = TempDir::new().unwrap();
    let a = simulate_bytes(tmp.path(), "a", "1");
    let b = simulate_bytes(tmp.path(), "b", "1");
    let c = simulate_bytes(tmp.path(), "c", "4");
    assert_eq!(a.len(), 3);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let header = String::from_utf8(a.iter().find(|f| f.0 == "simulate.csv").unwrap().1.clone()).unwrap();
    assert_eq!(header.lines().next().unwrap(), SIMULATE_HEADER);
}

#[test]
fn manifest_digests_match_and_rerun_reproduces() {
    let tmp = TempDir::new().unwrap();
    ok(&["simulate", "--preset", "fast-accept", "--trials", "200", "--seed", "9", "--out", "first"], tmp.path());
    let manifest_path = tmp.path().join("first/manifest.json");
    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest.tool, "qusum");
    assert_eq!(manifest.version, env!("CARGO_PKG_VERSION"));
    assert!(manifest.verify(&tmp.path().join("first")).unwrap().is_empty());

    let cfg = manifest_path.display().to_string();
    ok(&["simulate", "--config", &cfg, "--out", "second"], tmp.path());
    let again: RunManifest =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("second/manifest.json")).unwrap()).unwrap();
    assert_eq!(again.outputs, manifest.outputs);
    assert_eq!(again.config, manifest.config);

    fs::write(tmp.path().join("first/simulate.csv"), "tampered").unwrap();
    assert_eq!(manifest.verify(&tmp.path().join("first")).unwrap(), vec!["simulate.csv".to_string()]);
}

#[test]
fn out_dir_defaults_to_environment() {
    let tmp = TempDir::new().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_qusum"))
        .args(["block-rate"])
        .current_dir(tmp.path())
        .env("QUSUM_OUT_DIR", tmp.path().join("env-out"))
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(tmp.path().join("env-out/block_rate.csv").exists());
}

#[test]
fn classical_preset_delay_scales_with_threshold() {
    let tmp = TempDir::new().unwrap();
    ok(&["simulate", "--preset", "sm-classical", "--out", "o"], tmp.path());
    let (_, rows) = csv_rows(&tmp.path().join("o/simulate.csv"));
    let delay = |h: &str| num(&rows.iter().find(|r| r[2] == h).unwrap()[5]);
    let ratio = delay("22.0") / delay("6.0");
    assert!((ratio / (22.0 / 6.0) - 1.0).abs() < 0.15, "ratio {ratio}");
}

#[test]
fn classical_demo_marks_the_change_point() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "trials = 100\ntrajectories = 1\n");
    ok(&["classical-demo", "--preset", "sm-classical", "--config", &cfg, "--out", "o"], tmp.path());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("o/classical_demo.json")).unwrap()).unwrap();
    assert_eq!(summary["nu"], 10_000);
    let (header, rows) = csv_rows(&tmp.path().join("o/classical_demo.csv"));
    assert_eq!(header, ["trajectory", "n", "z_sum", "w", "trend", "after_change"]);
    assert_eq!(rows.len(), 20_000);
    assert_eq!(rows[9_999][5], "false");
    assert_eq!(rows[10_000][5], "true");
    let d_pre = summary["d_pre"].as_f64().unwrap();
    let pre = &summary["slopes"]["pre_slope"];
    assert!((pre["mean"].as_f64().unwrap() + d_pre).abs() < 3.0 * pre["std_error"].as_f64().unwrap());
    let d_post = summary["d_post"].as_f64().unwrap();
    let post = &summary["slopes"]["post_slope"];
    assert!((post["mean"].as_f64().unwrap() - d_post).abs() < 3.0 * post["std_error"].as_f64().unwrap());
}
