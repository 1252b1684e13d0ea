use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qtv_core::image::{read_image, write_image, Image};
use qtv_core::pipeline::rmse;
use tempfile::TempDir;

fn qtv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtv"))
        .args(args)
        .env("QTV_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = qtv(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sample(dir: &TempDir) -> PathBuf {
    let p = path(dir, "clean.pgm");
    let img = Image::from_fn(
        12,
        10,
        8,
        |x, y| if (x / 4 + y / 5) % 2 == 0 { 60 } else { 190 },
    )
    .unwrap();
    write_image(&img, &p).unwrap();
    p
}

#[test]
fn corrupt_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = sample(&dir);
    let (a, b) = (path(&dir, "a.pgm"), path(&dir, "b.pgm"));
    for out in [&a, &b] {
        ok(&[
            "corrupt",
            s(&input),
            s(out),
            "--noise",
            "awgn",
            "--sigma",
            "10",
            "--seed",
            "7",
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path(&dir, "a.pgm.json")).unwrap()).unwrap();
    assert_eq!(sidecar["noise"]["kind"], "awgn");
    assert_eq!(sidecar["noise"]["sigma"], 10.0);
    assert_eq!(sidecar["noise"]["seed"], 7);
}

#[test]
fn corrupt_zero_rate_is_identity() {
    let dir = TempDir::new().unwrap();
    let input = sample(&dir);
    let out = path(&dir, "spn.pgm");
    ok(&[
        "corrupt",
        s(&input),
        s(&out),
        "--noise",
        "spn",
        "--rate",
        "0",
    ]);
    assert_eq!(read_image(&out).unwrap(), read_image(&input).unwrap());
}

#[test]
fn corrupt_missing_sigma_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let input = sample(&dir);
    let out = qtv(&[
        "corrupt",
        s(&input),
        s(&path(&dir, "x.pgm")),
        "--noise",
        "awgn",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_is_io_error() {
    let dir = TempDir::new().unwrap();
    let out = qtv(&[
        "denoise",
        s(&path(&dir, "none.pgm")),
        s(&path(&dir, "o.pgm")),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_input_is_contract_error() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.pgm");
    std::fs::write(&bad, b"not an image").unwrap();
    let out = qtv(&["denoise", s(&bad), s(&path(&dir, "o.pgm"))]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn tv_and_qtv_outputs_are_identical() {
    let dir = TempDir::new().unwrap();
    let clean = sample(&dir);
    let noisy = path(&dir, "noisy.pgm");
    ok(&[
        "corrupt",
        s(&clean),
        s(&noisy),
        "--noise",
        "awgn",
        "--sigma",
        "20",
        "--seed",
        "3",
    ]);
    let (tv, qtv_out) = (path(&dir, "tv.pgm"), path(&dir, "qtv.pgm"));
    for (method, out) in [("tv", &tv), ("qtv", &qtv_out)] {
        ok(&[
            "denoise",
            s(&noisy),
            s(out),
            "--method",
            method,
            "--lambda",
            "0.5",
        ]);
    }
    assert_eq!(
        std::fs::read(&tv).unwrap(),
        std::fs::read(&qtv_out).unwrap()
    );
}

#[test]
fn denoise_reports_iterations_and_rmse() {
    let dir = TempDir::new().unwrap();
    let clean = sample(&dir);
    let noisy = path(&dir, "noisy.pgm");
    ok(&[
        "corrupt",
        s(&clean),
        s(&noisy),
        "--noise",
        "spn",
        "--rate",
        "10",
        "--seed",
        "1",
    ]);
    let out = path(&dir, "out.pgm");
    let stdout = ok(&[
        "denoise",
        s(&noisy),
        s(&out),
        "--max-iters",
        "1",
        "--reference",
        s(&clean),
    ]);
    assert!(stdout.contains("iterations: 1"), "{stdout}");
    assert_eq!(
        stdout
            .lines()
            .find(|l| l.starts_with("ratios:"))
            .unwrap()
            .split_whitespace()
            .count(),
        2
    );
    let want = rmse(&read_image(&out).unwrap(), &read_image(&clean).unwrap()).unwrap();
    assert!(stdout.contains(&format!("rmse: {want:.4}")), "{stdout}");
}

#[test]
fn qtv_rejects_float_mode() {
    let dir = TempDir::new().unwrap();
    let clean = sample(&dir);
    let out = qtv(&[
        "denoise",
        s(&clean),
        s(&path(&dir, "o.pgm")),
        "--method",
        "qtv",
        "--mode",
        "float",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let dir = TempDir::new().unwrap();
    let clean = sample(&dir);
    assert!(ok(&["verify", s(&clean), "--lambda", "2"]).contains("ok"));
}

fn depth_rows(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["depth"];
    all.extend_from_slice(args);
    serde_json::from_str(&ok(&all)).unwrap()
}

fn module(v: &serde_json::Value, name: &str) -> serde_json::Value {
    v["modules"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["module"] == name)
        .unwrap_or_else(|| panic!("no {name} row"))
        .clone()
}

#[test]
fn depth_reports_closed_forms() {
    let v = depth_rows(&["--q", "8", "--convention", "paper"]);
    assert_eq!(module(&v, "COMP")["depth"], 64);
    assert_eq!(v["report"]["convention"], "paper");
    let v = depth_rows(&["--q", "4"]);
    assert_eq!(module(&v, "PC")["closed_form"], 248);
    assert_eq!(module(&v, "PC")["depth"], 248);
    let v = depth_rows(&["--q", "2"]);
    assert_eq!(module(&v, "MF")["depth"], 162);
    let v = depth_rows(&["--q", "2", "--convention", "strict"]);
    assert_eq!(v["report"]["convention"], "strict");
    assert!(module(&v, "MF")["strict_depth"].as_u64().unwrap() > 0);
}

#[test]
fn export_demo_has_twelve_toffolis() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "demo.qasm");
    ok(&["export", "--demo-2x2", s(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;"));
    assert_eq!(
        text.lines()
            .filter(|l| l.trim_start().starts_with("ccx "))
            .count(),
        12
    );
    qtv_core::circuit::qasm::parse_qasm(&text).unwrap();
}

#[test]
fn export_zero_patch_neqr_is_only_hadamards() {
    let dir = TempDir::new().unwrap();
    let patch = path(&dir, "zero.pgm");
    write_image(&Image::filled(4, 4, 8, 0).unwrap(), &patch).unwrap();
    let out = path(&dir, "zero.qasm");
    ok(&["export", "--patch", s(&patch), "--neqr-only", s(&out)]);
    let summary =
        qtv_core::circuit::qasm::parse_qasm(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(summary.gates, 4);
    assert_eq!(summary.counts.get("h"), Some(&4));
}

#[test]
fn export_full_patch_parses() {
    let dir = TempDir::new().unwrap();
    let patch = path(&dir, "p.pgm");
    write_image(
        &Image::from_fn(4, 4, 4, |x, y| (x * 4 + y) as u8).unwrap(),
        &patch,
    )
    .unwrap();
    let out = path(&dir, "p.qasm");
    ok(&["export", "--patch", s(&patch), "--lambda", "0.5", s(&out)]);
    let summary =
        qtv_core::circuit::qasm::parse_qasm(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(summary.counts.contains_key("cswap"));
    assert_eq!(qtv(&["export", s(&out)]).status.code(), Some(2));
}

#[test]
fn reproduce_scaled_row() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "qr.csv");
    let stdout = ok(&[
        "reproduce",
        "--figure",
        "qr-awgn",
        "--scale",
        "--csv",
        s(&csv),
    ]);
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("qr-awgn")).count(),
        3
    );
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);
    assert_eq!(
        qtv(&["reproduce", "--figure", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn bad_worker_count_is_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_qtv"))
        .args(["depth", "--q", "2"])
        .env("QTV_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
