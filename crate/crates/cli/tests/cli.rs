use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grrhdr::io::{decode_measurement, MeasurementFiles};
use grrhdr::simulate::saturation_rate;

fn grrhdr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grrhdr")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn ok(args: &[&str]) -> Output {
    let out = grrhdr(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A 32x32 corpus scene and a shuffled GRR capture of it at 10% saturation.
fn captured(dir: &Path) -> (PathBuf, PathBuf) {
    let corpus = dir.join("corpus");
    ok(&["make-corpus", "-o", s(&corpus), "--count", "1", "--width", "32", "--height", "32", "--seed", "4"]);
    let scene = corpus.join("scene_000.pfm");
    let meas = dir.join("meas");
    ok(&[
        "simulate",
        s(&scene),
        "-o",
        s(&meas),
        "--t0",
        "0.000125",
        "--tr",
        "0.015",
        "--shuffle-seed",
        "7",
        "--noise",
        "1",
        "--seed",
        "3",
        "--target-saturation",
        "0.1",
    ]);
    (scene, meas)
}

fn read_measurement(prefix: &Path) -> MeasurementFiles {
    let with = |ext: &str| fs::read(format!("{}{ext}", prefix.display())).unwrap();
    MeasurementFiles { pgm: with(".pgm"), mask: with(".mask.pbm"), sidecar: with(".json") }
}

fn manifest(out: &Path, ext: &str) -> serde_json::Value {
    let path = format!("{}{ext}.manifest.json", out.display());
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn simulate_reports_rates_of_the_written_frame() {
    let dir = tempfile::tempdir().unwrap();
    let (_, meas) = captured(dir.path());
    let (m, sidecar) = decode_measurement(&read_measurement(&meas)).unwrap();
    let stats = saturation_rate(&m);
    assert_eq!(sidecar.saturation_rate, stats.saturated);
    assert!((stats.saturated - 0.1).abs() <= 0.01, "{}", stats.saturated);
    let man = manifest(&meas, "");
    assert_eq!(man["format"], "grrhdr-manifest");
    assert_eq!(man["command"], "simulate");
    assert_eq!(man["summary"]["saturation_rate"].as_f64().unwrap(), stats.saturated);
}

#[test]
fn simulation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (scene, meas) = captured(dir.path());
    let again = dir.path().join("again");
    ok(&[
        "simulate",
        s(&scene),
        "-o",
        s(&again),
        "--t0",
        "0.000125",
        "--tr",
        "0.015",
        "--shuffle-seed",
        "7",
        "--noise",
        "1",
        "--seed",
        "3",
        "--target-saturation",
        "0.1",
    ]);
    assert_eq!(read_measurement(&meas), read_measurement(&again));
}

#[test]
fn reconstruct_and_score() {
    let dir = tempfile::tempdir().unwrap();
    let (scene, meas) = captured(dir.path());
    let rec = dir.path().join("rec");
    ok(&["reconstruct", &format!("{}.pgm", meas.display()), "-o", s(&rec), "--erasure-bounds"]);
    let report = fs::read_to_string(format!("{}.report.txt", rec.display())).unwrap();
    assert!(report.contains("# iterations"));
    let scores = dir.path().join("scores");
    ok(&["metrics", "--reference", s(&scene), "--test", &format!("{}.pfm", rec.display()), "-o", s(&scores)]);
    let csv = fs::read_to_string(format!("{}.csv", scores.display())).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("psnr_db,psnr_gamma_db,ssim"));
    let psnr: f64 = lines.next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(psnr > 15.0, "{psnr}");
}

#[test]
fn replay_detects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (scene, meas) = captured(dir.path());
    let man = format!("{}.manifest.json", meas.display());
    let out = ok(&["replay", &man]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok "));
    let mut bytes = fs::read(&scene).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x40;
    fs::write(&scene, bytes).unwrap();
    assert_eq!(code(&grrhdr(&["replay", &man])), 6);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (scene, meas) = captured(dir.path());
    let out = dir.path().join("x");
    let pgm = format!("{}.pgm", meas.display());

    assert_eq!(code(&grrhdr(&["simulate", s(&scene), "-o", s(&out), "--t0", "-1", "--identity-optics"])), 2);
    assert_eq!(code(&grrhdr(&["simulate", s(&scene), "-o", s(&out), "--t0", "1"])), 2);
    assert_eq!(code(&grrhdr(&["simulate", "--bogus"])), 2);
    let missing = dir.path().join("missing.pfm");
    assert_eq!(code(&grrhdr(&["simulate", s(&missing), "-o", s(&out), "--t0", "1", "--identity-optics"])), 4);
    let junk = dir.path().join("junk.pfm");
    fs::write(&junk, b"Pf\n2 2\n-1.0\nshort").unwrap();
    assert_eq!(code(&grrhdr(&["simulate", s(&junk), "-o", s(&out), "--t0", "1", "--identity-optics"])), 3);
    assert_eq!(code(&grrhdr(&["reconstruct", &pgm, "-o", s(&out), "--max-iters", "1", "--require-convergence"])), 5);
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let scenarios = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/ablation.json");
    assert_eq!(code(&grrhdr(&["ablation", "--corpus", s(&empty), "--scenarios", scenarios, "-o", s(&out)])), 2);
}

#[test]
fn version_lists_formats() {
    let out = ok(&["--version"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("measurement sidecar: 1"));
    assert!(text.contains("manifest: 1"));
}
