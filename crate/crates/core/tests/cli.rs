use std::path::PathBuf;
use std::process::Command;

use uav_los::experiment::parse_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uav-los"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("uav-los-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn run_is_byte_reproducible() {
    let run = |out: &PathBuf| {
        let s = bin()
            .args(["run", "--config"])
            .arg(config("velocity.json"))
            .args(["--trials", "50", "--seed", "9", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(s.success());
        std::fs::read(out).unwrap()
    };
    let (a, b) = (scratch("a.csv"), scratch("b.csv"));
    assert_eq!(run(&a), run(&b));
}

#[test]
fn run_columns_are_in_range() {
    let out = bin().args(["run", "--config"]).arg(config("uav_height.json")).args(["--trials", "40"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# uav-los v1 config_hash="));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 11);
    for r in rows {
        let t = r.t_min.unwrap();
        let a = r.analytic.unwrap();
        assert!((0.0..=10.0).contains(&t));
        assert!(a >= 0.0 && a <= t + 1e-9);
        assert!(r.mc_mean >= 0.0 && r.mc_mean <= t + 1e-9);
        assert_eq!(r.trials, 40);
    }
}

#[test]
fn bad_config_exits_with_two() {
    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"preset": "urban", "bogus": 1}"#).unwrap();
    let s = bin().args(["run", "--config"]).arg(&path).status().unwrap();
    assert_eq!(s.code(), Some(2));
    let s = bin().args(["run", "--config"]).arg(scratch("missing.json")).status().unwrap();
    assert_eq!(s.code(), Some(2));
}

#[test]
fn validate_reports_jsonl() {
    let out = bin().args(["validate", "--suite", "poisson"]).output().unwrap();
    assert!(out.status.success());
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn grid_dump_round_trips() {
    let out = bin().args(["grid", "dump", "--preset", "suburban", "--seed", "4"]).output().unwrap();
    assert!(out.status.success());
    let grid = uav_los::UrbanGrid::from_json(std::str::from_utf8(&out.stdout).unwrap().trim()).unwrap();
    assert_eq!(grid.seed, 4);
    assert_eq!(grid.params.mu_b, 37.0);
    let custom = bin().args(["grid", "dump", "--preset", "custom"]).status().unwrap();
    assert_eq!(custom.code(), Some(2));
}
