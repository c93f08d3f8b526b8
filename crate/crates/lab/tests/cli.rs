use std::path::PathBuf;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadic-lab")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dyadic-lab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn run_writes_reports_and_is_reproducible() {
    let dir = scratch("run");
    let cfg = dir.join("median.toml");
    std::fs::write(&cfg, "experiment = \"median-verify\"\nseed = 5\ntrials = 40\n").unwrap();
    let mut csvs = Vec::new();
    for k in 0..2 {
        let out = dir.join(format!("out{k}"));
        let o = lab(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push(std::fs::read(out.join("median-verify.csv")).unwrap());
        let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("median-verify.json")).unwrap()).unwrap();
        assert_eq!(json["experiment"], "median-verify");
        assert_eq!(json["seed"], 5);
        assert_eq!(json["pass"], true);
        assert_eq!(json["rows"], 40);
    }
    assert_eq!(csvs[0], csvs[1]);
    let header = String::from_utf8(csvs[0].clone()).unwrap();
    assert!(header.starts_with("set,family,points,total,min_quadrant_fraction,case\n"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = scratch("seed");
    let cfg = dir.join("t.toml");
    std::fs::write(&cfg, "experiment = \"theorem1\"\nseed = 1\ntrials = 5\n").unwrap();
    let read = |seed: &str| {
        let out = dir.join(seed);
        assert!(lab(&["run", "--config", cfg.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()]).status.success());
        std::fs::read(out.join("theorem1.csv")).unwrap()
    };
    assert_ne!(read("3"), read("4"));
}

#[test]
fn invalid_inputs_exit_nonzero() {
    let dir = scratch("invalid");
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "experiment = \"theorem1\"\n").unwrap();
    let o = lab(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));

    let o = lab(&["verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exact-identities"));
}

#[test]
fn verify_writes_json_report() {
    let dir = scratch("verify");
    let path = dir.join("kernels.json");
    let o = lab(&["verify", "--suite", "kernels", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(json["suite"], "kernels");
    assert!(json["assertions"].as_array().unwrap().iter().all(|a| a["pass"] == true));
}

#[test]
fn calibrate_refuses_to_overwrite() {
    let dir = scratch("calibrate");
    let path = dir.join("cal.toml");
    std::fs::write(&path, "keep").unwrap();
    let o = lab(&["calibrate", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--force"));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "keep");
}

#[test]
fn missing_calibration_fails_the_calibrated_suite() {
    let dir = scratch("missing");
    let o = lab(&["verify", "--suite", "calibrated", "--calibration", dir.join("none.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
