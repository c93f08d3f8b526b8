//! Named verification suites.

use crate::{algebra, calibration, constants, exact, geometry, kernel_checks, Check, LabError};
use serde::Serialize;
use std::path::Path;

pub const SUITES: [&str; 10] =
    ["exact-identities", "explicit-constants", "transference", "median", "shifts", "kernels", "covering", "calibrated", "determinism", "all"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub assertions: Vec<Check>,
}

/// Reruns one experiment and compares the serialized outputs byte for byte.
pub fn determinism(cal_path: &Path, seed: u64) -> Result<Vec<Check>, LabError> {
    let cal = calibration::Calibration::load(cal_path).ok();
    let mut out = Vec::new();
    for text in [
        "experiment = \"theorem1\"\nd = 2\ndepth = 4\np = [0.5, 2.0]\ntrials = 12\n",
        "experiment = \"median-verify\"\ntrials = 60\n",
        "experiment = \"shift-growth\"\ndepth = 4\ntrials = 2\n[sweep]\ni = [0, 1]\nj = [0, 2]\n",
    ] {
        let cfg = crate::config::ExperimentConfig::from_toml(&format!("seed = {seed}\n{text}"))?;
        let a = crate::experiments::run(&cfg, cal.as_ref())?;
        let b = crate::experiments::run(&cfg, cal.as_ref())?;
        let same = crate::experiments::csv_bytes(&a.table)? == crate::experiments::csv_bytes(&b.table)?
            && crate::experiments::json_bytes(&a.summary)? == crate::experiments::json_bytes(&b.summary)?;
        out.push(Check::truth(
            &format!("rerun of {} is byte-identical", cfg.experiment),
            "same config, seed and calibration give identical outputs",
            same,
            if same { 0.0 } else { 1.0 },
            format!("{} rows", a.table.rows.len()),
        ));
    }
    Ok(out)
}

pub fn shift_suite(seed: u64) -> Result<Vec<Check>, LabError> {
    let mut out = exact::shift_blocks(seed)?;
    out.push(constants::shift_contractivity(seed)?);
    out.push(constants::coefficient_enforcement(seed)?);
    Ok(out)
}

pub fn run_suite(name: &str, seed: u64, cal_path: &Path) -> Result<Vec<Check>, LabError> {
    let checks = match name {
        "exact-identities" => {
            let mut v = exact::identities(seed)?;
            v.push(exact::besov_parseval(seed)?);
            v
        }
        "explicit-constants" => constants::explicit_constants(seed)?,
        "transference" => algebra::algebra_suite(seed)?,
        "median" => geometry::median_suite(seed)?,
        "shifts" => shift_suite(seed)?,
        "kernels" => kernel_checks::kernel_suite(seed)?,
        "covering" => vec![geometry::covering(seed)?],
        "calibrated" => calibration::calibrated(cal_path, seed)?,
        "determinism" => determinism(cal_path, seed)?,
        "all" => {
            let mut v = Vec::new();
            for s in SUITES.iter().filter(|s| **s != "all" && **s != "shifts") {
                v.extend(run_suite(s, seed, cal_path)?);
            }
            v
        }
        other => return Err(LabError::Suite(other.to_string())),
    };
    Ok(checks)
}

pub fn verify(name: &str, seed: u64, cal_path: &Path) -> Result<SuiteReport, LabError> {
    let assertions = run_suite(name, seed, cal_path)?;
    Ok(SuiteReport { suite: name.into(), seed, pass: crate::all_pass(&assertions), assertions })
}
