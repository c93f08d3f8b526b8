//! Experiment runner and verification suites for the dyadic workspace.
//!
//! Every suite returns a list of [`Check`]s. Exact checks compare residuals
//! against pinned tolerances, explicit-constant checks report the worst slack
//! of an inequality, and calibrated checks compare fresh ratios against the
//! frozen intervals in `calibration.toml`.

pub mod algebra;
pub mod calibration;
pub mod config;
pub mod constants;
pub mod exact;
pub mod experiments;
pub mod geometry;
pub mod kernel_checks;
pub mod random;
pub mod suites;

use serde::Serialize;
use thiserror::Error;

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;

/// Residual tolerance of the exact identities (scaled by the operand size).
pub const EXACT_TOL: f64 = 1e-12;
/// Allowed negative slack of the explicit-constant inequalities.
pub const SLACK_TOL: f64 = 1e-10;
/// Residual tolerance of the transference equalities.
pub const TRANSFER_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown suite `{0}`")]
    Suite(String),
    #[error("calibration: {0}")]
    Calibration(String),
    #[error("{0}")]
    Compute(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Wrap any library error as a computation failure.
pub fn compute<E: std::fmt::Display>(e: E) -> LabError {
    LabError::Compute(e.to_string())
}

/// One assertion: a name, the property it encodes, and its worst observed value.
///
/// `worst` is a residual for identities, a slack for inequalities (negative
/// means violated) and an extreme ratio for calibrated checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub property: String,
    pub pass: bool,
    pub worst: f64,
    pub detail: String,
}

impl Check {
    pub fn residual(name: &str, property: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            property: property.into(),
            pass: value.is_finite() && value <= tol,
            worst: value,
            detail: format!("residual {value:.3e} (tolerance {tol:.0e})"),
        }
    }

    pub fn slack(name: &str, property: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            property: property.into(),
            pass: value.is_finite() && value >= -tol,
            worst: value,
            detail: format!("worst slack {value:.3e} (allowed {:.0e})", -tol),
        }
    }

    pub fn truth(name: &str, property: &str, pass: bool, worst: f64, detail: String) -> Self {
        Self { name: name.into(), property: property.into(), pass, worst, detail }
    }

    pub fn line(&self) -> String {
        let tag = if self.pass { "ok  " } else { "FAIL" };
        format!("{tag} {:<44} {:>12.4e}  {} [{}]", self.name, self.worst, self.detail, self.property)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
