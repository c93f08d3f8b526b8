//! Calibrated ratio suites.
//!
//! `calibrate` measures every ratio family on the calibration seed and writes
//! the observed `[lo, hi]` per key to a TOML file that is committed with the
//! code. `verify` re-measures on an independent seed and requires every value
//! to stay within `[lo / MARGIN, hi · MARGIN]`. Nothing is recomputed on the fly:
//! a missing file or key fails the check.

use crate::random::{random_symbol, rng, trial_seed};
use crate::{compute, Check, LabError, CMat, C64};
use dyadic_core::{AdjacentFamily, FiniteDyadicSystem};
use kernels::{besov_testing, discretize, dyadic_cubes, nwo_ratio, random_families, random_operator, Grid, KernelSpec};
use norms::{besov_continuum, grid_besov_haar_pow, GridStep};
use paraproducts::paraproduct;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral::{schatten, singular_values, triangular_project};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const CALIBRATION_SEED: u64 = 1;
pub const VERIFY_SEED: u64 = 2;
/// Allowed multiplicative drift of fresh ratios outside the frozen interval.
pub const MARGIN: f64 = 1.5;
/// Pinned factor for the block-size independence of the paraproduct ratio.
pub const BLOCK_FACTOR: f64 = 2.0;
pub const FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
    pub samples: usize,
}

impl Interval {
    pub fn of(values: &[f64]) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { lo, hi, mean: values.iter().sum::<f64>() / values.len() as f64, samples: values.len() }
    }

    /// Largest factor by which `values` leave the interval (1 when inside).
    pub fn drift(&self, values: &[f64]) -> f64 {
        values.iter().map(|&v| (v / self.hi).max(self.lo / v).max(1.0)).fold(1.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub format: u32,
    pub seed: u64,
    pub entries: BTreeMap<String, Interval>,
}

pub fn default_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("calibration.toml")
}

impl Calibration {
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Calibration(format!("{}: {e}", path.display())))?;
        let cal: Self = toml::from_str(&text).map_err(|e| LabError::Calibration(e.to_string()))?;
        if cal.format != FORMAT {
            return Err(LabError::Calibration(format!("format {} (expected {FORMAT})", cal.format)));
        }
        Ok(cal)
    }

    pub fn to_toml(&self) -> Result<String, LabError> {
        let body = toml::to_string(self).map_err(|e| LabError::Calibration(e.to_string()))?;
        Ok(format!("# Frozen ratio intervals written by `dyadic-lab calibrate`; edit only by recalibrating.\n{body}"))
    }
}

pub type Samples = BTreeMap<String, Vec<f64>>;

fn par_trials<T: Send>(n: usize, f: impl Fn(usize) -> Result<T, LabError> + Sync + Send) -> Result<Vec<T>, LabError> {
    (0..n).into_par_iter().map(f).collect()
}

/// `‖π_b‖_p / ‖b‖_B` for scalar symbols at every `(d, N, p)`.
pub fn paraproduct_ratios(seed: u64, trials: usize) -> Result<Samples, LabError> {
    let ps = [0.5, 1.0, 2.0, 4.0];
    let mut out = Samples::new();
    for d in [2usize, 3] {
        for depth in [4usize, 5] {
            let sys = FiniteDyadicSystem::standard(d, depth).map_err(compute)?;
            let rows = par_trials(trials, |t| {
                let mut r = rng(trial_seed(seed, 1000 + (d * 10 + depth) as u64, t));
                let b = random_symbol(&sys, 1, t, &mut r);
                let sv = singular_values(&paraproduct(&sys, &b).map_err(compute)?);
                ps.iter()
                    .map(|&p| {
                        let besov = norms::besov_haar(&sys, &b, p).map_err(compute)?;
                        Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p) / besov)
                    })
                    .collect::<Result<Vec<f64>, LabError>>()
            })?;
            for (k, p) in ps.iter().enumerate() {
                out.insert(format!("paraproduct/d={d}/N={depth}/p={p}"), rows.iter().map(|r| r[k]).collect());
            }
        }
    }
    Ok(out)
}

/// Same ratio for `m × m` block symbols under `Tr ⊗ tr_m`.
pub fn block_ratios(seed: u64, trials: usize) -> Result<Samples, LabError> {
    let ps = [1.0, 2.0];
    let sys = FiniteDyadicSystem::standard(2, 4).map_err(compute)?;
    let mut out = Samples::new();
    for m in [1usize, 2, 3] {
        let rows = par_trials(trials, |t| {
            let mut r = rng(trial_seed(seed, 1100 + m as u64, t));
            let b = random_symbol(&sys, m, t, &mut r);
            let sv = singular_values(&paraproduct(&sys, &b).map_err(compute)?);
            ps.iter()
                .map(|&p| {
                    let lhs = (sv.iter().map(|s| s.powf(p)).sum::<f64>() / m as f64).powf(1.0 / p);
                    Ok(lhs / norms::besov_haar(&sys, &b, p).map_err(compute)?)
                })
                .collect::<Result<Vec<f64>, LabError>>()
        })?;
        for (k, p) in ps.iter().enumerate() {
            out.insert(format!("block/m={m}/p={p}"), rows.iter().map(|r| r[k]).collect());
        }
    }
    Ok(out)
}

pub const SHIFT_SYMBOLS: usize = 12;
pub const SHIFT_SEEDS: usize = 3;

/// `‖[S, M_b]‖_2 / ‖b‖_B` normalized by `(i² + j² + 1)^{1/2}`, `d = 2`, `N = 6`.
pub fn shift_ratios(seed: u64) -> Result<Samples, LabError> {
    let sys = FiniteDyadicSystem::standard(2, 6).map_err(compute)?;
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).collect();
    let rows = par_trials(SHIFT_SYMBOLS, |t| {
        let mut r = rng(trial_seed(seed, 1200, t));
        let b = random_symbol(&sys, 1, t, &mut r);
        let seeds: Vec<u64> = (0..SHIFT_SEEDS).map(|_| r.random()).collect();
        shifts::commutator_growth_sweep(&sys, &b, 2.0, &pairs, &seeds).map_err(compute)
    })?;
    let mut out = Samples::new();
    for row in rows.into_iter().flatten() {
        out.entry(format!("shift/i={}/j={}", row.i, row.j)).or_default().push(row.normalized());
    }
    Ok(out)
}

/// Non-weakly-orthogonal pairings against `‖V‖_p` on dyadic grids.
pub fn nwo_ratios(seed: u64, trials: usize) -> Result<Samples, LabError> {
    let mut out = Samples::new();
    for (dim, depth) in [(1usize, 4usize), (2, 2)] {
        let grid = Grid::new(vec![0.0; dim], 1.0 / (1 << depth) as f64, vec![1 << depth; dim]).map_err(compute)?;
        let cubes = dyadic_cubes(&grid, depth).map_err(compute)?;
        for p in [1.5, 2.0, 4.0] {
            let vals = par_trials(trials, |t| {
                let s = trial_seed(seed, 1300 + dim as u64, t);
                Ok(nwo_ratio(&random_operator(grid.n_cells(), s), &grid, &random_families(&grid, &cubes, s ^ 0xABCD), p).ratio)
            })?;
            out.insert(format!("nwo/dim={dim}/p={p}"), vals);
        }
    }
    Ok(out)
}

pub const TESTING_DEPTH: usize = 4;
pub const TESTING_A: f64 = 5.0;

/// Median-split testing sums against the windowed Besov sum and the commutator norm (Hilbert kernel, line).
pub fn testing_ratios(seed: u64, trials: usize) -> Result<Samples, LabError> {
    let k = KernelSpec::hilbert();
    let unit = 1usize << TESTING_DEPTH;
    let grid = Grid::new(vec![0.0], 1.0 / unit as f64, vec![unit * 7]).map_err(compute)?;
    let t = discretize(&k, &grid, 2).map_err(compute)?;
    let mut out = Samples::new();
    for p in [1.5, 2.0, 3.0] {
        let rows = par_trials(trials, |trial| {
            let mut r = rng(trial_seed(seed, 1400, trial));
            let b: Vec<C64> = (0..unit).map(|_| crate::random::unit_complex(&mut r)).collect();
            let rep = besov_testing(&t, &k, &b, TESTING_DEPTH, TESTING_A, p).map_err(compute)?;
            Ok((rep.ratio, rep.testing / rep.commutator))
        })?;
        out.insert(format!("testing/besov/p={p}"), rows.iter().map(|r| r.0).collect());
        out.insert(format!("testing/commutator/p={p}"), rows.iter().map(|r| r.1).collect());
    }
    Ok(out)
}

pub const CONTINUUM_LEVEL: [u32; 2] = [2, 1];
pub const CONTINUUM_DEPTH: [usize; 2] = [3, 2];

/// Sum of the Haar Besov sums over all adjacent grids against the continuum
/// double integral at a fixed quadrature level.
pub fn continuum_ratios(seed: u64, trials: usize) -> Result<Samples, LabError> {
    let mut out = Samples::new();
    for dim in [1usize, 2] {
        let depth = CONTINUUM_DEPTH[dim - 1];
        let per_axis = 1usize << depth;
        let fam = AdjacentFamily::new(dim);
        for p in [1.5, 2.0] {
            let vals = par_trials(trials, |t| {
                let mut r = rng(trial_seed(seed, 1500 + dim as u64, t));
                let values: Vec<f64> = (0..per_axis.pow(dim as u32)).map(|_| r.random_range(-1.0..1.0)).collect();
                let b = GridStep::scalar(dim, per_axis, &values).map_err(compute)?;
                let mut grids = 0.0;
                for g in 0..fam.n_grids() {
                    grids += grid_besov_haar_pow(&b, &fam, g, depth as i32 + 1, p).map_err(compute)?;
                }
                Ok(grids.powf(1.0 / p) / besov_continuum(&b, p, CONTINUUM_LEVEL[dim - 1]).map_err(compute)?)
            })?;
            out.insert(format!("continuum/dim={dim}/p={p}"), vals);
        }
    }
    Ok(out)
}

/// Growth of the lower-triangular truncation on random matrices.
pub fn triangular_ratios(seed: u64, trials: usize) -> Result<Samples, LabError> {
    let mut out = Samples::new();
    for p in [1.0, 1.5, 2.0, 4.0] {
        let vals = par_trials(trials, |t| {
            let mut r = rng(trial_seed(seed, 1600, t));
            let a: CMat = crate::random::random_matrix(&mut r, 16, 16);
            let rank: Vec<usize> = (0..16).collect();
            Ok(schatten(&triangular_project(&a, &rank).map_err(compute)?, p) / schatten(&a, p))
        })?;
        out.insert(format!("triangular/p={p}"), vals);
    }
    Ok(out)
}

/// Trial counts used for both calibration and verification.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub paraproduct: usize,
    pub block: usize,
    pub nwo: usize,
    pub testing: usize,
    pub continuum: usize,
    pub triangular: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { paraproduct: 200, block: 200, nwo: 200, testing: 24, continuum: 100, triangular: 200 }
    }
}

pub fn measure_all(seed: u64, budget: Budget) -> Result<Samples, LabError> {
    let mut out = paraproduct_ratios(seed, budget.paraproduct)?;
    out.extend(block_ratios(seed, budget.block)?);
    out.extend(shift_ratios(seed)?);
    out.extend(nwo_ratios(seed, budget.nwo)?);
    out.extend(testing_ratios(seed, budget.testing)?);
    out.extend(continuum_ratios(seed, budget.continuum)?);
    out.extend(triangular_ratios(seed, budget.triangular)?);
    Ok(out)
}

pub fn calibrate(budget: Budget) -> Result<Calibration, LabError> {
    let samples = measure_all(CALIBRATION_SEED, budget)?;
    Ok(Calibration { format: FORMAT, seed: CALIBRATION_SEED, entries: samples.iter().map(|(k, v)| (k.clone(), Interval::of(v))).collect() })
}

fn family_of(key: &str) -> &str {
    key.split('/').next().unwrap_or(key)
}

fn describe(family: &str) -> &'static str {
    match family {
        "paraproduct" => "‖π_b‖_p ≍ ‖b‖_B for scalar symbols",
        "block" => "‖π_b‖_p ≍ ‖b‖_B for block symbols, constants independent of m",
        "shift" => "‖[S, M_b]‖_2 ≲ (i²+j²+1)^{1/2} ‖b‖_B",
        "nwo" => "pairings with bounded families are dominated by ‖V‖_p",
        "testing" => "median-split testing sums are comparable to the Besov sum and dominated by the commutator",
        "continuum" => "adjacent-grid Haar sums are comparable to the continuum Besov integral",
        "triangular" => "triangular truncation growth on random matrices",
        _ => "calibrated ratio",
    }
}

/// Fresh samples against the frozen intervals, one check per family.
pub fn compare(cal: &Calibration, fresh: &Samples) -> Vec<Check> {
    let mut by_family: BTreeMap<&str, (f64, String, usize)> = BTreeMap::new();
    for (key, vals) in fresh {
        let slot = by_family.entry(family_of(key)).or_insert((1.0, String::new(), 0));
        let drift = match cal.entries.get(key) {
            Some(iv) => iv.drift(vals),
            None => f64::INFINITY,
        };
        slot.2 += 1;
        if drift > slot.0 || slot.1.is_empty() {
            slot.1 = key.clone();
        }
        slot.0 = slot.0.max(drift);
    }
    let mut out: Vec<Check> = by_family
        .into_iter()
        .map(|(family, (drift, key, count))| {
            let pass = drift <= MARGIN;
            let detail = if drift.is_infinite() {
                format!("no frozen interval for {key}; run calibrate")
            } else {
                format!("{count} keys, worst drift ×{drift:.3} at {key} (allowed ×{MARGIN})")
            };
            Check::truth(&format!("calibrated {family} ratios"), describe(family), pass, drift, detail)
        })
        .collect();
    for p in [1.0, 2.0] {
        let ivs: Vec<Option<&Interval>> = (1..=3).map(|m| cal.entries.get(&format!("block/m={m}/p={p}"))).collect();
        let (pass, spread, detail) = if ivs.iter().all(|v| v.is_some()) {
            let ivs: Vec<&Interval> = ivs.into_iter().flatten().collect();
            let hi = ivs.iter().map(|i| i.hi).fold(0.0, f64::max) / ivs.iter().map(|i| i.hi).fold(f64::INFINITY, f64::min);
            let lo = ivs.iter().map(|i| i.lo).fold(0.0, f64::max) / ivs.iter().map(|i| i.lo).fold(f64::INFINITY, f64::min);
            let s = hi.max(lo);
            (s <= BLOCK_FACTOR, s, format!("upper/lower constants vary by ×{s:.3} over m = 1, 2, 3 (allowed ×{BLOCK_FACTOR})"))
        } else {
            (false, f64::INFINITY, "block intervals missing".into())
        };
        out.push(Check::truth(&format!("block ratio independent of m (p={p})"), describe("block"), pass, spread, detail));
    }
    out
}

/// Criterion group 4.
pub fn calibrated(cal_path: &Path, seed: u64) -> Result<Vec<Check>, LabError> {
    let cal = match Calibration::load(cal_path) {
        Ok(c) => c,
        Err(e) => return Ok(vec![Check::truth("calibration file", "frozen calibration is present", false, f64::INFINITY, e.to_string())]),
    };
    if seed == cal.seed {
        return Err(LabError::Calibration(format!("verification seed {seed} equals the calibration seed")));
    }
    let fresh = measure_all(seed, Budget::default())?;
    Ok(compare(&cal, &fresh))
}
