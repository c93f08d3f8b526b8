//! Config-driven sweeps. Each experiment yields a table and a summary with
//! per-assertion results; both are pure functions of the config and the
//! calibration file.

use crate::calibration::{Calibration, MARGIN};
use crate::config::ExperimentConfig;
use crate::random::{random_symbol, rng, trial_seed, unit_complex};
use crate::{compute, Check, LabError, C64, EXACT_TOL, SLACK_TOL, TRANSFER_TOL};
use dyadic_core::{AdjacentFamily, DyadicParams, FiniteDyadicSystem, Symbol};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use spectral::DenseOperator;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub column: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: u64,
    pub pass: bool,
    pub assertions: Vec<Check>,
    pub stats: Vec<Stats>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub summary: Summary,
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn stats(column: &str, vals: &[f64]) -> Stats {
    Stats {
        column: column.into(),
        min: vals.iter().copied().fold(f64::INFINITY, f64::min),
        max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: vals.iter().sum::<f64>() / vals.len().max(1) as f64,
    }
}

fn system(cfg: &ExperimentConfig) -> Result<FiniteDyadicSystem, LabError> {
    FiniteDyadicSystem::build(DyadicParams::new(cfg.d, cfg.depth, cfg.dim).map_err(compute)?, None).map_err(compute)
}

/// Checks fresh ratios against a frozen interval when the calibration has one for `key`.
fn calibrated(cal: Option<&Calibration>, key: &str, vals: &[f64]) -> Option<Check> {
    let iv = cal?.entries.get(key)?;
    let drift = iv.drift(vals);
    Some(Check::truth(
        &format!("calibrated {key}"),
        "ratio stays within the frozen calibration interval",
        drift <= MARGIN,
        drift,
        format!("frozen [{:.4}, {:.4}], drift ×{drift:.3} (allowed ×{MARGIN})", iv.lo, iv.hi),
    ))
}

fn positive_finite(name: &str, vals: &[f64]) -> Check {
    let bad = vals.iter().filter(|v| !(v.is_finite() && **v > 0.0)).count();
    Check::truth(name, "ratios are finite and positive", bad == 0, bad as f64, format!("{bad} of {} ratios outside (0, ∞)", vals.len()))
}

fn paraproduct_sweep(cfg: &ExperimentConfig, cal: Option<&Calibration>) -> Result<Report, LabError> {
    let sys = system(cfg)?;
    let m = cfg.m;
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng(trial_seed(cfg.seed, 1, t));
            let b = random_symbol(&sys, m, t, &mut r);
            let op = DenseOperator::blocked(paraproducts::paraproduct(&sys, &b).map_err(compute)?, m).map_err(compute)?;
            cfg.p
                .iter()
                .map(|&p| {
                    let norm = op.norm(p).map_err(compute)?;
                    let besov = norms::besov_haar(&sys, &b, p).map_err(compute)?;
                    Ok((t, p, norm, besov, norm / besov))
                })
                .collect::<Result<Vec<_>, LabError>>()
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let flat: Vec<_> = per_trial.into_iter().flatten().collect();
    let mut assertions = Vec::new();
    let mut st = Vec::new();
    for &p in &cfg.p {
        let vals: Vec<f64> = flat.iter().filter(|r| r.1 == p).map(|r| r.4).collect();
        assertions.push(positive_finite(&format!("ratio p={p}"), &vals));
        let key = match (cfg.dim, m, cfg.d, cfg.depth) {
            (1, 1, d, depth) => Some(format!("paraproduct/d={d}/N={depth}/p={p}")),
            (1, m, 2, 4) => Some(format!("block/m={m}/p={p}")),
            _ => None,
        };
        if let Some(key) = key {
            assertions.extend(calibrated(cal, &key, &vals));
        }
        st.push(stats(&format!("ratio p={p}"), &vals));
    }
    let rows = flat.iter().map(|r| vec![r.0.to_string(), r.1.to_string(), num(r.2), num(r.3), num(r.4)]).collect();
    Ok(report(cfg, vec!["trial", "p", "norm", "besov", "ratio"], rows, assertions, st))
}

fn splitting_sweep(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let sys = system(cfg)?;
    let d = sys.params().branching() as f64;
    let steps = cfg.sweep_step();
    let mut rows = Vec::new();
    let (mut upper, mut lower) = (f64::INFINITY, f64::INFINITY);
    for t in 0..cfg.trials {
        let mut r = rng(trial_seed(cfg.seed, 2, t));
        let b = crate::random::window_symbol(&sys, cfg.m, t, &mut r);
        for &step in &steps {
            let parts: Vec<_> = (0..step).map(|k| paraproducts::splitting(&sys, &b, step, k)).collect::<Result<_, _>>().map_err(compute)?;
            for &p in &cfg.p {
                let pow = |x: &crate::CMat| DenseOperator::blocked(x.clone(), cfg.m).and_then(|o| o.norm_pow(p)).map_err(compute);
                let (mut off, mut diag) = (0.0, 0.0);
                for s in &parts {
                    off += pow(&s.off_diagonal)?;
                    diag += pow(&s.diagonal)?;
                }
                let besov = norms::besov_haar_pow(&sys, &b, p).map_err(compute)?;
                let c_up = (d - 1.0) * d.powf(-p / 2.0) / (d.powf(step as f64 * p / 2.0) - 1.0);
                let c_low = (d - 1.0).powf(p / 2.0 - 1.0) / d.powf(p / 2.0 + 1.0);
                let su = (c_up * besov - off) / besov;
                let sl = (diag - c_low * besov) / besov;
                upper = upper.min(su);
                lower = lower.min(sl);
                rows.push(vec![t.to_string(), step.to_string(), p.to_string(), num(off), num(diag), num(besov), num(su), num(sl)]);
            }
        }
    }
    let mut assertions = vec![Check::slack("off-diagonal bound", "Σ_k ‖π^{(1)}_{b,k}‖_p^p ≤ (d−1)d^{−p/2}/(d^{Np/2}−1)·‖b‖_B^p", upper, SLACK_TOL)];
    if cfg.dim == 1 {
        assertions.push(Check::slack("diagonal lower bound", "Σ_k ‖π^{(0)}_{b,k}‖_p^p ≥ (d−1)^{p/2−1}/d^{p/2+1}·‖b‖_B^p", lower, SLACK_TOL));
    }
    Ok(report(cfg, vec!["trial", "step", "p", "off_diagonal", "diagonal", "besov", "upper_slack", "lower_slack"], rows, assertions, vec![]))
}

fn shift_sweep(cfg: &ExperimentConfig, cal: Option<&Calibration>) -> Result<Report, LabError> {
    let sys = system(cfg)?;
    let pairs: Vec<(usize, usize)> = cfg.sweep_i().into_iter().flat_map(|i| cfg.sweep_j().into_iter().map(move |j| (i, j))).collect();
    let p = cfg.p[0];
    let rows_per = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng(trial_seed(cfg.seed, 3, t));
            let b: Symbol = random_symbol(&sys, cfg.m, t, &mut r);
            let seeds: Vec<u64> = (0..2).map(|_| r.random()).collect();
            shifts::commutator_growth_sweep(&sys, &b, p, &pairs, &seeds).map(|v| (t, v)).map_err(compute)
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    let mut norm_vals = Vec::new();
    for &(i, j) in &pairs {
        let vals: Vec<f64> = rows_per.iter().flat_map(|(_, v)| v.iter().filter(|g| g.i == i && g.j == j).map(|g| g.normalized())).collect();
        if cfg.d == 2 && cfg.dim == 1 && cfg.depth == 6 && p == 2.0 && cfg.m == 1 {
            assertions.extend(calibrated(cal, &format!("shift/i={i}/j={j}"), &vals));
        }
        norm_vals.extend(vals);
    }
    for (t, v) in &rows_per {
        for g in v {
            rows.push(vec![t.to_string(), g.i.to_string(), g.j.to_string(), g.seed.to_string(), num(g.norm), num(g.besov), num(g.ratio), num(g.normalized())]);
        }
    }
    let mut worst: f64 = f64::INFINITY;
    for &(i, j) in &pairs {
        let spec = shifts::random_shift(&sys, i, j, cfg.seed).map_err(compute)?;
        worst = worst.min(1.0 - spectral::op_norm(&shifts::assemble_shift(&sys, &spec).map_err(compute)?));
    }
    assertions.push(Check::slack("shift contractivity", "‖S‖ ≤ 1", worst, SLACK_TOL));
    let st = vec![stats("normalized", &norm_vals)];
    Ok(report(cfg, vec!["trial", "i", "j", "shift_seed", "norm", "besov", "ratio", "normalized"], rows, assertions, st))
}

fn median_sweep(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let mut rows = Vec::new();
    let mut worst = f64::INFINITY;
    let mut fallbacks = 0;
    for t in 0..cfg.trials {
        let mut r = rng(trial_seed(cfg.seed, 4, t));
        let kind = t % 8;
        let pts = median::WeightedPointSet::new(crate::geometry::random_points(kind, &mut r)).map_err(compute)?;
        let rep = median::complex_median_report(&pts);
        let frac = rep.masses.iter().copied().fold(f64::INFINITY, f64::min) / pts.total();
        worst = worst.min(frac);
        fallbacks += usize::from(rep.case == median::MedianCase::Fallback);
        rows.push(vec![t.to_string(), kind.to_string(), pts.points().len().to_string(), num(pts.total()), num(frac), format!("{:?}", rep.case)]);
    }
    let assertions = vec![
        Check::slack("quadrant masses", "each closed quadrant holds ≥ 1/16 of the mass", worst - 1.0 / 16.0, 1e-12),
        Check::truth("no fallback", "constructive median needs no exhaustive search", fallbacks == 0, fallbacks as f64, format!("{fallbacks} fallbacks")),
    ];
    Ok(report(cfg, vec!["set", "family", "points", "total", "min_quadrant_fraction", "case"], rows, assertions, vec![]))
}

fn nwo_sweep(cfg: &ExperimentConfig, cal: Option<&Calibration>) -> Result<Report, LabError> {
    let depth = cfg.depth;
    let grid = kernels::Grid::new(vec![0.0; cfg.dim], 1.0 / (1 << depth) as f64, vec![1 << depth; cfg.dim]).map_err(compute)?;
    let cubes = kernels::dyadic_cubes(&grid, depth).map_err(compute)?;
    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    let mut st = Vec::new();
    for &p in &cfg.p {
        let reps: Vec<_> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let s = trial_seed(cfg.seed, 5, t);
                kernels::nwo_ratio(&kernels::random_operator(grid.n_cells(), s), &grid, &kernels::random_families(&grid, &cubes, s ^ 0xABCD), p)
            })
            .collect();
        let vals: Vec<f64> = reps.iter().map(|r| r.ratio).collect();
        for (t, r) in reps.iter().enumerate() {
            rows.push(vec![t.to_string(), p.to_string(), num(r.pairings), num(r.schatten), num(r.ratio)]);
        }
        assertions.push(positive_finite(&format!("ratio p={p}"), &vals));
        if (cfg.dim, depth) == (1, 4) || (cfg.dim, depth) == (2, 2) {
            assertions.extend(calibrated(cal, &format!("nwo/dim={}/p={p}", cfg.dim), &vals));
        }
        st.push(stats(&format!("ratio p={p}"), &vals));
    }
    Ok(report(cfg, vec!["trial", "p", "pairings", "schatten", "ratio"], rows, assertions, st))
}

fn factorization_sweep(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let k = kernels::KernelSpec::hilbert();
    let a_max = cfg.sweep_a().into_iter().fold(0.0, f64::max);
    let cells = (4.0 * (a_max / 2.0 + 3.0)).ceil() as usize;
    let grid = kernels::Grid::new(vec![0.0], 0.25, vec![cells]).map_err(compute)?;
    let t_op = kernels::discretize(&k, &grid, 2).map_err(compute)?;
    let q = kernels::CellCube { start: vec![0], side: 4 };
    let partners: Vec<_> = cfg.sweep_a().iter().map(|&a| kernels::partner_cube(&k, &t_op, &q, a).map(|p| (a, p.0))).collect::<Result<_, _>>().map_err(compute)?;
    let mut rows = Vec::new();
    let (mut residual, mut monotone): (f64, bool) = (0.0, true);
    for t in 0..cfg.trials {
        let mut r = rng(trial_seed(cfg.seed, 6, t));
        let vals: Vec<C64> = (0..4).map(|_| unit_complex(&mut r)).collect();
        let mean = vals.iter().sum::<C64>() / 4.0;
        let mut f = vec![C64::new(0.0, 0.0); grid.n_cells()];
        for (c, v) in vals.iter().enumerate() {
            f[c] = v - mean;
        }
        let scale = f.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let mut prev = f64::INFINITY;
        for (a, qt) in &partners {
            let fac = kernels::weak_factorization(&f, &q, qt, &t_op).map_err(compute)?;
            residual = residual.max(fac.residual / scale);
            monotone &= fac.tilde_ratio < prev;
            prev = fac.tilde_ratio;
            rows.push(vec![t.to_string(), a.to_string(), num(fac.residual), num(fac.h_ratio), num(fac.tilde_ratio)]);
        }
    }
    let assertions = vec![
        Check::residual("reconstruction", "f = g·T(h) − h·(T^*g)^* + f̃", residual, EXACT_TOL),
        Check::truth("remainder decays", "‖f̃‖/‖f‖ strictly decreases in A", monotone, 0.0, format!("monotone: {monotone}")),
    ];
    Ok(report(cfg, vec!["trial", "A", "residual", "h_ratio", "tilde_ratio"], rows, assertions, vec![]))
}

fn continuum_sweep(cfg: &ExperimentConfig, cal: Option<&Calibration>) -> Result<Report, LabError> {
    let per_axis = 1usize << cfg.depth;
    let fam = AdjacentFamily::new(cfg.dim);
    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    let mut st = Vec::new();
    for &p in &cfg.p {
        let reps = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut r = rng(trial_seed(cfg.seed, 7, t));
                let values: Vec<f64> = (0..per_axis.pow(cfg.dim as u32)).map(|_| r.random_range(-1.0..1.0)).collect();
                let b = norms::GridStep::scalar(cfg.dim, per_axis, &values).map_err(compute)?;
                let mut grids = 0.0;
                for g in 0..fam.n_grids() {
                    grids += norms::grid_besov_haar_pow(&b, &fam, g, cfg.depth as i32 + 1, p).map_err(compute)?;
                }
                let cont = norms::besov_continuum(&b, p, cfg.level).map_err(compute)?;
                Ok((t, grids.powf(1.0 / p), cont))
            })
            .collect::<Result<Vec<_>, LabError>>()?;
        let vals: Vec<f64> = reps.iter().map(|r| r.1 / r.2).collect();
        for r in &reps {
            rows.push(vec![r.0.to_string(), p.to_string(), num(r.1), num(r.2), num(r.1 / r.2)]);
        }
        assertions.push(positive_finite(&format!("ratio p={p}"), &vals));
        let frozen = crate::calibration::CONTINUUM_LEVEL.get(cfg.dim - 1).copied() == Some(cfg.level)
            && crate::calibration::CONTINUUM_DEPTH.get(cfg.dim - 1).copied() == Some(cfg.depth);
        if frozen {
            assertions.extend(calibrated(cal, &format!("continuum/dim={}/p={p}", cfg.dim), &vals));
        }
        st.push(stats(&format!("ratio p={p}"), &vals));
    }
    Ok(report(cfg, vec!["trial", "p", "grid_sum", "continuum", "ratio"], rows, assertions, st))
}

fn transference_sweep(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    use noncommutative::car::{car_transference_check, CarAlgebra};
    use noncommutative::tensor::{tensor_transference_check, TensorAlgebra};
    let n = cfg.depth;
    let car = CarAlgebra::new(n).map_err(compute)?;
    let tensor = TensorAlgebra::new(cfg.d, n).map_err(compute)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for t in 0..cfg.trials {
        let mut r = rng(trial_seed(cfg.seed, 8, t));
        let bc: Vec<C64> = (0..1 << n).map(|_| unit_complex(&mut r)).collect();
        let bt: Vec<C64> = (0..tensor.basis_len()).map(|_| unit_complex(&mut r)).collect();
        for &p in &cfg.p {
            for (name, tr) in [
                ("car", car_transference_check(&car, &bc, p).map_err(compute)?),
                ("tensor", tensor_transference_check(&tensor, &bt, p).map_err(compute)?),
            ] {
                worst = worst.max(tr.residual / tr.scalar_side.max(1.0));
                rows.push(vec![name.to_string(), t.to_string(), p.to_string(), num(tr.scalar_side), num(tr.walsh_side), num(tr.residual)]);
            }
        }
    }
    let assertions = vec![Check::residual("transference", "‖[π_b̃]‖_p = ‖π_b‖_p", worst, TRANSFER_TOL)];
    Ok(report(cfg, vec!["algebra", "trial", "p", "scalar_side", "walsh_side", "residual"], rows, assertions, vec![]))
}

fn report(cfg: &ExperimentConfig, header: Vec<&'static str>, rows: Vec<Vec<String>>, assertions: Vec<Check>, stats: Vec<Stats>) -> Report {
    let summary = Summary {
        experiment: cfg.experiment.clone(),
        seed: cfg.seed,
        pass: crate::all_pass(&assertions),
        assertions,
        stats,
        rows: rows.len(),
    };
    Report { table: Table { header, rows }, summary }
}

pub fn run(cfg: &ExperimentConfig, cal: Option<&Calibration>) -> Result<Report, LabError> {
    cfg.validate()?;
    match cfg.experiment.as_str() {
        "theorem1" | "block" => paraproduct_sweep(cfg, cal),
        "splitting" => splitting_sweep(cfg),
        "shift-growth" => shift_sweep(cfg, cal),
        "median-verify" => median_sweep(cfg),
        "nwo" => nwo_sweep(cfg, cal),
        "factorization" => factorization_sweep(cfg),
        "continuum" => continuum_sweep(cfg, cal),
        "transference" => transference_sweep(cfg),
        other => Err(LabError::Config(format!("unknown experiment `{other}`"))),
    }
}

pub fn csv_bytes(table: &Table) -> Result<Vec<u8>, LabError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| LabError::Compute(e.to_string()))
}

pub fn json_bytes(summary: &Summary) -> Result<Vec<u8>, LabError> {
    let mut out = serde_json::to_vec_pretty(summary)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `<experiment>.csv` and `<experiment>.json` into `dir`.
pub fn write(report: &Report, dir: &Path) -> Result<(PathBuf, PathBuf), LabError> {
    std::fs::create_dir_all(dir)?;
    let base = dir.join(&report.summary.experiment);
    let (csv_path, json_path) = (base.with_extension("csv"), base.with_extension("json"));
    std::fs::write(&csv_path, csv_bytes(&report.table)?)?;
    std::fs::write(&json_path, json_bytes(&report.summary)?)?;
    Ok((csv_path, json_path))
}
