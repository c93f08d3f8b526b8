//! Inequalities with explicit constants, 200 random inputs each.
//!
//! Slacks are relative: `(rhs − lhs) / max(lhs, rhs)` for `lhs ≤ rhs`.

use crate::random::{random_matrix, random_symbol, rng, trial_seed, window_symbol};
use crate::{compute, Check, LabError, CMat, C64, SLACK_TOL};
use dyadic_core::{CubeId, FiniteDyadicSystem, DyadicParams, Symbol};
use paraproducts::{band, paraproduct, splitting};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use spectral::{block_diagonal_project, op_norm, schatten, DenseOperator};
use std::collections::BTreeMap;

pub const TRIALS: usize = 200;

fn rel_slack(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (rhs - lhs) / scale
    }
}

fn op_pow(mat: CMat, m: usize, p: f64) -> Result<f64, LabError> {
    DenseOperator::blocked(mat, m).and_then(|o| o.norm_pow(p)).map_err(compute)
}

/// Minimum over `TRIALS` symbols (scalar and 2×2 blocks alternate) of `f`.
fn min_over_symbols(
    sys: &FiniteDyadicSystem,
    seed: u64,
    stream: u64,
    window: bool,
    f: impl Fn(&Symbol) -> Result<f64, LabError> + Sync,
) -> Result<f64, LabError> {
    let vals: Vec<f64> = (0..TRIALS)
        .into_par_iter()
        .map(|t| {
            let m = 1 + t % 2;
            let mut r = rng(trial_seed(seed, stream, t));
            let b = if window { window_symbol(sys, m, t / 2, &mut r) } else { random_symbol(sys, m, t / 2, &mut r) };
            f(&b)
        })
        .collect::<Result<_, _>>()?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

fn sys(d: usize, depth: usize) -> Result<FiniteDyadicSystem, LabError> {
    FiniteDyadicSystem::standard(d, depth).map_err(compute)
}

/// `besov_osc ≤ (d^{1/p} − 1)^{-1} besov_diff` and `besov_diff^p ≤ d · besov_osc^p`.
pub fn oscillation_bounds(seed: u64) -> Result<Vec<Check>, LabError> {
    let (mut upper, mut lower) = (f64::INFINITY, f64::INFINITY);
    for d in [2usize, 3] {
        let s = sys(d, 4)?;
        for (pi, p) in [1.0, 1.5, 2.0, 3.0].into_iter().enumerate() {
            let stream = 100 + (d * 10 + pi) as u64;
            let c = ((d as f64).powf(1.0 / p) - 1.0).recip();
            upper = upper.min(min_over_symbols(&s, seed, stream, false, |b| {
                let osc = norms::besov_osc(&s, b, p).map_err(compute)?;
                Ok(rel_slack(osc, c * norms::besov_diff(&s, b, p).map_err(compute)?))
            })?);
            lower = lower.min(min_over_symbols(&s, seed, stream + 50, false, |b| {
                let diff = norms::besov_diff_pow(&s, b, p).map_err(compute)?;
                Ok(rel_slack(diff, d as f64 * norms::besov_osc_pow(&s, b, p).map_err(compute)?))
            })?);
        }
    }
    Ok(vec![
        Check::slack("oscillation below difference form", "besov_osc ≤ (d^{1/p} − 1)^{-1} besov_diff", upper, SLACK_TOL),
        Check::slack("difference below oscillation form", "besov_diff^p ≤ d · besov_osc^p", lower, SLACK_TOL),
    ])
}

/// `Σ_{I ∈ D_s, i} ‖b_I^i‖_p^p / |I|^{p/2}` at one scale.
fn scale_sum(sys: &FiniteDyadicSystem, b: &Symbol, s: usize, p: f64) -> f64 {
    (1..sys.basis_dim())
        .filter(|&beta| sys.basis_scale(beta) == Some(s))
        .map(|beta| b.block_lp_pow(beta, p) / sys.measure(s).powf(p / 2.0))
        .sum()
}

fn besov_pow(sys: &FiniteDyadicSystem, b: &Symbol, p: f64) -> f64 {
    (0..sys.depth()).map(|s| scale_sum(sys, b, s, p)).sum()
}

/// `‖band(n, m)‖_p^p ≤ (d−1) d^{(n−m)p/2} Σ_{I∈D_m,i} (‖b_I^i‖_p/|I|^{1/2})^p` for `n < m`.
pub fn band_bound(seed: u64) -> Result<Check, LabError> {
    let mut worst = f64::INFINITY;
    for (d, depth) in [(2usize, 5usize), (3, 4)] {
        let s = sys(d, depth)?;
        for (pi, p) in [0.3, 0.7].into_iter().enumerate() {
            worst = worst.min(min_over_symbols(&s, seed, 200 + (d * 10 + pi) as u64, false, |b| {
                let mut w = f64::INFINITY;
                for n in 0..depth {
                    for out in n + 1..depth {
                        let lhs = op_pow(band(&s, b, n, out).map_err(compute)?, b.m, p)?;
                        let c = (d - 1) as f64 * (d as f64).powf((n as f64 - out as f64) * p / 2.0);
                        w = w.min(rel_slack(lhs, c * scale_sum(&s, b, out, p)));
                    }
                }
                Ok(w)
            })?);
        }
    }
    Ok(Check::slack("band norm bound", "‖d_{m+1}π_b d_{n+1}‖_p^p ≤ (d−1)d^{(n−m)p/2} Σ_{I∈D_m}‖b_I‖_p^p/|I|^{p/2}, p<1", worst, SLACK_TOL))
}

/// Off-diagonal and diagonal parts of the step-`N` splitting against the Besov sum.
pub fn splitting_bounds(seed: u64) -> Result<Vec<Check>, LabError> {
    let (mut upper, mut lower) = (f64::INFINITY, f64::INFINITY);
    for (d, depth) in [(2usize, 6usize), (3, 4)] {
        let s = sys(d, depth)?;
        let df = d as f64;
        for (pi, p) in [0.3, 0.7].into_iter().enumerate() {
            for step in [2usize, 3] {
                let stream = 300 + (d * 100 + pi * 10 + step) as u64;
                upper = upper.min(min_over_symbols(&s, seed, stream, false, |b| {
                    let mut lhs = 0.0;
                    for k in 0..step {
                        lhs += op_pow(splitting(&s, b, step, k).map_err(compute)?.off_diagonal, b.m, p)?;
                    }
                    let c = (df - 1.0) * df.powf(-p / 2.0) / (df.powf(step as f64 * p / 2.0) - 1.0);
                    Ok(rel_slack(lhs, c * besov_pow(&s, b, p)))
                })?);
                lower = lower.min(min_over_symbols(&s, seed, stream + 1000, true, |b| {
                    let mut lhs = 0.0;
                    for k in 0..step {
                        lhs += op_pow(splitting(&s, b, step, k).map_err(compute)?.diagonal, b.m, p)?;
                    }
                    let c = (df - 1.0).powf(p / 2.0 - 1.0) / df.powf(p / 2.0 + 1.0);
                    Ok(rel_slack(c * besov_pow(&s, b, p), lhs))
                })?);
            }
        }
    }
    Ok(vec![
        Check::slack(
            "off-diagonal splitting bound",
            "Σ_k ‖π^{(1)}_{b,k}‖_p^p ≤ (d−1)d^{−p/2}/(d^{Np/2}−1)·‖b‖_B^p, p<1",
            upper,
            SLACK_TOL,
        ),
        Check::slack(
            "diagonal splitting lower bound",
            "Σ_k ‖π^{(0)}_{b,k}‖_p^p ≥ (d−1)^{p/2−1}/d^{p/2+1}·‖b‖_B^p, p<1, no root-scale coefficients",
            lower,
            SLACK_TOL,
        ),
    ])
}

/// `‖π_b‖_p ≥ max ‖b_I^i‖_p / |I|^{1/2}`.
pub fn rank_piece_bound(seed: u64) -> Result<Check, LabError> {
    let mut worst = f64::INFINITY;
    for (d, depth) in [(2usize, 5usize), (3, 3)] {
        let s = sys(d, depth)?;
        for (pi, p) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            worst = worst.min(min_over_symbols(&s, seed, 500 + (d * 10 + pi) as u64, false, |b| {
                let lhs = op_pow(paraproduct(&s, b).map_err(compute)?, b.m, p)?.powf(1.0 / p);
                let top = (1..s.basis_dim())
                    .map(|beta| (b.block_lp_pow(beta, p) / s.measure(s.basis_scale(beta).unwrap()).powf(p / 2.0)).powf(1.0 / p))
                    .fold(0.0, f64::max);
                Ok(rel_slack(top, lhs))
            })?);
        }
    }
    Ok(Check::slack("single coefficient lower bound", "‖π_b‖_p ≥ ‖b_I^i‖_p/|I|^{1/2} for every (I, i)", worst, SLACK_TOL))
}

/// `‖P(T)‖_p ≤ ‖T‖_p` for block-diagonal projections, `p ≥ 1`.
pub fn projection_contractivity(seed: u64) -> Result<Check, LabError> {
    let vals: Vec<f64> = (0..TRIALS)
        .into_par_iter()
        .map(|t| {
            let mut r = rng(trial_seed(seed, 600, t));
            let n = r.random_range(4..24);
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut r);
            let parts = r.random_range(1..=n.min(5));
            let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); parts];
            for (k, i) in idx.into_iter().enumerate() {
                blocks[if k < parts { k } else { r.random_range(0..parts) }].push(i);
            }
            let mat = random_matrix(&mut r, n, n);
            let proj = block_diagonal_project(&mat, &blocks).map_err(compute)?;
            Ok([1.0, 1.5, 2.0, 4.0].iter().map(|&p| rel_slack(schatten(&proj, p), schatten(&mat, p))).fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<_, LabError>>()?;
    let worst = vals.into_iter().fold(f64::INFINITY, f64::min);
    Ok(Check::slack("block-diagonal projection contracts", "‖Σ P_k T P_k‖_p ≤ ‖T‖_p for p ≥ 1", worst, SLACK_TOL))
}

/// `‖Σ R_i‖_p^p ≥ (1/n) Σ ‖R_i‖_p^p` when `R_i^* R_j = 0`.
pub fn orthogonal_range_bound(seed: u64) -> Result<Check, LabError> {
    let vals: Vec<f64> = (0..TRIALS)
        .into_par_iter()
        .map(|t| {
            let mut r = rng(trial_seed(seed, 700, t));
            let dim = 12;
            let n = r.random_range(2..=5);
            let u = random_matrix(&mut r, dim, dim).qr().q();
            let mut rows: Vec<usize> = (0..dim).collect();
            rows.shuffle(&mut r);
            let pieces: Vec<CMat> = (0..n)
                .map(|k| {
                    let mut x = random_matrix(&mut r, dim, dim);
                    for (pos, &row) in rows.iter().enumerate() {
                        if pos % n != k {
                            x.row_mut(row).fill(C64::new(0.0, 0.0));
                        }
                    }
                    &u * x
                })
                .collect();
            let total = pieces.iter().fold(CMat::zeros(dim, dim), |a, x| a + x);
            Ok([0.5, 1.0, 2.0, 3.0]
                .iter()
                .map(|&p| {
                    let sum: f64 = pieces.iter().map(|x| spectral::schatten_pow(x, p)).sum();
                    rel_slack(sum / n as f64, spectral::schatten_pow(&total, p))
                })
                .fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<_, LabError>>()?;
    let worst = vals.into_iter().fold(f64::INFINITY, f64::min);
    Ok(Check::slack("orthogonal ranges lower bound", "R_i^*R_j = 0 ⇒ ‖ΣR_i‖_p^p ≥ (1/n)Σ‖R_i‖_p^p", worst, SLACK_TOL))
}

fn shift_cases() -> Result<Vec<(FiniteDyadicSystem, usize, usize)>, LabError> {
    let mut out = Vec::new();
    for (dim, depth, top) in [(1usize, 5usize, 3usize), (2, 3, 2)] {
        let s = FiniteDyadicSystem::build(DyadicParams::new(2, depth, dim).map_err(compute)?, None).map_err(compute)?;
        for i in 0..=top {
            for j in 0..=top {
                out.push((s.clone(), i, j));
            }
        }
    }
    Ok(out)
}

/// Random shifts have operator norm at most 1.
pub fn shift_contractivity(seed: u64) -> Result<Check, LabError> {
    let cases = shift_cases()?;
    let vals: Vec<f64> = (0..TRIALS)
        .into_par_iter()
        .map(|t| {
            let (s, i, j) = &cases[t % cases.len()];
            let spec = shifts::random_shift(s, *i, *j, trial_seed(seed, 800, t)).map_err(compute)?;
            Ok(1.0 - op_norm(&shifts::assemble_shift(s, &spec).map_err(compute)?))
        })
        .collect::<Result<_, LabError>>()?;
    let worst = vals.into_iter().fold(f64::INFINITY, f64::min);
    Ok(Check::slack("shift contractivity", "‖S‖ ≤ 1 for admissible shift coefficients", worst, SLACK_TOL))
}

/// Coefficients at the bound are accepted; one entry just above it is rejected.
pub fn coefficient_enforcement(seed: u64) -> Result<Check, LabError> {
    let cases = shift_cases()?;
    let mut failures = 0usize;
    let mut checked = 0usize;
    for t in 0..TRIALS {
        let (s, i, j) = &cases[t % cases.len()];
        let mut r = rng(trial_seed(seed, 900, t));
        let template = shifts::ShiftSpec::zero(s, *i, *j).map_err(compute)?;
        let carrying = shifts::carrying_cubes(s, *i, *j);
        let cube: CubeId = carrying[r.random_range(0..carrying.len())];
        let bound = (s.measure(cube.scale + i) * s.measure(cube.scale + j)).sqrt() / s.measure(cube.scale);
        let colors = s.n_children() - 1;
        let shape = (s.n_children().pow(*j as u32) * colors, s.n_children().pow(*i as u32) * colors);
        let phase = |r: &mut rand_chacha::ChaCha8Rng| C64::from_polar(1.0, r.random_range(0.0..std::f64::consts::TAU));
        let mut a = CMat::from_fn(shape.0, shape.1, |_, _| phase(&mut r) * bound);
        let ok = shifts::ShiftSpec::new(s, *i, *j, BTreeMap::from([(cube, a.clone())])).is_ok();
        let (row, col) = (r.random_range(0..shape.0), r.random_range(0..shape.1));
        a[(row, col)] *= C64::new(1.0 + 1e-9, 0.0);
        let rejected = matches!(
            shifts::ShiftSpec::new(s, *i, *j, BTreeMap::from([(cube, a)])),
            Err(shifts::ShiftError::Bound { .. })
        );
        checked += 1;
        if !(ok && rejected && template.coeffs.is_empty()) {
            failures += 1;
        }
    }
    Ok(Check::truth(
        "shift coefficient bound enforced",
        "|a_{IJK}| ≤ √(|I||J|)/|K| accepted at equality and rejected above",
        failures == 0,
        failures as f64,
        format!("{failures} of {checked} cases misclassified"),
    ))
}

/// Criterion group 2.
pub fn explicit_constants(seed: u64) -> Result<Vec<Check>, LabError> {
    let mut out = oscillation_bounds(seed)?;
    out.push(band_bound(seed)?);
    out.extend(splitting_bounds(seed)?);
    out.push(rank_piece_bound(seed)?);
    out.push(projection_contractivity(seed)?);
    out.push(orthogonal_range_bound(seed)?);
    out.push(shift_contractivity(seed)?);
    out.push(coefficient_enforcement(seed)?);
    Ok(out)
}
