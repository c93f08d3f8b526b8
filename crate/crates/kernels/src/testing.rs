//! Testing pairings `⟨e_I, V f_I⟩` against Schatten norms, and the
//! median-driven lower bound for commutators on the line.

use crate::{nondegenerate_probe, CellCube, GridOperator, KernelError, KernelSpec, CMat, C64};
use median::quadrant_sets;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_disc(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}

/// A dyadic cube of a grid with `2^depth` cells per axis; scale 0 is the whole grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicCube {
    pub scale: usize,
    pub cube: CellCube,
    pub measure: f64,
}

pub fn dyadic_cubes(grid: &crate::Grid, depth: usize) -> Result<Vec<DyadicCube>, KernelError> {
    if grid.per_axis.iter().any(|&n| n != 1 << depth) {
        return Err(KernelError::Geometry(format!("grid must have 2^{depth} cells per axis")));
    }
    let dim = grid.dim();
    let mut out = Vec::new();
    for k in 0..=depth {
        let side = 1usize << (depth - k);
        for t in 0..(1usize << (k * dim)) {
            let start = (0..dim).map(|a| (t >> (k * (dim - 1 - a)) & ((1 << k) - 1)) * side).collect();
            let cube = CellCube { start, side };
            out.push(DyadicCube { scale: k, measure: (cube.side_length(grid)).powi(dim as i32), cube });
        }
    }
    Ok(out)
}

/// Entries uniform in the unit square of `C`.
pub fn random_operator(n: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMat::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// One pair `(e_I, f_I)` per dyadic cube: values in the disc of radius `|I|^{−1/2}` on `I`, zero elsewhere.
pub fn random_families(grid: &crate::Grid, cubes: &[DyadicCube], seed: u64) -> Vec<(Vec<C64>, Vec<C64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cubes
        .iter()
        .map(|q| {
            let mut e = vec![C64::new(0.0, 0.0); grid.n_cells()];
            let mut f = e.clone();
            let cap = q.measure.powf(-0.5);
            for c in q.cube.cells(grid) {
                e[c] = unit_disc(&mut rng) * cap;
                f[c] = unit_disc(&mut rng) * cap;
            }
            (e, f)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NwoReport {
    /// `(Σ |⟨e_I, V f_I⟩|^p)^{1/p}`.
    pub pairings: f64,
    pub schatten: f64,
    pub ratio: f64,
    pub families: usize,
}

/// `⟨e, V f⟩` for cell values `e`, `f` and `V` on the orthonormal cell basis.
fn pairing(v: &CMat, e: &[C64], f: &[C64], volume: f64) -> C64 {
    let vf = v * nalgebra::DVector::from_column_slice(f);
    e.iter().zip(vf.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() * volume
}

pub fn nwo_ratio(v: &CMat, grid: &crate::Grid, families: &[(Vec<C64>, Vec<C64>)], p: f64) -> NwoReport {
    let pairings = families.iter().map(|(e, f)| pairing(v, e, f, grid.volume()).norm().powf(p)).sum::<f64>().powf(1.0 / p);
    let schatten = spectral::schatten(v, p);
    NwoReport { pairings, schatten, ratio: if schatten > 0.0 { pairings / schatten } else { 0.0 }, families: families.len() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestingReport {
    /// `(Σ (|b_I|/|I|^{1/2})^p)^{1/p}` over the cubes whose partner fits in the window.
    pub besov: f64,
    /// `(Σ_{I,s,q} |⟨e, [T, M_b] f⟩|^p)^{1/p}` with the median-split families.
    pub testing: f64,
    pub commutator: f64,
    /// `testing / besov`.
    pub ratio: f64,
    pub cubes_used: usize,
    pub cubes_skipped: usize,
    /// `max (|I|^{−1/2}|⟨h_I, b⟩| − ⨍_I |b − α|)`; nonpositive by the triangle inequality.
    pub oscillation_slack: f64,
    /// `max (|b(x) − α| − 2|b(x) − b(x̂)|)` over matched pairs; nonpositive.
    pub pair_slack: f64,
}

/// Dyadic cubes of `[lo, lo + 1)` at scales `0..depth` are paired with a cube of the same
/// scale around the probe point at distance `A·ℓ(I)` (ball radius `ℓ(I)`); `b` holds the
/// `2^depth` values on the unit interval and vanishes on the rest of the grid.
pub fn besov_testing(t: &GridOperator, k: &KernelSpec, b: &[C64], depth: usize, a: f64, p: f64) -> Result<TestingReport, KernelError> {
    let grid = &t.grid;
    let unit = 1usize << depth;
    if grid.dim() != 1 || k.dim != 1 || b.len() != unit || grid.per_axis[0] < unit || (grid.cell * unit as f64 - 1.0).abs() > 1e-12 {
        return Err(KernelError::Geometry("line grid with 2^depth cells on the unit interval expected".into()));
    }
    let mut full = vec![C64::new(0.0, 0.0); grid.n_cells()];
    full[..unit].copy_from_slice(b);
    let comm = t.commutator(&full);
    let vol = grid.volume();
    let (mut besov, mut testing, mut used, mut skipped) = (0.0, 0.0, 0, 0);
    let (mut osc_slack, mut pair_slack) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k_scale in 0..depth {
        let side = unit >> k_scale;
        for j in 0..(1usize << k_scale) {
            let cube = CellCube { start: vec![j * side], side };
            let ell = cube.side_length(grid);
            let probe = nondegenerate_probe(k, &cube.center(grid), ell, a)?;
            let hat_start = ((probe.y0[0] - grid.lo[0]) / ell).floor();
            let hat = CellCube { start: vec![(hat_start.max(0.0) as usize) * side], side };
            if hat_start < 0.0 || !hat.fits(grid) || !hat.disjoint(&cube) {
                skipped += 1;
                continue;
            }
            used += 1;
            let cells = cube.cells(grid);
            let b_i: Vec<C64> = cells.iter().map(|&c| full[c]).collect();
            let b_hat: Vec<C64> = hat.cells(grid).iter().map(|&c| full[c]).collect();
            let half = side / 2;
            let avg = |v: &[C64]| v.iter().sum::<C64>() / v.len() as f64;
            let coeff = (avg(&b_i[..half]) - avg(&b_i[half..])).norm() / 2.0;
            besov += coeff.powf(p);
            let sets = quadrant_sets(&b_i, &b_hat)?;
            let osc = b_i.iter().map(|z| (z - sets.alpha).norm()).sum::<f64>() / b_i.len() as f64;
            osc_slack = f64::max(osc_slack, coeff - osc);
            pair_slack = pair_slack.max(sets.check_pairs(&b_i, &b_hat).triangle);
            let measure = ell;
            let hat_cells = hat.cells(grid);
            for s in 0..4 {
                let mut e = vec![C64::new(0.0, 0.0); grid.n_cells()];
                for &x in &sets.f_sets[s] {
                    e[hat_cells[x]] = C64::new((measure / 2.0).sqrt() / measure, 0.0);
                }
                for q in 0..2 {
                    let mut f = vec![C64::new(0.0, 0.0); grid.n_cells()];
                    for &x in sets.e_sets[s].iter().filter(|&&x| x / half == q) {
                        f[cells[x]] = C64::new((measure / 2.0).powf(-0.5), 0.0);
                    }
                    testing += pairing(&comm, &e, &f, vol).norm().powf(p);
                }
            }
        }
    }
    let besov = besov.powf(1.0 / p);
    let testing = testing.powf(1.0 / p);
    Ok(TestingReport {
        besov,
        testing,
        commutator: spectral::schatten(&comm, p),
        ratio: if besov > 0.0 { testing / besov } else { 0.0 },
        cubes_used: used,
        cubes_skipped: skipped,
        oscillation_slack: osc_slack,
        pair_slack,
    })
}
