//! Far-point probes and the weak factorization for the Hilbert kernel.

use crate::random::{rng, trial_seed, unit_complex};
use crate::{compute, Check, LabError, C64, EXACT_TOL};
use kernels::{discretize, nondegenerate_probe, partner_cube, random_samples, standard_check, weak_factorization, CellCube, Grid, KernelSpec};

pub const FACTOR_AS: [f64; 3] = [8.0, 16.0, 32.0];
pub const FACTOR_TRIALS: usize = 20;

/// The probe point sits at distance `Ar` with `|K(y0, x0)| = 1/(Ar)`.
pub fn hilbert_probe() -> Result<Check, LabError> {
    let k = KernelSpec::hilbert();
    let mut res: f64 = 0.0;
    let mut count = 0;
    for x0 in [0.0, 0.3, -1.7, 12.25] {
        for r in [0.1, 0.5, 1.0] {
            for a in [8.0, 10.0, 16.0, 32.0, 100.0] {
                let rep = nondegenerate_probe(&k, &[x0], r, a).map_err(compute)?;
                let direct = 1.0 / (rep.y0[0] - x0).abs();
                let want = 1.0 / (a * r);
                res = res.max(((direct - want) / want).abs()).max((rep.k0.norm() - want).abs() / want).max((rep.scaled - 1.0).abs());
                count += 1;
            }
        }
    }
    let mut c = Check::residual("hilbert far-point probe", "|K(y0, x0)| = 1/(Ar) at the probe point", res, EXACT_TOL);
    c.detail = format!("{} over {count} probes", c.detail);
    Ok(c)
}

pub fn hilbert_standard() -> Result<Check, LabError> {
    let rep = standard_check(&KernelSpec::hilbert(), &random_samples(1, 400, 7)).map_err(compute)?;
    Ok(Check::truth(
        "hilbert kernel is standard",
        "size and smoothness estimates hold with the declared constant",
        rep.passed(),
        rep.size_ratio.max(rep.smooth_ratio),
        format!("size ratio {:.3}, smoothness ratio {:.3}", rep.size_ratio, rep.smooth_ratio),
    ))
}

/// Reconstruction residual and the decay of `‖f̃‖/‖f‖` as the partner moves away.
pub fn factorization(seed: u64) -> Result<Vec<Check>, LabError> {
    let k = KernelSpec::hilbert();
    let grid = Grid::new(vec![0.0], 0.25, vec![80]).map_err(compute)?;
    let t = discretize(&k, &grid, 2).map_err(compute)?;
    let q = CellCube { start: vec![0], side: 4 };
    let partners: Vec<CellCube> = FACTOR_AS.iter().map(|&a| partner_cube(&k, &t, &q, a).map(|p| p.0)).collect::<Result<_, _>>().map_err(compute)?;
    let mut residual: f64 = 0.0;
    let mut worst_drop: f64 = f64::INFINITY;
    for trial in 0..FACTOR_TRIALS {
        let mut r = rng(trial_seed(seed, 4000, trial));
        let vals: Vec<C64> = (0..4).map(|_| unit_complex(&mut r)).collect();
        let mean = vals.iter().sum::<C64>() / 4.0;
        let mut f = vec![C64::new(0.0, 0.0); grid.n_cells()];
        for (c, v) in vals.iter().enumerate() {
            f[c] = v - mean;
        }
        let scale = f.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let mut ratios = Vec::new();
        for qt in &partners {
            let fac = weak_factorization(&f, &q, qt, &t).map_err(compute)?;
            residual = residual.max(fac.residual / scale);
            ratios.push(fac.tilde_ratio);
        }
        for w in ratios.windows(2) {
            worst_drop = worst_drop.min(1.0 - w[1] / w[0]);
        }
    }
    Ok(vec![
        Check::residual("weak factorization identity", "f = g·T(h) − h·(T^*g)^* + f̃ on the grid", residual, EXACT_TOL),
        Check::truth(
            "factorization remainder decays",
            "‖f̃‖/‖f‖ strictly decreases over A = 8, 16, 32",
            worst_drop > 0.0,
            worst_drop,
            format!("smallest relative decrease {worst_drop:.3e} over {FACTOR_TRIALS} inputs"),
        ),
    ])
}

/// Criterion group 8.
pub fn kernel_suite(seed: u64) -> Result<Vec<Check>, LabError> {
    let mut out = vec![hilbert_probe()?, hilbert_standard()?];
    out.extend(factorization(seed)?);
    Ok(out)
}
