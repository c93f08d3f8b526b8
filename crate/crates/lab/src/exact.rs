//! Exact identities, checked as scaled residuals.

use crate::random::{random_symbol, rng, trial_seed};
use crate::{compute, Check, LabError, CMat, C64, EXACT_TOL};
use dyadic_core::{haar_function, haar_synthesize, haar_transform, DyadicParams, FiniteDyadicSystem, HaarIndex, StepFunction, Symbol};
use paraproducts::{
    adjoint_paraproduct, band, commutator_pieces, decompose, lambda_op, lambda_tilde_op, paraproduct, rank_piece,
};
use rand::Rng;
use spectral::max_abs;

const TRIALS: usize = 6;

fn systems() -> Result<Vec<FiniteDyadicSystem>, LabError> {
    let mut out = Vec::new();
    for (d, depth, dim) in [(2, 4, 1), (3, 3, 1), (5, 2, 1), (2, 2, 2)] {
        out.push(FiniteDyadicSystem::build(DyadicParams::new(d, depth, dim).map_err(compute)?, None).map_err(compute)?);
    }
    Ok(out)
}

fn label(sys: &FiniteDyadicSystem) -> String {
    format!("d={} N={} dim={}", sys.d(), sys.depth(), sys.dim())
}

/// `⟨f, g⟩ = ∫ tr(f^* g)` over the window.
fn inner(sys: &FiniteDyadicSystem, f: &StepFunction, g: &StepFunction) -> C64 {
    f.values.iter().zip(&g.values).map(|(a, b)| (a.adjoint() * b).trace()).sum::<C64>() * sys.cell_measure()
}

fn basis(sys: &FiniteDyadicSystem) -> Result<Vec<StepFunction>, LabError> {
    let mut out = vec![StepFunction::real(&vec![1.0; sys.n_cells()])];
    for h in sys.haar_indices() {
        out.push(haar_function(sys, h).map_err(compute)?);
    }
    Ok(out)
}

fn scaled(res: f64, size: f64) -> f64 {
    res / size.max(1.0)
}

pub fn haar_orthonormality() -> Result<Check, LabError> {
    let mut res: f64 = 0.0;
    for sys in systems()? {
        let fs = basis(&sys)?;
        for (a, f) in fs.iter().enumerate() {
            for (b, g) in fs.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                res = res.max((inner(&sys, f, g) - want).norm());
            }
        }
    }
    Ok(Check::residual("haar basis orthonormal", "Haar system is an orthonormal basis of the window", res, EXACT_TOL))
}

pub fn parseval(seed: u64) -> Result<Check, LabError> {
    let mut res: f64 = 0.0;
    for (s, sys) in systems()?.into_iter().enumerate() {
        for m in [1, 2] {
            let mut r = rng(trial_seed(seed, 10 + s as u64, m));
            for _ in 0..TRIALS {
                let vals: Vec<CMat> = (0..sys.n_cells()).map(|_| crate::random::random_block(&mut r, m)).collect();
                let f = StepFunction::new(m, vals).map_err(compute)?;
                let b = haar_transform(&sys, &f).map_err(compute)?;
                let lhs = f.values.iter().map(|v| v.norm_squared()).sum::<f64>() * sys.cell_measure();
                let rhs: f64 = b.coeffs.iter().map(|c| c.norm_squared()).sum();
                let back = haar_synthesize(&sys, &b).map_err(compute)?;
                res = res.max(scaled((lhs - rhs).abs(), lhs)).max(scaled(back.max_abs_diff(&f), f.max_abs()));
            }
        }
    }
    Ok(Check::residual("haar parseval and synthesis", "Haar transform is unitary and inverted by synthesis", res, EXACT_TOL))
}

/// `h_I^i h_I^j = |I|^{-1/2} h_I^{(i+j) mod d}`, with color 0 the normalized indicator.
pub fn product_rule() -> Result<Check, LabError> {
    let mut res: f64 = 0.0;
    let mut detail = Vec::new();
    for d in [2usize, 3, 5] {
        let sys = FiniteDyadicSystem::standard(d, 2).map_err(compute)?;
        let mut local: f64 = 0.0;
        let cubes: Vec<_> = sys.haar_indices().filter(|h| h.color == 1).map(|h| h.cube).collect();
        for cube in cubes {
            let size = sys.measure(cube.scale);
            for i in 1..d {
                for j in 1..d {
                    let hi = haar_function(&sys, HaarIndex { cube, color: i }).map_err(compute)?;
                    let hj = haar_function(&sys, HaarIndex { cube, color: j }).map_err(compute)?;
                    let r = (i + j) % d;
                    let want = if r == 0 {
                        let mut v = vec![0.0; sys.n_cells()];
                        sys.cube_cells(cube.scale, cube.index).into_iter().for_each(|c| v[c] = 1.0 / size);
                        StepFunction::real(&v)
                    } else {
                        haar_function(&sys, HaarIndex { cube, color: r }).map_err(compute)?.scale(C64::new(size.powf(-0.5), 0.0))
                    };
                    local = local.max(scaled(hi.mul(&hj).max_abs_diff(&want), want.max_abs()));
                }
            }
        }
        detail.push(format!("d={d}: {local:.1e}"));
        res = res.max(local);
    }
    let mut c = Check::residual("haar product rule", "products of Haar functions on one cube follow the color group", res, EXACT_TOL);
    c.detail = format!("{} ({})", c.detail, detail.join(", "));
    Ok(c)
}

/// Runs `f` on random scalar and 2×2 block symbols of every test system.
fn over_symbols(seed: u64, stream: u64, f: impl FnMut(&FiniteDyadicSystem, &Symbol) -> Result<f64, LabError>) -> Result<(f64, String), LabError> {
    over_sizes(seed, stream, &[1, 2], f)
}

fn over_sizes(
    seed: u64,
    stream: u64,
    sizes: &[usize],
    mut f: impl FnMut(&FiniteDyadicSystem, &Symbol) -> Result<f64, LabError>,
) -> Result<(f64, String), LabError> {
    let mut res: f64 = 0.0;
    let mut at = String::new();
    for (s, sys) in systems()?.into_iter().enumerate() {
        for &m in sizes {
            let mut r = rng(trial_seed(seed, stream * 100 + s as u64, m));
            for t in 0..TRIALS {
                let b = random_symbol(&sys, m, t, &mut r);
                let v = f(&sys, &b)?;
                if v > res || at.is_empty() {
                    at = format!("{} m={m}", label(&sys));
                }
                res = res.max(v);
            }
        }
    }
    Ok((res, at))
}

fn with_at(mut c: Check, at: String) -> Check {
    c.detail = format!("{}; worst at {at}", c.detail);
    c
}

pub fn adjoint(seed: u64) -> Result<Check, LabError> {
    let (res, at) = over_symbols(seed, 1, |sys, b| {
        let p = paraproduct(sys, b).map_err(compute)?;
        let q = adjoint_paraproduct(sys, b).map_err(compute)?;
        Ok(scaled(max_abs(&(q - p.adjoint())), max_abs(&p)))
    })?;
    Ok(with_at(Check::residual("adjoint paraproduct", "adjoint formula equals the conjugate transpose", res, EXACT_TOL), at))
}

pub fn lambda_split(seed: u64) -> Result<Check, LabError> {
    let (res, at) = over_symbols(seed, 2, |sys, b| {
        let l = lambda_op(sys, b).map_err(compute)?;
        let pstar = paraproduct(sys, &b.adjoint_function(sys)).map_err(compute)?.adjoint();
        let lt = lambda_tilde_op(sys, b).map_err(compute)?;
        Ok(scaled(max_abs(&(&l - pstar - lt)), max_abs(&l)))
    })?;
    Ok(with_at(Check::residual("lambda splitting", "Λ_b = (π_{b*})^* + Λ̃_b", res, EXACT_TOL), at))
}

pub fn multiplication_split(seed: u64) -> Result<Check, LabError> {
    let (res, at) = over_symbols(seed, 3, |sys, b| {
        let o = decompose(sys, b).map_err(compute)?;
        let sum = &o.pi + &o.lambda + &o.r + &o.coarse;
        Ok(scaled(max_abs(&(&o.mult - sum)), max_abs(&o.mult)))
    })?;
    Ok(with_at(Check::residual("multiplication decomposition", "M_b = π_b + Λ_b + R_b + K_b", res, EXACT_TOL), at))
}

pub fn band_vanishing(seed: u64) -> Result<Check, LabError> {
    let (res, at) = over_symbols(seed, 4, |sys, b| {
        let mut worst_band: f64 = 0.0;
        for n in 0..sys.depth() {
            for m in 0..=n {
                worst_band = worst_band.max(max_abs(&band(sys, b, n, m).map_err(compute)?));
            }
        }
        Ok(worst_band)
    })?;
    Ok(with_at(Check::residual("band vanishing", "paraproduct bands with output scale ≤ input scale vanish", res, 0.0), at))
}

/// Distinct rank pieces have orthogonal ranges, and their Gram sum rebuilds `π_b^* π_b`.
pub fn rank_orthogonality(seed: u64) -> Result<Check, LabError> {
    let (res, at) = over_symbols(seed, 5, |sys, b| {
        let pieces: Vec<CMat> = sys.haar_indices().map(|h| rank_piece(sys, b, h)).collect::<Result<_, _>>().map_err(compute)?;
        let p = paraproduct(sys, b).map_err(compute)?;
        let size = max_abs(&p).powi(2);
        let mut worst_cross: f64 = 0.0;
        for (a, x) in pieces.iter().enumerate() {
            for y in pieces.iter().skip(a + 1) {
                worst_cross = worst_cross.max(max_abs(&(x.adjoint() * y)));
            }
        }
        let gram = pieces.iter().fold(CMat::zeros(p.ncols(), p.ncols()), |acc, x| acc + x.adjoint() * x);
        Ok(scaled(worst_cross.max(max_abs(&(p.adjoint() * &p - gram))), size))
    })?;
    Ok(with_at(Check::residual("rank piece orthogonality", "(π^{I,i})^*(π^{J,j}) = 0 and π^*π = Σ (π^{I,i})^*π^{I,i}", res, EXACT_TOL), at))
}

pub fn commutator_identities(seed: u64) -> Result<Vec<Check>, LabError> {
    let mut r = rng(trial_seed(seed, 6, 0));
    let (mut psi, mut theta, mut tri): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for sys in systems()? {
        for m in [1] {
            for t in 0..TRIALS {
                let a = random_symbol(&sys, m, t, &mut r);
                let b = random_symbol(&sys, m, t + 1, &mut r);
                let c = commutator_pieces(&sys, &a, &b).map_err(compute)?;
                let size = max_abs(&paraproduct(&sys, &a).map_err(compute)?) * max_abs(&paraproduct(&sys, &b).map_err(compute)?);
                psi = psi.max(scaled(c.psi_identity_residual().max(c.psi_identity_residual_full()), size));
                theta = theta.max(scaled(c.theta_identity_residual().max(c.theta_identity_residual_full()), size));
                tri = tri.max(scaled(c.triangular_residual(), size));
            }
        }
    }
    Ok(vec![
        Check::residual("commutator via Ψ", "[π_a, R_b] = −Ψ_{a,b} − π_aπ_b (with coarse correction on the full space)", psi, EXACT_TOL),
        Check::residual("Ψ as triangular projection", "Ψ_{a,b} is the triangular truncation of π_aΛ_b", tri, EXACT_TOL),
        Check::residual("commutator via Θ", "[π_a, R_b] = −π_aΘ_b + V_{a,b} (with coarse correction on the full space)", theta, EXACT_TOL),
    ])
}

pub fn shift_blocks(seed: u64) -> Result<Vec<Check>, LabError> {
    let mut assembly: f64 = 0.0;
    let mut cross: f64 = 0.0;
    let mut additivity: f64 = 0.0;
    let mut r = rng(trial_seed(seed, 7, 0));
    for (dim, depth, pairs) in [(1usize, 5usize, vec![(0, 0), (1, 0), (0, 2), (2, 1)]), (2, 2, vec![(0, 0), (1, 0), (0, 1)])] {
        let sys = FiniteDyadicSystem::build(DyadicParams::new(2, depth, dim).map_err(compute)?, None).map_err(compute)?;
        for (i, j) in pairs {
            for m in [1, 2] {
                let spec = shifts::random_shift(&sys, i, j, r.random()).map_err(compute)?;
                let b = random_symbol(&sys, m, i + j, &mut r);
                let phi = shifts::phi_blocks(&sys, &spec, &b).map_err(compute)?;
                let size = max_abs(&phi.phi).max(1e-300);
                assembly = assembly.max(scaled(phi.assembly_residual(), size));
                cross = cross.max(scaled(phi.max_cross(), size * size));
                for p in [1.0, 2.0, 3.0] {
                    let (lhs, rhs) = phi.additivity(p);
                    additivity = additivity.max(scaled((lhs - rhs).abs(), lhs));
                }
            }
        }
    }
    Ok(vec![
        Check::residual("shift commutator assembly", "[S, R_b] = Σ_K B_K", assembly, EXACT_TOL),
        Check::residual("shift block orthogonality", "B_{K1}^† B_{K2} = 0 for K1 ≠ K2", cross, EXACT_TOL),
        Check::residual("shift block norm additivity", "‖Φ‖_p^p = Σ_K ‖B_K^†B_K‖_{p/2}^{p/2}", additivity, 1e-10),
    ])
}

pub fn bmo_forms(seed: u64) -> Result<Check, LabError> {
    let (res, at) = over_sizes(seed, 8, &[1], |sys, b| {
        let (a, c) = norms::bmo_dyadic(sys, b).map_err(compute)?;
        Ok(scaled((a - c).abs(), a))
    })?;
    Ok(with_at(Check::residual("dyadic BMO forms agree", "sup-of-averages form equals the Haar-sum form", res, EXACT_TOL), at))
}

/// At `p = 2` the difference form equals `√d` times the Haar form (scalar symbols).
pub fn besov_parseval(seed: u64) -> Result<Check, LabError> {
    let mut res: f64 = 0.0;
    for d in [2usize, 3] {
        let sys = FiniteDyadicSystem::standard(d, 4).map_err(compute)?;
        let mut r = rng(trial_seed(seed, 9, d));
        for t in 0..40 {
            let b = random_symbol(&sys, 1, t, &mut r);
            let haar = norms::besov_haar(&sys, &b, 2.0).map_err(compute)?;
            let diff = norms::besov_diff(&sys, &b, 2.0).map_err(compute)?;
            res = res.max(scaled((diff - (d as f64).sqrt() * haar).abs(), diff));
        }
    }
    Ok(Check::residual("besov difference form at p=2", "difference form = √d · Haar form at p = 2", res, EXACT_TOL))
}

/// Criterion group 1: the exact algebraic identities.
pub fn identities(seed: u64) -> Result<Vec<Check>, LabError> {
    let mut out = vec![
        haar_orthonormality()?,
        parseval(seed)?,
        product_rule()?,
        adjoint(seed)?,
        lambda_split(seed)?,
        multiplication_split(seed)?,
        band_vanishing(seed)?,
        rank_orthogonality(seed)?,
    ];
    out.extend(commutator_identities(seed)?);
    out.extend(shift_blocks(seed)?);
    out.push(bmo_forms(seed)?);
    Ok(out)
}
