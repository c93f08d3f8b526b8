//! Besov and BMO functionals of symbols on finite dyadic systems.
//!
//! Block coefficients are measured in `L_p(M_m)` with the normalized trace.
//! The weight `d^k` uses the branching of the system (`2^dim` in dim > 1).

mod continuum;

pub use continuum::{adjacent_pair_sum, besov_continuum, besov_continuum_pow, grid_besov_haar_pow, GridStep};

use dyadic_core::{expectation, haar_synthesize, martingale_difference, CubeId, FiniteDyadicSystem, HaarIndex, Symbol};
use thiserror::Error;

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;

#[derive(Debug, Error, PartialEq)]
pub enum NormError {
    #[error(transparent)]
    Dyadic(#[from] dyadic_core::DyadicError),
    #[error("exponent {0} not allowed here")]
    Exponent(f64),
    #[error("symbol must be scalar")]
    NotScalar,
    #[error("grid input is malformed: {0}")]
    Grid(String),
}

fn check_p(p: f64, min: f64) -> Result<(), NormError> {
    if p.is_nan() || p < min || p <= 0.0 || p.is_infinite() {
        return Err(NormError::Exponent(p));
    }
    Ok(())
}

/// `Σ_{I,i} (‖b_I^i‖_p / |I|^{1/2})^p`.
pub fn besov_haar_pow(sys: &FiniteDyadicSystem, b: &Symbol, p: f64) -> Result<f64, NormError> {
    check_p(p, 0.0)?;
    Ok(sys.haar_indices().map(|h| besov_term(sys, b, h, p)).sum())
}

pub fn besov_haar(sys: &FiniteDyadicSystem, b: &Symbol, p: f64) -> Result<f64, NormError> {
    Ok(besov_haar_pow(sys, b, p)?.powf(1.0 / p))
}

/// `(‖b_I^i‖_p / |I|^{1/2})^p` for one index.
pub fn besov_term(sys: &FiniteDyadicSystem, b: &Symbol, h: HaarIndex, p: f64) -> f64 {
    b.block_lp_pow(sys.basis_index(h), p) * sys.measure(h.cube.scale).powf(-p / 2.0)
}

/// `Σ_{k=1}^N d^k ‖d_k b‖_p^p`.
pub fn besov_diff_pow(sys: &FiniteDyadicSystem, b: &Symbol, p: f64) -> Result<f64, NormError> {
    check_p(p, 0.0)?;
    let f = haar_synthesize(sys, b)?;
    let d = sys.n_children() as f64;
    let mut total = 0.0;
    for k in 1..=sys.depth() {
        total += d.powi(k as i32) * martingale_difference(sys, &f, k)?.lp_norm_pow(p);
    }
    Ok(total)
}

pub fn besov_diff(sys: &FiniteDyadicSystem, b: &Symbol, p: f64) -> Result<f64, NormError> {
    Ok(besov_diff_pow(sys, b, p)?.powf(1.0 / p))
}

/// `Σ_{k=0}^{N−1} d^k ‖b − b_k‖_p^p` for `p ≥ 1`.
pub fn besov_osc_pow(sys: &FiniteDyadicSystem, b: &Symbol, p: f64) -> Result<f64, NormError> {
    check_p(p, 1.0)?;
    let f = haar_synthesize(sys, b)?;
    let d = sys.n_children() as f64;
    let mut total = 0.0;
    for k in 0..sys.depth() {
        total += d.powi(k as i32) * f.sub(&expectation(sys, &f, k)?).lp_norm_pow(p);
    }
    Ok(total)
}

pub fn besov_osc(sys: &FiniteDyadicSystem, b: &Symbol, p: f64) -> Result<f64, NormError> {
    Ok(besov_osc_pow(sys, b, p)?.powf(1.0 / p))
}

/// Dyadic BMO of a scalar symbol in two forms: the supremum of the
/// conditional square function `E_n Σ_{k>n} |d_k b|^2`, and the supremum of
/// the normalized coefficient mass `|I|^{-1} Σ_{J⊆I} Σ_i |b_J^i|^2`.
pub fn bmo_dyadic(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<(f64, f64), NormError> {
    if !b.is_scalar() {
        return Err(NormError::NotScalar);
    }
    let f = haar_synthesize(sys, b)?;
    let n = sys.depth();
    let sq: Vec<Vec<f64>> = (1..=n)
        .map(|k| martingale_difference(sys, &f, k).map(|dk| dk.scalar_values().iter().map(|z| z.norm_sqr()).collect()))
        .collect::<Result<_, _>>()?;
    let mut form_a = 0.0f64;
    for level in 0..n {
        let tail: Vec<f64> = (0..sys.n_cells()).map(|x| (level..n).map(|k| sq[k][x]).sum()).collect();
        let e = expectation(sys, &dyadic_core::StepFunction::real(&tail), level)?;
        form_a = form_a.max(e.scalar_values().iter().map(|z| z.re).fold(0.0, f64::max));
    }

    let mut form_b = 0.0f64;
    let mut below = vec![0.0; sys.cubes_at(n)];
    for k in (0..n).rev() {
        let mut here = vec![0.0; sys.cubes_at(k)];
        for (index, mass) in here.iter_mut().enumerate() {
            let cube = CubeId { scale: k, index };
            let own: f64 = (1..sys.n_children())
                .map(|color| b.coeff(sys, HaarIndex { cube, color })[(0, 0)].norm_sqr())
                .sum();
            *mass = own + (0..sys.n_children()).map(|c| below[sys.child(k, index, c)]).sum::<f64>();
            form_b = form_b.max(*mass / sys.measure(k));
        }
        below = here;
    }
    Ok((form_a.sqrt(), form_b.sqrt()))
}

/// `sup_I (|I|^{-1} ∫_I ‖b − ⟨b⟩_I‖_op^2)^{1/2}` over all cubes of the window.
pub fn bmo_operator(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<f64, NormError> {
    let f = haar_synthesize(sys, b)?;
    let mut best = 0.0f64;
    for k in 0..sys.depth() {
        let avg = expectation(sys, &f, k)?;
        let dev: Vec<f64> = f.values.iter().zip(&avg.values).map(|(x, a)| op_norm_sq(&(x - a))).collect();
        for index in 0..sys.cubes_at(k) {
            let cells = sys.cube_cells(k, index);
            let mean = cells.iter().map(|&c| dev[c]).sum::<f64>() / cells.len() as f64;
            best = best.max(mean);
        }
    }
    Ok(best.sqrt())
}

fn op_norm_sq(x: &CMat) -> f64 {
    if x.nrows() == 1 {
        return x[(0, 0)].norm_sqr();
    }
    x.singular_values().iter().copied().fold(0.0, f64::max).powi(2)
}
