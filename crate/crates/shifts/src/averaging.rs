//! Averages of shift matrices over all translated binary systems, in cell coordinates.

use crate::{assemble_shift, CMat, ShiftError, ShiftSpec, C64};
use dyadic_core::{DyadicParams, FiniteDyadicSystem, GridShift};
use paraproducts::basis_function;

/// Unitary from basis coordinates to normalized cell values.
pub fn cell_unitary(sys: &FiniteDyadicSystem) -> CMat {
    let w = sys.cell_measure().sqrt();
    let mut u = CMat::zeros(sys.n_cells(), sys.basis_dim());
    for beta in 0..sys.basis_dim() {
        for (x, v) in basis_function(sys, beta).scalar_values().into_iter().enumerate() {
            u[(x, beta)] = v * w;
        }
    }
    u
}

/// Permutation moving each cell `steps` cells along `axis`, periodically.
pub fn translation_permutation(sys: &FiniteDyadicSystem, axis: usize, steps: usize) -> CMat {
    let side = sys.cells_per_axis();
    let mut p = CMat::zeros(sys.n_cells(), sys.n_cells());
    for x in 0..sys.n_cells() {
        let mut c = sys.coords(sys.depth(), x);
        c[axis] = (c[axis] + steps) % side;
        p[(sys.index_of(sys.depth(), &c), x)] = C64::new(1.0, 0.0);
    }
    p
}

/// Mean over every grid shift of `U S U^†`, with `S` built from `rule` on each system.
pub fn averaged_cell_matrix(
    depth: usize,
    dim: usize,
    i: usize,
    j: usize,
    rule: impl Fn(usize, usize, usize, usize) -> C64 + Copy,
) -> Result<CMat, ShiftError> {
    let params = DyadicParams::new(2, depth, dim)?;
    let count = 1u64 << (depth * dim);
    let mut acc: Option<CMat> = None;
    for code in 0..count {
        let sys = FiniteDyadicSystem::build(params, Some(GridShift::from_code(code, depth, dim)))?;
        let s = assemble_shift(&sys, &ShiftSpec::from_rule(&sys, i, j, rule)?)?;
        let u = cell_unitary(&sys);
        let cell = &u * s * u.adjoint();
        acc = Some(match acc {
            None => cell,
            Some(a) => a + cell,
        });
    }
    Ok(acc.expect("at least one shift") / C64::new(count as f64, 0.0))
}
