use crate::{check_symbol, CMat, ParaError, Symbol, C64};
use dyadic_core::{haar_function, haar_synthesize, haar_transform, CubeId, FiniteDyadicSystem, HaarIndex, StepFunction};

/// Dense `(D·m) × (D·m)` matrix from a list of `(row basis, column basis, block)` contributions.
pub fn block_matrix<'a>(dim: usize, m: usize, blocks: impl IntoIterator<Item = (usize, usize, CMat)>) -> CMat {
    let mut out = CMat::zeros(dim * m, dim * m);
    for (r, c, blk) in blocks {
        let mut view = out.view_mut((r * m, c * m), (m, m));
        view += blk;
    }
    out
}

/// Scalar basis function `β` as a step function.
pub fn basis_function(sys: &FiniteDyadicSystem, beta: usize) -> StepFunction {
    match sys.basis_haar(beta) {
        None => StepFunction::real(&vec![1.0; sys.n_cells()]),
        Some(h) => haar_function(sys, h).expect("basis index is valid"),
    }
}

pub fn symbol_to_step(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<StepFunction, ParaError> {
    check_symbol(sys, b)?;
    Ok(haar_synthesize(sys, b)?)
}

/// Matrix of a map acting on block-valued functions column by column:
/// column `β·m + s` is the image of `e_β` times the unit block `E_{s,0}`.
pub fn matrix_from_map(sys: &FiniteDyadicSystem, m: usize, f: impl Fn(&StepFunction) -> StepFunction) -> CMat {
    let dim = sys.basis_dim();
    let mut out = CMat::zeros(dim * m, dim * m);
    for beta in 0..dim {
        let e = basis_function(sys, beta);
        for s in 0..m {
            let mut unit = CMat::zeros(m, m);
            unit[(s, 0)] = C64::new(1.0, 0.0);
            let input = StepFunction { m, values: e.values.iter().map(|v| &unit * v[(0, 0)]).collect() };
            let coeffs = haar_transform(sys, &f(&input)).expect("map preserves shape");
            for (gamma, blk) in coeffs.coeffs.iter().enumerate() {
                for r in 0..m {
                    out[(gamma * m + r, beta * m + s)] = blk[(r, 0)];
                }
            }
        }
    }
    out
}

/// `⟨1_I/|I|, e_β⟩` for every basis element with a nonzero value, as `(β, value)`.
pub(crate) fn averages_over(sys: &FiniteDyadicSystem, cube: CubeId) -> Vec<(usize, C64)> {
    let mut out = vec![(0, C64::new(1.0, 0.0))];
    for (s, parent, c) in sys.ancestors(cube.scale, cube.index) {
        let amp = sys.measure(s).powf(-0.5);
        for color in 1..sys.n_children() {
            let beta = sys.basis_index(HaarIndex { cube: CubeId { scale: s, index: parent }, color });
            out.push((beta, sys.phase(color, c) * amp));
        }
    }
    out
}

/// `⟨1_I/|I|, b⟩` computed from the coefficients.
pub fn cube_average(sys: &FiniteDyadicSystem, b: &Symbol, cube: CubeId) -> CMat {
    averages_over(sys, cube).into_iter().fold(CMat::zeros(b.m, b.m), |acc, (beta, w)| acc + &b.coeffs[beta] * w)
}

/// Rank of every coordinate for the scale order: coarse first (rank 0),
/// then Haar scale `s` at rank `s + 1`. Each basis rank is repeated `m` times.
pub fn scale_ranks(sys: &FiniteDyadicSystem, m: usize) -> Vec<usize> {
    (0..sys.basis_dim())
        .flat_map(|beta| std::iter::repeat_n(sys.basis_scale(beta).map_or(0, |s| s + 1), m))
        .collect()
}
