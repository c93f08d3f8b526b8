use crate::assemble::{averages_over, block_matrix, cube_average, matrix_from_map, symbol_to_step};
use crate::{check_symbol, CMat, ParaError, Symbol, C64};
use dyadic_core::{martingale_difference, FiniteDyadicSystem, HaarIndex, StepFunction};

/// `f ↦ Σ_{I,i} h_I^i b_I^i ⟨1_I/|I|, f⟩`.
pub fn paraproduct(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    check_symbol(sys, b)?;
    let mut blocks = Vec::new();
    for h in sys.haar_indices() {
        let row = sys.basis_index(h);
        let coeff = &b.coeffs[row];
        if coeff.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        for (beta, w) in averages_over(sys, h.cube) {
            blocks.push((row, beta, coeff * w));
        }
    }
    Ok(block_matrix(sys.basis_dim(), b.m, blocks))
}

/// `f ↦ Σ_{I,i} (1_I/|I|) (b_I^i)^* ⟨h_I^i, f⟩`, assembled column by column.
pub fn adjoint_paraproduct(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    check_symbol(sys, b)?;
    let mut blocks = Vec::new();
    for h in sys.haar_indices() {
        let col = sys.basis_index(h);
        let coeff = b.coeffs[col].adjoint();
        for (gamma, w) in averages_over(sys, h.cube) {
            blocks.push((gamma, col, &coeff * w.conj()));
        }
    }
    Ok(block_matrix(sys.basis_dim(), b.m, blocks))
}

fn differences(sys: &FiniteDyadicSystem, f: &StepFunction) -> Vec<StepFunction> {
    (1..=sys.depth()).map(|k| martingale_difference(sys, f, k).expect("scale in range")).collect()
}

/// `f ↦ Σ_k d_k b · d_k f`, from pointwise products of differences.
pub fn lambda_op(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    let db = differences(sys, &symbol_to_step(sys, b)?);
    Ok(matrix_from_map(sys, b.m, |f| {
        let df = differences(sys, f);
        db.iter().zip(&df).fold(StepFunction::zeros(sys.n_cells(), b.m), |acc, (x, y)| acc.add(&x.mul(y)))
    }))
}

/// Same-cube products of Haar terms with nonzero product color:
/// `Σ_I Σ_{i∘j≠0} b_I^i f_I^j |I|^{-1/2} h_I^{i∘j}`.
pub fn lambda_tilde_op(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    check_symbol(sys, b)?;
    let nc = sys.n_children();
    let mut blocks = Vec::new();
    for k in 0..sys.depth() {
        let amp = sys.measure(k).powf(-0.5);
        for index in 0..sys.cubes_at(k) {
            let cube = dyadic_core::CubeId { scale: k, index };
            let at = |color| sys.basis_index(HaarIndex { cube, color });
            for j in 1..nc {
                for i in 1..nc {
                    let l = sys.color_product(i, j);
                    if l != 0 {
                        blocks.push((at(l), at(j), &b.coeffs[at(i)] * C64::new(amp, 0.0)));
                    }
                }
            }
        }
    }
    Ok(block_matrix(sys.basis_dim(), b.m, blocks))
}

/// `(Λ_b, Λ̃_b)`.
pub fn triangle_ops(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<(CMat, CMat), ParaError> {
    Ok((lambda_op(sys, b)?, lambda_tilde_op(sys, b)?))
}

/// `f ↦ Σ_{k=1}^N b_{k−1} · d_k f`; diagonal over cubes with value `⟨1_I/|I|, b⟩`.
pub fn r_op(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    check_symbol(sys, b)?;
    let mut blocks = Vec::new();
    for k in 0..sys.depth() {
        for index in 0..sys.cubes_at(k) {
            let cube = dyadic_core::CubeId { scale: k, index };
            let avg = cube_average(sys, b, cube);
            for color in 1..sys.n_children() {
                let beta = sys.basis_index(HaarIndex { cube, color });
                blocks.push((beta, beta, avg.clone()));
            }
        }
    }
    Ok(block_matrix(sys.basis_dim(), b.m, blocks))
}

/// Pointwise left multiplication by the synthesized symbol.
pub fn mult_op(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    let bs = symbol_to_step(sys, b)?;
    Ok(matrix_from_map(sys, b.m, |f| bs.mul(f)))
}

/// `K_b f = (E_0 b)(E_0 f)`.
pub fn coarse_op(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    check_symbol(sys, b)?;
    Ok(block_matrix(sys.basis_dim(), b.m, [(0, 0, b.coarse().clone())]))
}

/// `Θ_b = π_b + Λ_b`.
pub fn theta_op(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    Ok(paraproduct(sys, b)? + lambda_op(sys, b)?)
}

#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub m: usize,
    pub pi: CMat,
    pub pi_adj: CMat,
    pub lambda: CMat,
    pub lambda_tilde: CMat,
    pub r: CMat,
    pub mult: CMat,
    pub coarse: CMat,
}

impl OperatorBundle {
    /// `‖M_b − (π_b + Λ_b + R_b + K_b)‖_max`.
    pub fn decomposition_residual(&self) -> f64 {
        spectral::max_abs(&(&self.mult - (&self.pi + &self.lambda + &self.r + &self.coarse)))
    }

    pub fn theta(&self) -> CMat {
        &self.pi + &self.lambda
    }
}

pub fn decompose(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<OperatorBundle, ParaError> {
    Ok(OperatorBundle {
        m: b.m,
        pi: paraproduct(sys, b)?,
        pi_adj: adjoint_paraproduct(sys, b)?,
        lambda: lambda_op(sys, b)?,
        lambda_tilde: lambda_tilde_op(sys, b)?,
        r: r_op(sys, b)?,
        mult: mult_op(sys, b)?,
        coarse: coarse_op(sys, b)?,
    })
}
