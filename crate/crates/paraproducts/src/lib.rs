//! Paraproducts and their companions on a finite dyadic system.
//!
//! Every operator is a dense matrix on `C^D ⊗ C^m` in the basis of
//! `dyadic_core`: the coarse indicator first, then Haar functions by scale,
//! position and color. Coordinate `β·m + r` is row `r` of the block at `β`.
//! Block symbols act by left multiplication.
//!
//! Sums over scales run over `1..=N`. The exact finite identities therefore
//! carry the coarse term `K_b f = (E_0 b)(E_0 f)`.

mod assemble;
mod bands;
mod commutators;
mod operators;

pub use assemble::{basis_function, block_matrix, cube_average, matrix_from_map, scale_ranks, symbol_to_step};
pub use bands::{band, coarse_remainder, rank_piece, splitting, Splitting};
pub use commutators::{commutator_pieces, psi_op, tail_maximal, v_op, CommutatorPieces};
pub use dyadic_core::Symbol;
pub use operators::{
    adjoint_paraproduct, coarse_op, decompose, lambda_op, lambda_tilde_op, mult_op, paraproduct, r_op, theta_op,
    triangle_ops, OperatorBundle,
};

use thiserror::Error;

pub type C64 = num_complex::Complex64;
pub type CMat = spectral::CMat;

#[derive(Debug, Error, PartialEq)]
pub enum ParaError {
    #[error(transparent)]
    Dyadic(#[from] dyadic_core::DyadicError),
    #[error("symbol has {got} coefficients, system basis has {want}")]
    SymbolSize { got: usize, want: usize },
    #[error("symbol must be scalar")]
    NotScalar,
    #[error("scale {0} outside the window")]
    Scale(usize),
    #[error("band splitting step must be at least 2")]
    Step,
}

pub(crate) fn check_symbol(sys: &dyadic_core::FiniteDyadicSystem, b: &Symbol) -> Result<(), ParaError> {
    if b.len() != sys.basis_dim() {
        return Err(ParaError::SymbolSize { got: b.len(), want: sys.basis_dim() });
    }
    Ok(())
}
