//! Two filtered matrix algebras with explicit orthonormal bases: the CAR
//! algebra on `n` generators and the tensor power `M_d^{⊗n}`. Symbols are
//! coefficient vectors `b̂` on these bases, paraproducts are matrices on the
//! basis, and the Walsh-side counterparts are block matrices whose blocks are
//! algebra elements.
//!
//! `max(∅) = 0`, so the first martingale difference `d_1 b` pairs with the
//! constant part `τ(g)` of the input.

pub mod car;
mod io;
pub mod tensor;

pub use io::{format_car, format_tensor, parse_car, parse_tensor};

use thiserror::Error;

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;

#[derive(Debug, Error, PartialEq)]
pub enum NcError {
    #[error("level must be at least 1")]
    Level,
    #[error("index out of range: {0}")]
    Index(String),
    #[error("coefficient vector has length {got}, expected {want}")]
    Support { got: usize, want: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// `‖x‖_p^p` under the normalized trace of a square matrix.
pub fn normalized_pow(x: &CMat, p: f64) -> f64 {
    spectral::schatten_pow(x, p) / x.nrows() as f64
}

/// `e^{2πi e/d}`, exact at quarter turns.
pub(crate) fn root(d: usize, e: i64) -> C64 {
    let e = e.rem_euclid(d as i64) as usize;
    if (4 * e) % d == 0 {
        return [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][4 * e / d];
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / d as f64)
}

/// Block matrix with `blocks(r, c)` of size `m` at block position `(r, c)`.
pub(crate) fn block_matrix(n: usize, m: usize, blocks: impl Fn(usize, usize) -> Option<CMat>) -> CMat {
    let mut out = CMat::zeros(n * m, n * m);
    for r in 0..n {
        for c in 0..n {
            if let Some(b) = blocks(r, c) {
                out.view_mut((r * m, c * m), (m, m)).copy_from(&b);
            }
        }
    }
    out
}

/// Coefficients `τ(w^* x)` against an orthonormal family of words.
pub(crate) fn coefficients(words: &[CMat], x: &CMat) -> Vec<C64> {
    let dim = x.nrows() as f64;
    words.iter().map(|w| w.conjugate().component_mul(x).sum() / dim).collect()
}

/// Matrix of `x ↦ Σ_k d_k b · E_{k−1} x` computed with matrix products.
pub(crate) fn filtered_paraproduct(words: &[CMat], maxes: &[usize], bhat: &[C64]) -> CMat {
    let top = maxes.iter().copied().max().unwrap_or(0);
    let dim = words[0].nrows();
    let diffs: Vec<CMat> = (0..=top)
        .map(|k| {
            words.iter().zip(maxes).zip(bhat).filter(|((_, &m), _)| m == k).fold(CMat::zeros(dim, dim), |acc, ((w, _), b)| acc + w * *b)
        })
        .collect();
    let len = words.len();
    let mut out = CMat::zeros(len, len);
    for b in 0..len {
        let image = (maxes[b] + 1..=top).fold(CMat::zeros(dim, dim), |acc, k| acc + &diffs[k] * &words[b]);
        for (a, c) in coefficients(words, &image).into_iter().enumerate() {
            out[(a, b)] = c;
        }
    }
    out
}

/// Result of comparing a scalar paraproduct matrix with its Walsh-side block form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transference {
    /// `‖[π_b]‖_p` on the basis.
    pub scalar_side: f64,
    /// `‖[π_b̃]‖_p` under `Tr ⊗ tr`.
    pub walsh_side: f64,
    pub residual: f64,
}
