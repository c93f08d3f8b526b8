//! Truncated d-adic filtrations on `[0,1)^dim` with their Haar bases.
//!
//! Cubes are stored on a periodic torus of `q^N` cells per axis (`q = d` in
//! one dimension, `q = 2` otherwise). A grid shift translates each scale by a
//! whole number of finest cells, so shifted systems wrap around the torus.

mod adjacent;
mod haar;
mod io;
mod step;
mod system;

pub use adjacent::{AdjacentFamily, AxisBox, GridCube};
pub use haar::{expectation, haar_function, haar_synthesize, haar_transform, martingale_difference, Symbol};
pub use io::{format_shift, format_symbol, parse_shift, parse_symbol};
pub use step::{block_lp_pow, StepFunction};
pub use system::{CubeId, DyadicParams, FiniteDyadicSystem, GridShift, HaarIndex};

use thiserror::Error;

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;

#[derive(Debug, Error, PartialEq)]
pub enum DyadicError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("grid shift has {got} digits, system depth is {want}")]
    ShiftLength { got: usize, want: usize },
    #[error("grid shifts need binary branching")]
    ShiftNeedsBinary,
    #[error("scale {0} out of range")]
    Scale(usize),
    #[error("cube index {0} out of range")]
    Index(usize),
    #[error("color {0} out of range")]
    Color(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("box is not inside the unit window")]
    OutsideWindow,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub(crate) fn zero_block(m: usize) -> CMat {
    CMat::zeros(m, m)
}
