//! Seeded random inputs shared by the suites and experiments.

use crate::{CMat, C64};
use dyadic_core::{FiniteDyadicSystem, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of trial `t` in stream `stream`; streams keep suites independent.
pub fn trial_seed(base: u64, stream: u64, t: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (stream << 32) ^ t as u64
}

pub fn unit_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_block(rng: &mut ChaCha8Rng, m: usize) -> CMat {
    CMat::from_fn(m, m, |_, _| unit_complex(rng))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| unit_complex(rng))
}

/// Random symbol with one of four shapes: dense, sparse, scale-decaying or
/// concentrated on one scale. The shape cycles with `t` so every batch mixes them.
pub fn random_symbol(sys: &FiniteDyadicSystem, m: usize, t: usize, rng: &mut ChaCha8Rng) -> Symbol {
    let mut b = Symbol::zeros(sys, m);
    let depth = sys.depth();
    let target = rng.random_range(0..depth);
    let decay: f64 = rng.random_range(0.3..1.5);
    b.coeffs[0] = random_block(rng, m);
    for beta in 1..sys.basis_dim() {
        let k = sys.basis_scale(beta).expect("Haar position");
        let keep = match t % 4 {
            0 => true,
            1 => rng.random_bool(0.15),
            2 => true,
            _ => k == target,
        };
        if keep {
            let weight = if t % 4 == 2 { decay.powi(k as i32) } else { 1.0 };
            b.coeffs[beta] = random_block(rng, m) * C64::new(weight, 0.0);
        }
    }
    if b.coeffs[1..].iter().all(|c| c.iter().all(|z| *z == C64::new(0.0, 0.0))) {
        b.coeffs[1] = random_block(rng, m);
    }
    b
}

/// Random symbol with vanishing root-scale Haar coefficients.
pub fn window_symbol(sys: &FiniteDyadicSystem, m: usize, t: usize, rng: &mut ChaCha8Rng) -> Symbol {
    let mut b = random_symbol(sys, m, t, rng);
    for beta in 1..sys.basis_dim() {
        if sys.basis_scale(beta) == Some(0) {
            b.coeffs[beta] = CMat::zeros(m, m);
        }
    }
    if b.coeffs.iter().skip(1).all(|c| c.iter().all(|z| *z == C64::new(0.0, 0.0))) {
        let beta = sys.basis_dim() - 1;
        b.coeffs[beta] = random_block(rng, m);
    }
    b
}
