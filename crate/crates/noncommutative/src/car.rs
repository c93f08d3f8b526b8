//! CAR algebra: generators are tensor products of Pauli matrices, words
//! `c_A` are indexed by bitmasks (bit `k−1` set when `k ∈ A`).

use crate::{block_matrix, normalized_pow, CMat, NcError, Transference, C64};
use spectral::{max_abs, schatten, DenseOperator};

pub fn pauli() -> [CMat; 3] {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    [
        CMat::from_row_slice(2, 2, &[l, o, o, -l]),
        CMat::from_row_slice(2, 2, &[o, l, l, o]),
        CMat::from_row_slice(2, 2, &[o, -i, i, o]),
    ]
}

/// `c_1, …, c_{2n}` as `2^n × 2^n` matrices; `c_{2m−1}` and `c_{2m}` carry
/// `σ_1`, `σ_2` in tensor position `m` after `m − 1` factors `σ_0`.
pub fn car_generators(n: usize) -> Result<Vec<CMat>, NcError> {
    if n == 0 {
        return Err(NcError::Level);
    }
    let [s0, s1, s2] = pauli();
    let id = CMat::identity(2, 2);
    let mut out = Vec::with_capacity(2 * n);
    for m in 1..=n {
        for mid in [&s1, &s2] {
            let mut acc = CMat::identity(1, 1);
            for pos in 1..=n {
                let f = if pos < m {
                    &s0
                } else if pos == m {
                    mid
                } else {
                    &id
                };
                acc = acc.kronecker(f);
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// CAR system of level `n`: words on subsets of `{1..n}` as `2^n × 2^n` matrices.
#[derive(Debug, Clone)]
pub struct CarAlgebra {
    n: usize,
    words: Vec<CMat>,
}

pub fn max_of(mask: usize) -> usize {
    (usize::BITS - mask.leading_zeros()) as usize
}

impl CarAlgebra {
    pub fn new(n: usize) -> Result<Self, NcError> {
        let gens = car_generators(n)?;
        let dim = 1usize << n;
        let words = (0..dim)
            .map(|mask| (0..n).filter(|k| mask >> k & 1 == 1).fold(CMat::identity(dim, dim), |acc, k| acc * &gens[k]))
            .collect();
        Ok(Self { n, words })
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn basis_len(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, mask: usize) -> Result<&CMat, NcError> {
        self.words.get(mask).ok_or_else(|| NcError::Index(format!("subset mask {mask:#b} exceeds level {}", self.n)))
    }

    /// `Σ_A b̂(A) c_A`.
    pub fn element(&self, bhat: &[C64]) -> Result<CMat, NcError> {
        self.check(bhat)?;
        let dim = self.words[0].nrows();
        Ok(bhat.iter().zip(&self.words).fold(CMat::zeros(dim, dim), |acc, (b, w)| acc + w * *b))
    }

    /// `d_k b = Σ_{max A = k} b̂(A) c_A`.
    pub fn difference(&self, bhat: &[C64], k: usize) -> Result<CMat, NcError> {
        self.check(bhat)?;
        let masked: Vec<C64> = bhat.iter().enumerate().map(|(a, &b)| if max_of(a) == k { b } else { C64::new(0.0, 0.0) }).collect();
        self.element(&masked)
    }

    fn check(&self, bhat: &[C64]) -> Result<(), NcError> {
        if bhat.len() != self.words.len() {
            return Err(NcError::Support { got: bhat.len(), want: self.words.len() });
        }
        Ok(())
    }

    /// Coefficients `τ(c_A^* x)`.
    pub fn coefficients(&self, x: &CMat) -> Vec<C64> {
        crate::coefficients(&self.words, x)
    }

    /// Matrix of `π_b = Σ_k d_k b · E_{k−1}` on the basis, assembled from the algebra.
    pub fn paraproduct_from_algebra(&self, bhat: &[C64]) -> Result<CMat, NcError> {
        self.check(bhat)?;
        let maxes: Vec<usize> = (0..self.words.len()).map(max_of).collect();
        Ok(crate::filtered_paraproduct(&self.words, &maxes, bhat))
    }
}

/// Normalized trace.
pub fn car_trace(x: &CMat) -> C64 {
    x.trace() / x.nrows() as f64
}

/// `ε` with `c_A c_B^* = ε c_{AΔB}`: reversing `B` and moving each of its
/// letters past the larger letters of `A`.
pub fn word_sign(a: usize, b: usize) -> f64 {
    let q = b.count_ones() as usize;
    let mut count = q * q.saturating_sub(1) / 2;
    for k in 0..usize::BITS as usize {
        if b >> k & 1 == 1 {
            count += (a >> (k + 1)).count_ones() as usize;
        }
    }
    if count % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `[π_b]` with entries `ε(A, B) b̂(AΔB)` when `max A > max B`.
pub fn car_paraproduct(bhat: &[C64], n: usize) -> Result<CMat, NcError> {
    let len = 1usize << n;
    if bhat.len() != len {
        return Err(NcError::Support { got: bhat.len(), want: len });
    }
    Ok(CMat::from_fn(len, len, |a, b| if max_of(a) > max_of(b) { bhat[a ^ b] * word_sign(a, b) } else { C64::new(0.0, 0.0) }))
}

/// `(Σ_k 2^k ‖d_k b‖_p^p)^{1/p}` with the normalized trace.
pub fn besov_car(alg: &CarAlgebra, bhat: &[C64], p: f64) -> Result<f64, NcError> {
    let mut total = 0.0;
    for k in 1..=alg.level() {
        total += 2f64.powi(k as i32) * normalized_pow(&alg.difference(bhat, k)?, p);
    }
    Ok(total.powf(1.0 / p))
}

/// Walsh-side block matrix with blocks `b̂(AΔB) c_{AΔB}` when `max A > max B`.
pub fn car_walsh_matrix(alg: &CarAlgebra, bhat: &[C64]) -> Result<CMat, NcError> {
    alg.check(bhat)?;
    let m = alg.words[0].nrows();
    Ok(block_matrix(alg.basis_len(), m, |a, b| (max_of(a) > max_of(b)).then(|| &alg.words[a ^ b] * bhat[a ^ b])))
}

pub fn car_transference_check(alg: &CarAlgebra, bhat: &[C64], p: f64) -> Result<Transference, NcError> {
    let scalar_side = schatten(&car_paraproduct(bhat, alg.level())?, p);
    let walsh = car_walsh_matrix(alg, bhat)?;
    let walsh_side = DenseOperator::blocked(walsh, alg.words[0].nrows()).and_then(|op| op.norm(p)).expect("square block matrix");
    Ok(Transference { scalar_side, walsh_side, residual: (scalar_side - walsh_side).abs() })
}

/// `max_k |E_θ ‖d_k b̃(θ)‖_p^p − ‖d_k b‖_p^p|` over sign vectors `θ ∈ {±1}^n`,
/// with `b̃(θ) = Σ_A b̂(A) ω_A(θ) c_A`.
pub fn walsh_difference_residual(alg: &CarAlgebra, bhat: &[C64], p: f64) -> Result<f64, NcError> {
    let n = alg.level();
    let mut worst = 0.0f64;
    for k in 1..=n {
        let want = normalized_pow(&alg.difference(bhat, k)?, p);
        let mut acc = 0.0;
        for theta in 0..(1usize << n) {
            let twisted: Vec<C64> =
                bhat.iter().enumerate().map(|(a, &b)| if (a & theta).count_ones() % 2 == 1 { -b } else { b }).collect();
            acc += normalized_pow(&alg.difference(&twisted, k)?, p);
        }
        worst = worst.max((acc / (1usize << n) as f64 - want).abs());
    }
    Ok(worst)
}

/// Largest entry of `[π_b]` at positions with `max A ≤ max B`.
pub fn structural_leak(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..m.nrows() {
        for b in 0..m.ncols() {
            if max_of(a) <= max_of(b) {
                worst = worst.max(m[(a, b)].norm());
            }
        }
    }
    worst
}

pub fn residual(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}
