//! `M_d^{⊗n}` with the basis `U_α = U_{(i_1,j_1)} ⊗ … ⊗ U_{(i_n,j_n)}`,
//! `U_{(i,j)} = Σ_l ω^{il} e_{l,σ^j(l)}` for the cyclic shift `σ`.
//!
//! A word is a list of pairs in `[1, d]²`, level 1 first, with no trailing
//! `(d, d)`. Its basis index is `Σ_k digit_k (d²)^{k−1}` where
//! `digit = (i mod d)·d + (j mod d)`, so `(d, d)` is the digit 0 and
//! `max α` is the number of significant digits.

use crate::{block_matrix, normalized_pow, root, CMat, NcError, Transference, C64};
use spectral::{schatten, DenseOperator};

pub type Word = Vec<(usize, usize)>;

fn rep(v: i64, d: usize) -> usize {
    let r = v.rem_euclid(d as i64) as usize;
    if r == 0 {
        d
    } else {
        r
    }
}

/// `U_{(i,j)}` for `1 ≤ i, j ≤ d`.
pub fn tensor_basis(i: usize, j: usize, d: usize) -> Result<CMat, NcError> {
    if d < 2 || !(1..=d).contains(&i) || !(1..=d).contains(&j) {
        return Err(NcError::Index(format!("pair ({i},{j}) with d = {d}")));
    }
    let mut u = CMat::zeros(d, d);
    for l in 1..=d {
        let col = rep((l + j) as i64, d);
        u[(l - 1, col - 1)] = root(d, (i * l) as i64);
    }
    Ok(u)
}

pub fn word_index(word: &[(usize, usize)], d: usize) -> usize {
    word.iter().rev().fold(0, |acc, &(i, j)| acc * d * d + (i % d) * d + (j % d))
}

pub fn index_word(mut index: usize, d: usize) -> Word {
    let mut out = Vec::new();
    while index > 0 {
        let digit = index % (d * d);
        out.push((rep((digit / d) as i64, d), rep((digit % d) as i64, d)));
        index /= d * d;
    }
    out
}

/// `(η, λ)` with `U_α U_β^* = λ U_η`.
pub fn eta_lambda(alpha: &[(usize, usize)], beta: &[(usize, usize)], d: usize) -> (Word, C64) {
    let levels = alpha.len().max(beta.len());
    let mut eta = Vec::with_capacity(levels);
    let mut phase = 0i64;
    for k in 0..levels {
        let (ai, aj) = alpha.get(k).copied().unwrap_or((d, d));
        let (bi, bj) = beta.get(k).copied().unwrap_or((d, d));
        let dj = aj as i64 - bj as i64;
        eta.push((rep(ai as i64 - bi as i64, d), rep(dj, d)));
        phase -= bi as i64 * dj;
    }
    while eta.last() == Some(&(d, d)) {
        eta.pop();
    }
    (eta, root(d, phase))
}

#[derive(Debug, Clone)]
pub struct TensorAlgebra {
    d: usize,
    n: usize,
    words: Vec<CMat>,
}

impl TensorAlgebra {
    pub fn new(d: usize, n: usize) -> Result<Self, NcError> {
        if n == 0 {
            return Err(NcError::Level);
        }
        let single: Vec<CMat> =
            (0..d * d).map(|digit| tensor_basis(rep((digit / d) as i64, d), rep((digit % d) as i64, d), d)).collect::<Result<_, _>>()?;
        let len = (d * d).pow(n as u32);
        let words = (0..len)
            .map(|idx| {
                (0..n).fold(CMat::identity(1, 1), |acc, k| acc.kronecker(&single[idx / (d * d).pow(k as u32) % (d * d)]))
            })
            .collect();
        Ok(Self { d, n, words })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn basis_len(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, index: usize) -> Result<&CMat, NcError> {
        self.words.get(index).ok_or_else(|| NcError::Index(format!("basis index {index} exceeds level {}", self.n)))
    }

    pub fn max_of(&self, index: usize) -> usize {
        index_word(index, self.d).len()
    }

    fn check(&self, bhat: &[C64]) -> Result<(), NcError> {
        if bhat.len() != self.words.len() {
            return Err(NcError::Support { got: bhat.len(), want: self.words.len() });
        }
        Ok(())
    }

    pub fn element(&self, bhat: &[C64]) -> Result<CMat, NcError> {
        self.check(bhat)?;
        let dim = self.words[0].nrows();
        Ok(bhat.iter().zip(&self.words).fold(CMat::zeros(dim, dim), |acc, (b, w)| acc + w * *b))
    }

    /// `d_k b = Σ_{max α = k} b̂(α) U_α`.
    pub fn difference(&self, bhat: &[C64], k: usize) -> Result<CMat, NcError> {
        self.check(bhat)?;
        let masked: Vec<C64> =
            bhat.iter().enumerate().map(|(a, &b)| if self.max_of(a) == k { b } else { C64::new(0.0, 0.0) }).collect();
        self.element(&masked)
    }

    pub fn coefficients(&self, x: &CMat) -> Vec<C64> {
        crate::coefficients(&self.words, x)
    }

    pub fn paraproduct_from_algebra(&self, bhat: &[C64]) -> Result<CMat, NcError> {
        self.check(bhat)?;
        let maxes: Vec<usize> = (0..self.words.len()).map(|a| self.max_of(a)).collect();
        Ok(crate::filtered_paraproduct(&self.words, &maxes, bhat))
    }
}

/// `[π_b]` with entries `λ̄ b̂(η)` when `max α > max β`.
pub fn tensor_paraproduct(bhat: &[C64], d: usize, n: usize) -> Result<CMat, NcError> {
    let len = (d * d).pow(n as u32);
    if bhat.len() != len {
        return Err(NcError::Support { got: bhat.len(), want: len });
    }
    let words: Vec<Word> = (0..len).map(|a| index_word(a, d)).collect();
    Ok(CMat::from_fn(len, len, |a, b| {
        if words[a].len() > words[b].len() {
            let (eta, lambda) = eta_lambda(&words[a], &words[b], d);
            lambda.conj() * bhat[word_index(&eta, d)]
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// `(Σ_k d^{2k} ‖d_k b‖_p^p)^{1/p}` with the normalized trace.
pub fn besov_tensor(alg: &TensorAlgebra, bhat: &[C64], p: f64) -> Result<f64, NcError> {
    let mut total = 0.0;
    for k in 1..=alg.n {
        total += (alg.d as f64).powi(2 * k as i32) * normalized_pow(&alg.difference(bhat, k)?, p);
    }
    Ok(total.powf(1.0 / p))
}

/// Walsh-side block matrix with blocks `b̂(η) U_η` when `max α > max β`.
pub fn tensor_walsh_matrix(alg: &TensorAlgebra, bhat: &[C64]) -> Result<CMat, NcError> {
    alg.check(bhat)?;
    let words: Vec<Word> = (0..alg.basis_len()).map(|a| index_word(a, alg.d)).collect();
    Ok(block_matrix(alg.basis_len(), alg.words[0].nrows(), |a, b| {
        (words[a].len() > words[b].len()).then(|| {
            let e = word_index(&eta_lambda(&words[a], &words[b], alg.d).0, alg.d);
            &alg.words[e] * bhat[e]
        })
    }))
}

pub fn tensor_transference_check(alg: &TensorAlgebra, bhat: &[C64], p: f64) -> Result<Transference, NcError> {
    let scalar_side = schatten(&tensor_paraproduct(bhat, alg.d, alg.n)?, p);
    let walsh = tensor_walsh_matrix(alg, bhat)?;
    let walsh_side = DenseOperator::blocked(walsh, alg.words[0].nrows()).and_then(|op| op.norm(p)).expect("square block matrix");
    Ok(Transference { scalar_side, walsh_side, residual: (scalar_side - walsh_side).abs() })
}
