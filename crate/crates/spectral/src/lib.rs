//! Dense complex operators and their Schatten norms.
//!
//! Norms are computed from the singular values of the full matrix. An
//! operator may carry a block dimension `m`; under the normalized-on-block
//! convention the trace is `Tr ⊗ tr_m`, so the p-th power sum is divided by `m`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("operator is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("exponent p must be positive, got {0}")]
    BadExponent(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("partition is invalid: {0}")]
    BadPartition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceConvention {
    Unweighted,
    /// `Tr ⊗ tr_m` with `tr_m = Tr / m` on the block factor.
    NormalizedOnBlock,
}

/// Square matrix acting on `C^D ⊗ C^m`, coordinate `basis * m + row`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub mat: CMat,
    pub block: usize,
    pub convention: TraceConvention,
}

impl DenseOperator {
    pub fn new(mat: CMat, block: usize, convention: TraceConvention) -> Result<Self, SpectralError> {
        if mat.nrows() != mat.ncols() {
            return Err(SpectralError::NotSquare(mat.nrows(), mat.ncols()));
        }
        if block == 0 || mat.nrows() % block != 0 {
            return Err(SpectralError::DimensionMismatch(mat.nrows(), block));
        }
        Ok(Self { mat, block, convention })
    }

    /// Unweighted scalar operator.
    pub fn scalar(mat: CMat) -> Result<Self, SpectralError> {
        Self::new(mat, 1, TraceConvention::Unweighted)
    }

    /// Block operator under `Tr ⊗ tr_m`.
    pub fn blocked(mat: CMat, block: usize) -> Result<Self, SpectralError> {
        Self::new(mat, block, TraceConvention::NormalizedOnBlock)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), ..self.clone() }
    }

    fn trace_weight(&self) -> f64 {
        match self.convention {
            TraceConvention::Unweighted => 1.0,
            TraceConvention::NormalizedOnBlock => self.block as f64,
        }
    }

    pub fn norm(&self, p: f64) -> Result<f64, SpectralError> {
        schatten_norm(self, p)
    }

    /// `‖T‖_p^p`, the trace of `|T|^p` under the operator's convention.
    pub fn norm_pow(&self, p: f64) -> Result<f64, SpectralError> {
        check_exponent(p)?;
        if p.is_infinite() {
            return Err(SpectralError::BadExponent(p));
        }
        Ok(power_sum(&singular_values(&self.mat), p) / self.trace_weight())
    }
}

fn check_exponent(p: f64) -> Result<(), SpectralError> {
    if p.is_nan() || p <= 0.0 {
        return Err(SpectralError::BadExponent(p));
    }
    Ok(())
}

pub fn singular_values(mat: &CMat) -> Vec<f64> {
    if mat.is_empty() {
        return Vec::new();
    }
    mat.singular_values().iter().copied().collect()
}

/// Singular values below `σ_max · n · ε` are round-off and are dropped;
/// for `p < 1` they would otherwise dominate the sum.
fn power_sum(sv: &[f64], p: f64) -> f64 {
    let top = sv.iter().copied().fold(0.0, f64::max);
    let cut = top * sv.len().max(1) as f64 * f64::EPSILON;
    sv.iter().filter(|&&s| s > cut).map(|s| s.powf(p)).sum()
}

/// `(τ|T|^p)^{1/p}`; `p = ∞` gives the largest singular value.
pub fn schatten_norm(t: &DenseOperator, p: f64) -> Result<f64, SpectralError> {
    check_exponent(p)?;
    let sv = singular_values(&t.mat);
    if p.is_infinite() {
        return Ok(sv.iter().copied().fold(0.0, f64::max));
    }
    Ok((power_sum(&sv, p) / t.trace_weight()).powf(1.0 / p))
}

/// Unweighted Schatten norm of a bare matrix.
pub fn schatten(mat: &CMat, p: f64) -> f64 {
    let sv = singular_values(mat);
    if p.is_infinite() {
        return sv.iter().copied().fold(0.0, f64::max);
    }
    power_sum(&sv, p).powf(1.0 / p)
}

/// Unweighted `Σ σ^p`.
pub fn schatten_pow(mat: &CMat, p: f64) -> f64 {
    power_sum(&singular_values(mat), p)
}

pub fn op_norm(mat: &CMat) -> f64 {
    schatten(mat, f64::INFINITY)
}

/// The operator `w ↦ u ⟨v, w⟩`.
pub fn rank_one(u: &[C64], v: &[C64]) -> Result<CMat, SpectralError> {
    if u.len() != v.len() {
        return Err(SpectralError::DimensionMismatch(u.len(), v.len()));
    }
    Ok(CMat::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj()))
}

/// Keeps the entries whose row and column lie in the same block of the partition.
pub fn block_diagonal_project(t: &CMat, blocks: &[Vec<usize>]) -> Result<CMat, SpectralError> {
    let n = t.nrows();
    let mut label = vec![usize::MAX; n];
    for (b, members) in blocks.iter().enumerate() {
        for &i in members {
            if i >= n {
                return Err(SpectralError::BadPartition(format!("index {i} out of range")));
            }
            if label[i] != usize::MAX {
                return Err(SpectralError::BadPartition(format!("index {i} in two blocks")));
            }
            label[i] = b;
        }
    }
    if let Some(i) = label.iter().position(|&l| l == usize::MAX) {
        return Err(SpectralError::BadPartition(format!("index {i} uncovered")));
    }
    Ok(CMat::from_fn(n, t.ncols(), |i, j| {
        if label[i] == label[j] {
            t[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Keeps entry `(i, j)` iff `rank[i] > rank[j]`.
pub fn triangular_project<R: PartialOrd>(t: &CMat, rank: &[R]) -> Result<CMat, SpectralError> {
    if rank.len() != t.nrows() || t.nrows() != t.ncols() {
        return Err(SpectralError::DimensionMismatch(rank.len(), t.nrows()));
    }
    Ok(CMat::from_fn(t.nrows(), t.ncols(), |i, j| {
        if rank[i] > rank[j] {
            t[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Largest entry modulus.
pub fn max_abs(t: &CMat) -> f64 {
    t.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
        CMat::from_fn(r, c, |_, _| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            C64::new(a, b)
        })
    }

    fn unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        gaussian(rng, n, n).qr().q()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_and_diagonal() {
        let id = DenseOperator::scalar(CMat::identity(3, 3)).unwrap();
        assert!((id.norm(2.0).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        let d = DenseOperator::scalar(CMat::from_diagonal(&DVector::from_vec(vec![c(3.0), c(4.0)]))).unwrap();
        assert!((d.norm(1.0).unwrap() - 7.0).abs() < 1e-13);
        assert!((d.norm(f64::INFINITY).unwrap() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(DenseOperator::scalar(CMat::zeros(2, 3)), Err(SpectralError::NotSquare(2, 3))));
        let id = DenseOperator::scalar(CMat::identity(2, 2)).unwrap();
        assert!(id.norm(0.0).is_err());
        assert!(rank_one(&[c(1.0)], &[c(1.0), c(2.0)]).is_err());
    }

    #[test]
    fn normalized_block_divides_by_m() {
        let op = DenseOperator::blocked(CMat::identity(6, 6), 3).unwrap();
        assert!((op.norm(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!((op.norm_pow(1.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let a = gaussian(&mut rng, 8, 8);
            let (u, v) = (unitary(&mut rng, 8), unitary(&mut rng, 8));
            let b = &u * &a * &v;
            for p in [0.5, 1.0, 2.0, 3.0, f64::INFINITY] {
                let (x, y) = (schatten(&a, p), schatten(&b, p));
                assert!((x - y).abs() < 1e-10 * x, "p={p}");
            }
        }
    }

    #[test]
    fn rank_one_norms() {
        let u = [c(1.0), c(1.0)];
        let t = rank_one(&u, &u).unwrap();
        for p in [0.5, 1.0, 2.0, f64::INFINITY] {
            assert!((schatten(&t, p) - 2.0).abs() < 1e-13);
        }
        let w = [c(1.0), c(-1.0)];
        assert!(rank_one(&u, &w).unwrap().trace().norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = gaussian(&mut rng, 6, 1);
        let b = gaussian(&mut rng, 6, 1);
        let t = rank_one(a.as_slice(), b.as_slice()).unwrap();
        let expect = a.norm() * b.norm();
        for p in [0.5, 1.0, 2.0, 4.0] {
            assert!((schatten(&t, p) - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn projections_small() {
        let t = CMat::from_row_slice(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
        let e = block_diagonal_project(&t, &[vec![0], vec![1]]).unwrap();
        assert_eq!(e, CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(4.0)]));
        let p = triangular_project(&t, &[1, 2]).unwrap();
        assert_eq!(p, CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(3.0), c(0.0)]));
        let upper = CMat::from_row_slice(2, 2, &[c(1.0), c(2.0), c(0.0), c(4.0)]);
        assert!(max_abs(&triangular_project(&upper, &[0, 1]).unwrap()) == 0.0);
        assert!(block_diagonal_project(&t, &[vec![0, 1], vec![1]]).is_err());
        assert!(block_diagonal_project(&t, &[vec![0]]).is_err());
    }

    #[test]
    fn block_diagonal_fixes_block_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let parts = vec![vec![0, 2], vec![1, 3]];
        let t = block_diagonal_project(&gaussian(&mut rng, 4, 4), &parts).unwrap();
        assert_eq!(block_diagonal_project(&t, &parts).unwrap(), t);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn block_diagonal_contracts(seed in any::<u64>(), nblocks in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = gaussian(&mut rng, 12, 12);
            let mut parts = vec![Vec::new(); nblocks];
            for i in 0..12 {
                parts[(seed as usize / (i + 1) + i * 7) % nblocks].push(i);
            }
            let parts: Vec<_> = parts.into_iter().filter(|b| !b.is_empty()).collect();
            let e = block_diagonal_project(&t, &parts).unwrap();
            for p in [1.0, 2.0, 4.0] {
                prop_assert!(schatten(&e, p) <= schatten(&t, p) * (1.0 + 1e-12));
            }
        }

        #[test]
        fn power_relation(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = gaussian(&mut rng, 7, 7);
            let tt = t.adjoint() * &t;
            for p in [1.0, 2.0, 4.0] {
                let lhs = schatten_pow(&t, p);
                let rhs = schatten_pow(&tt, p / 2.0);
                prop_assert!((lhs - rhs).abs() < 1e-10 * lhs);
            }
        }

        #[test]
        fn triangle_inequalities(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = gaussian(&mut rng, 6, 6);
            let b = gaussian(&mut rng, 6, 6);
            let s = &a + &b;
            for p in [1.0, 2.0, 3.0] {
                prop_assert!(schatten(&s, p) <= (schatten(&a, p) + schatten(&b, p)) * (1.0 + 1e-12));
            }
            for p in [0.3, 0.5, 0.9] {
                prop_assert!(schatten_pow(&s, p) <= (schatten_pow(&a, p) + schatten_pow(&b, p)) * (1.0 + 1e-12));
            }
        }

        #[test]
        fn orthogonal_range_sum(seed in any::<u64>(), n in 2usize..5) {
            // T = Σ R_i with R_i = P_i X_i, the P_i projecting onto disjoint coordinate sets.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dim = 12;
            let mut t = CMat::zeros(dim, dim);
            let mut parts = Vec::new();
            for i in 0..n {
                let mut r = gaussian(&mut rng, dim, dim);
                for row in 0..dim {
                    if row % n != i {
                        r.row_mut(row).fill(C64::new(0.0, 0.0));
                    }
                }
                t += &r;
                parts.push(r);
            }
            for p in [0.5, 1.0, 2.0, 3.0] {
                let lower: f64 = parts.iter().map(|r| schatten_pow(r, p)).sum::<f64>() / n as f64;
                prop_assert!(schatten_pow(&t, p) >= lower * (1.0 - 1e-12));
            }
        }
    }
}
