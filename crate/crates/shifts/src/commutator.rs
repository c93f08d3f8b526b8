use crate::{assemble_shift, block_support, CMat, ShiftError, ShiftSpec, C64};
use dyadic_core::{CubeId, FiniteDyadicSystem, Symbol};
use paraproducts::{cube_average, mult_op, r_op};
use rayon::prelude::*;
use spectral::{max_abs, schatten_pow, DenseOperator};

/// `s ⊗ I_m` in the coordinates `β·m + r`.
pub fn lift(s: &CMat, m: usize) -> CMat {
    if m == 1 {
        return s.clone();
    }
    CMat::from_fn(s.nrows() * m, s.ncols() * m, |r, c| if r % m == c % m { s[(r / m, c / m)] } else { C64::new(0.0, 0.0) })
}

/// `Φ = [S, R_b]` and its pieces `B_K` with entries `a_{IJK}^{ξη}(⟨b⟩_I − ⟨b⟩_J)`.
#[derive(Debug, Clone)]
pub struct PhiBlocks {
    pub m: usize,
    pub phi: CMat,
    pub blocks: Vec<(CubeId, CMat)>,
}

impl PhiBlocks {
    pub fn block_sum(&self) -> CMat {
        self.blocks.iter().fold(CMat::zeros(self.phi.nrows(), self.phi.ncols()), |acc, (_, b)| acc + b)
    }

    pub fn assembly_residual(&self) -> f64 {
        max_abs(&(&self.phi - self.block_sum()))
    }

    /// `max_{K1 ≠ K2} max |B_{K1}^† B_{K2}|`.
    pub fn max_cross(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, (_, b1)) in self.blocks.iter().enumerate() {
            for (_, b2) in self.blocks.iter().skip(a + 1) {
                worst = worst.max(max_abs(&(b1.adjoint() * b2))).max(max_abs(&(b2.adjoint() * b1)));
            }
        }
        worst
    }

    /// `(‖Φ‖_p^p, Σ_K ‖B_K^† B_K‖_{p/2}^{p/2})`.
    pub fn additivity(&self, p: f64) -> (f64, f64) {
        let rhs = self.blocks.iter().map(|(_, b)| schatten_pow(&(b.adjoint() * b), p / 2.0)).sum();
        (schatten_pow(&self.phi, p), rhs)
    }
}

pub fn phi_blocks(sys: &FiniteDyadicSystem, spec: &ShiftSpec, b: &Symbol) -> Result<PhiBlocks, ShiftError> {
    let m = b.m;
    let s = lift(&assemble_shift(sys, spec)?, m);
    let r = r_op(sys, b)?;
    let phi = &s * &r - &r * &s;
    let mut blocks = Vec::with_capacity(spec.coeffs.len());
    for (k, a) in &spec.coeffs {
        let (rows, cols) = block_support(sys, spec, *k);
        let avg = |beta: usize| cube_average(sys, b, sys.basis_haar(beta).expect("Haar row").cube);
        let col_avg: Vec<CMat> = cols.iter().map(|&c| avg(c)).collect();
        let mut out = CMat::zeros(phi.nrows(), phi.ncols());
        for (ri, &row) in rows.iter().enumerate() {
            let row_avg = avg(row);
            for (ci, &col) in cols.iter().enumerate() {
                let blk = (&col_avg[ci] - &row_avg) * a[(ri, ci)];
                out.view_mut((row * m, col * m), (m, m)).copy_from(&blk);
            }
        }
        blocks.push((*k, out));
    }
    Ok(PhiBlocks { m, phi, blocks })
}

/// One sweep row: `‖[S, M_b]‖_p`, `‖b‖` in the Haar Besov form, and their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub i: usize,
    pub j: usize,
    pub seed: u64,
    pub p: f64,
    pub norm: f64,
    pub besov: f64,
    pub ratio: f64,
}

impl GrowthRow {
    /// `ratio / (i^p + j^p + 1)^{1/p}`.
    pub fn normalized(&self) -> f64 {
        let (i, j) = (self.i as f64, self.j as f64);
        self.ratio / (i.powf(self.p) + j.powf(self.p) + 1.0).powf(1.0 / self.p)
    }
}

fn row_from(sys: &FiniteDyadicSystem, mult: &CMat, b: &Symbol, spec: &ShiftSpec, seed: u64, p: f64, besov: f64) -> Result<GrowthRow, ShiftError> {
    let s = lift(&assemble_shift(sys, spec)?, b.m);
    let comm = &s * mult - mult * &s;
    let norm = DenseOperator::blocked(comm, b.m).and_then(|op| op.norm(p)).expect("square blocked operator");
    // constant symbols: both sides vanish, round-off commutators count as zero
    let ratio = if besov == 0.0 && norm < 1e-12 { 0.0 } else { norm / besov };
    Ok(GrowthRow { i: spec.i, j: spec.j, seed, p, norm, besov, ratio })
}

pub fn growth_row(sys: &FiniteDyadicSystem, b: &Symbol, spec: &ShiftSpec, seed: u64, p: f64) -> Result<GrowthRow, ShiftError> {
    let mult = mult_op(sys, b)?;
    row_from(sys, &mult, b, spec, seed, p, norms::besov_haar(sys, b, p)?)
}

/// Rows for every `(i, j, seed)` with random shifts, in input order.
pub fn commutator_growth_sweep(sys: &FiniteDyadicSystem, b: &Symbol, p: f64, pairs: &[(usize, usize)], seeds: &[u64]) -> Result<Vec<GrowthRow>, ShiftError> {
    let mult = mult_op(sys, b)?;
    let besov = norms::besov_haar(sys, b, p)?;
    let jobs: Vec<(usize, usize, u64)> = pairs.iter().flat_map(|&(i, j)| seeds.iter().map(move |&s| (i, j, s))).collect();
    jobs.par_iter()
        .map(|&(i, j, seed)| {
            let spec = crate::random_shift(sys, i, j, seed)?;
            row_from(sys, &mult, b, &spec, seed, p, besov)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_shift;
    use dyadic_core::{DyadicParams, HaarIndex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symbol(sys: &FiniteDyadicSystem, m: usize, seed: u64) -> Symbol {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = Symbol::zeros(sys, m);
        for blk in b.coeffs.iter_mut() {
            *blk = CMat::from_fn(m, m, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        }
        b
    }

    #[test]
    fn dual_assembly_and_orthogonality() {
        let sys = FiniteDyadicSystem::standard(2, 4).unwrap();
        for (seed, (i, j)) in [(0, 1), (1, 0), (2, 2), (1, 1)].into_iter().enumerate() {
            let spec = random_shift(&sys, i, j, seed as u64).unwrap();
            let pb = phi_blocks(&sys, &spec, &random_symbol(&sys, 1, seed as u64 + 50)).unwrap();
            assert!(pb.assembly_residual() < 1e-12);
            assert!(pb.max_cross() < 1e-14);
            let (lhs, rhs) = pb.additivity(2.0);
            assert!((lhs - rhs).abs() < 1e-10 * lhs.max(1.0));
        }
    }

    #[test]
    fn additivity_other_exponents_and_blocks() {
        let sys = FiniteDyadicSystem::build(DyadicParams::new(2, 2, 2).unwrap(), None).unwrap();
        let spec = random_shift(&sys, 1, 0, 3).unwrap();
        let pb = phi_blocks(&sys, &spec, &random_symbol(&sys, 2, 4)).unwrap();
        assert!(pb.assembly_residual() < 1e-12);
        assert!(pb.max_cross() < 1e-14);
        for p in [1.0, 3.0, 4.0] {
            let (lhs, rhs) = pb.additivity(p);
            assert!((lhs - rhs).abs() < 1e-9 * lhs.max(1.0), "{p}: {lhs} {rhs}");
        }
    }

    #[test]
    fn constant_symbol_commutes() {
        let sys = FiniteDyadicSystem::standard(2, 4).unwrap();
        let b = Symbol::single(&sys, HaarIndex { cube: CubeId { scale: 0, index: 0 }, color: 0 }, CMat::from_element(1, 1, C64::new(2.0, 1.0)));
        let spec = random_shift(&sys, 1, 2, 8).unwrap();
        assert!(max_abs(&phi_blocks(&sys, &spec, &b).unwrap().phi) < 1e-14);
        let rows = commutator_growth_sweep(&sys, &b, 2.0, &[(0, 0), (1, 2)], &[1, 2]).unwrap();
        assert!(rows.iter().all(|r| r.norm < 1e-12 && r.ratio == 0.0));
    }

    #[test]
    fn sweep_is_ordered_and_deterministic() {
        let sys = FiniteDyadicSystem::standard(2, 4).unwrap();
        let b = random_symbol(&sys, 1, 1);
        let pairs = [(0, 0), (2, 1)];
        let a = commutator_growth_sweep(&sys, &b, 2.0, &pairs, &[5, 6]).unwrap();
        assert_eq!(a, commutator_growth_sweep(&sys, &b, 2.0, &pairs, &[5, 6]).unwrap());
        assert_eq!(a.iter().map(|r| (r.i, r.j, r.seed)).collect::<Vec<_>>(), vec![(0, 0, 5), (0, 0, 6), (2, 1, 5), (2, 1, 6)]);
        let single = growth_row(&sys, &b, &random_shift(&sys, 2, 1, 6).unwrap(), 6, 2.0).unwrap();
        assert_eq!(single, a[3]);
    }

    #[test]
    fn lift_is_kronecker() {
        let s = CMat::from_fn(2, 2, |r, c| C64::new((r * 2 + c) as f64, 0.0));
        let l = lift(&s, 3);
        assert_eq!(l[(3, 0)], s[(1, 0)]);
        assert_eq!(l[(4, 1)], s[(1, 0)]);
        assert_eq!(l[(4, 0)], C64::new(0.0, 0.0));
    }
}
