use crate::assemble::{matrix_from_map, scale_ranks, symbol_to_step};
use crate::operators::{coarse_op, lambda_op, paraproduct, r_op, theta_op};
use crate::{check_symbol, CMat, ParaError, Symbol, C64};
use dyadic_core::{expectation, martingale_difference, FiniteDyadicSystem, StepFunction};
use spectral::max_abs;

fn lift(a: &Symbol, m: usize) -> Symbol {
    Symbol { m, coeffs: a.coeffs.iter().map(|z| CMat::identity(m, m) * z[(0, 0)]).collect() }
}

fn scalar_check(sys: &FiniteDyadicSystem, a: &Symbol) -> Result<(), ParaError> {
    check_symbol(sys, a)?;
    if !a.is_scalar() {
        return Err(ParaError::NotScalar);
    }
    Ok(())
}

fn differences(sys: &FiniteDyadicSystem, f: &StepFunction) -> Vec<StepFunction> {
    (1..=sys.depth()).map(|k| martingale_difference(sys, f, k).expect("scale in range")).collect()
}

/// `Ψ_{a,b} f = Σ_k d_k a · Σ_{j<k} d_j b · d_j f`.
pub fn psi_op(sys: &FiniteDyadicSystem, a: &Symbol, b: &Symbol) -> Result<CMat, ParaError> {
    scalar_check(sys, a)?;
    let da = differences(sys, &symbol_to_step(sys, a)?);
    let db = differences(sys, &symbol_to_step(sys, b)?);
    let zero = StepFunction::zeros(sys.n_cells(), b.m);
    Ok(matrix_from_map(sys, b.m, |f| {
        let df = differences(sys, f);
        let mut inner = zero.clone();
        let mut out = zero.clone();
        for k in 0..sys.depth() {
            out = out.add(&da[k].mul(&inner));
            inner = inner.add(&db[k].mul(&df[k]));
        }
        out
    }))
}

/// `V_{a,b} f = Σ_k d_k a · E_{k−1}(Σ_{j≥k} d_j b · d_j f)`.
pub fn v_op(sys: &FiniteDyadicSystem, a: &Symbol, b: &Symbol) -> Result<CMat, ParaError> {
    scalar_check(sys, a)?;
    let da = differences(sys, &symbol_to_step(sys, a)?);
    let db = differences(sys, &symbol_to_step(sys, b)?);
    let zero = StepFunction::zeros(sys.n_cells(), b.m);
    Ok(matrix_from_map(sys, b.m, |f| {
        let df = differences(sys, f);
        let mut tail = zero.clone();
        let mut out = zero.clone();
        for k in (0..sys.depth()).rev() {
            tail = tail.add(&db[k].mul(&df[k]));
            out = out.add(&da[k].mul(&expectation(sys, &tail, k).expect("scale in range")));
        }
        out
    }))
}

#[derive(Debug, Clone)]
pub struct CommutatorPieces {
    pub m: usize,
    pub psi: CMat,
    pub v: CMat,
    /// `[π_a, R_b]`
    pub commutator: CMat,
    pub pi_a_pi_b: CMat,
    pub pi_a_lambda_b: CMat,
    pub pi_a_theta_b: CMat,
    pub pi_a_k_b: CMat,
    ranks: Vec<usize>,
}

impl CommutatorPieces {
    fn haar_columns(&self, x: CMat) -> CMat {
        let mut x = x;
        x.columns_mut(0, self.m).fill(C64::new(0.0, 0.0));
        x
    }

    /// `[π_a, R_b] = −Ψ − π_a π_b` on Haar-supported inputs.
    pub fn psi_identity_residual(&self) -> f64 {
        max_abs(&self.haar_columns(&self.commutator + &self.psi + &self.pi_a_pi_b))
    }

    /// The same identity on the full space, with the coarse term `π_a K_b`.
    pub fn psi_identity_residual_full(&self) -> f64 {
        max_abs(&(&self.commutator + &self.psi + &self.pi_a_pi_b + &self.pi_a_k_b))
    }

    /// `[π_a, R_b] = −π_a Θ_b + V` on Haar-supported inputs.
    pub fn theta_identity_residual(&self) -> f64 {
        max_abs(&self.haar_columns(&self.commutator + &self.pi_a_theta_b - &self.v))
    }

    pub fn theta_identity_residual_full(&self) -> f64 {
        max_abs(&(&self.commutator + &self.pi_a_theta_b - &self.v + &self.pi_a_k_b))
    }

    /// `[Ψ]` against the strictly scale-lower part of `[π_a Λ_b]`.
    pub fn triangular_residual(&self) -> f64 {
        let tri = spectral::triangular_project(&self.pi_a_lambda_b, &self.ranks).expect("square");
        max_abs(&(&self.psi - tri))
    }
}

pub fn commutator_pieces(sys: &FiniteDyadicSystem, a: &Symbol, b: &Symbol) -> Result<CommutatorPieces, ParaError> {
    scalar_check(sys, a)?;
    check_symbol(sys, b)?;
    let pa = paraproduct(sys, &lift(a, b.m))?;
    let r = r_op(sys, b)?;
    Ok(CommutatorPieces {
        m: b.m,
        psi: psi_op(sys, a, b)?,
        v: v_op(sys, a, b)?,
        commutator: &pa * &r - &r * &pa,
        pi_a_pi_b: &pa * paraproduct(sys, b)?,
        pi_a_lambda_b: &pa * lambda_op(sys, b)?,
        pi_a_theta_b: &pa * theta_op(sys, b)?,
        pi_a_k_b: &pa * coarse_op(sys, b)?,
        ranks: scale_ranks(sys, b.m),
    })
}

/// Pointwise `sup_k |E_{k−1}((a − a_{k−1})(f − f_{k−1}))|` over `k = 1..N`.
pub fn tail_maximal(sys: &FiniteDyadicSystem, a: &Symbol, f: &StepFunction) -> Result<Vec<f64>, ParaError> {
    scalar_check(sys, a)?;
    if f.m != 1 || f.len() != sys.n_cells() {
        return Err(ParaError::NotScalar);
    }
    let av = symbol_to_step(sys, a)?;
    let mut best = vec![0.0f64; sys.n_cells()];
    for k in 1..=sys.depth() {
        let ta = av.sub(&expectation(sys, &av, k - 1)?);
        let tf = f.sub(&expectation(sys, f, k - 1)?);
        let e = expectation(sys, &ta.mul(&tf), k - 1)?;
        for (x, v) in best.iter_mut().zip(e.scalar_values()) {
            *x = x.max(v.norm());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dyadic_core::{haar_function, CubeId, GridShift, HaarIndex};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symbol(sys: &FiniteDyadicSystem, m: usize, rng: &mut ChaCha8Rng) -> Symbol {
        let mut b = Symbol::zeros(sys, m);
        for blk in b.coeffs.iter_mut() {
            *blk = CMat::from_fn(m, m, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        }
        b
    }

    fn constant(sys: &FiniteDyadicSystem, m: usize) -> Symbol {
        let mut s = Symbol::zeros(sys, m);
        s.coeffs[0] = CMat::identity(m, m) * C64::new(1.5, 0.5);
        s
    }

    #[test]
    fn constant_symbols_give_zero() {
        let sys = FiniteDyadicSystem::standard(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_symbol(&sys, 1, &mut rng);
        let b = random_symbol(&sys, 2, &mut rng);
        for (x, y) in [(constant(&sys, 1), b.clone()), (a.clone(), constant(&sys, 2))] {
            assert!(max_abs(&psi_op(&sys, &x, &y).unwrap()) < 1e-13);
            assert!(max_abs(&v_op(&sys, &x, &y).unwrap()) < 1e-13);
        }
        assert_eq!(psi_op(&sys, &b, &b).unwrap_err(), ParaError::NotScalar);
    }

    #[test]
    fn psi_is_supported_on_strict_containment() {
        let sys = FiniteDyadicSystem::standard(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = psi_op(&sys, &random_symbol(&sys, 1, &mut rng), &random_symbol(&sys, 1, &mut rng)).unwrap();
        let cells = |beta: usize| sys.basis_haar(beta).map(|h| sys.cube_cells(h.cube.scale, h.cube.index));
        for r in 0..sys.basis_dim() {
            for c in 0..sys.basis_dim() {
                let inside = match (cells(r), cells(c)) {
                    (Some(s), Some(t)) => s.len() < t.len() && s.iter().all(|x| t.contains(x)),
                    _ => false,
                };
                if !inside {
                    assert!(psi[(r, c)].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn tail_maximal_examples() {
        let sys = FiniteDyadicSystem::standard(2, 3).unwrap();
        let h = HaarIndex { cube: CubeId { scale: 0, index: 0 }, color: 1 };
        let a = Symbol::single(&sys, h, CMat::identity(1, 1));
        let f = haar_function(&sys, h).unwrap();
        assert!(tail_maximal(&sys, &a, &f).unwrap().iter().all(|&x| x >= 1.0 - 1e-14));
        let one = StepFunction::real(&[1.0; 8]);
        assert!(tail_maximal(&sys, &a, &one).unwrap().iter().all(|&x| x < 1e-14));
        assert!(tail_maximal(&sys, &constant(&sys, 1), &f).unwrap().iter().all(|&x| x < 1e-14));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn window_identities(seed in any::<u64>(), d in 2usize..4, m in 1usize..3, shifted in any::<bool>()) {
            let sys = if shifted && d == 2 {
                let p = dyadic_core::DyadicParams::new(2, 3, 1).unwrap();
                FiniteDyadicSystem::build(p, Some(GridShift::new(vec![0, 1, 1]))).unwrap()
            } else {
                FiniteDyadicSystem::standard(d, 3).unwrap()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_symbol(&sys, 1, &mut rng);
            let b = random_symbol(&sys, m, &mut rng);
            let cp = commutator_pieces(&sys, &a, &b).unwrap();
            prop_assert!(cp.psi_identity_residual() < 1e-12);
            prop_assert!(cp.psi_identity_residual_full() < 1e-12);
            prop_assert!(cp.theta_identity_residual() < 1e-12);
            prop_assert!(cp.theta_identity_residual_full() < 1e-12);
            prop_assert!(cp.triangular_residual() < 1e-12);
            // Ψ = π_a Λ_b − V
            prop_assert!(max_abs(&(&cp.psi - (&cp.pi_a_lambda_b - &cp.v))) < 1e-12);
        }
    }
}
