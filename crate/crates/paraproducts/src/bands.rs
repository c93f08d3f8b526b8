use crate::operators::paraproduct;
use crate::{check_symbol, CMat, ParaError, Symbol, C64};
use dyadic_core::{FiniteDyadicSystem, HaarIndex};

/// Keeps the blocks whose row and column basis elements pass the filters.
fn restrict(mat: &CMat, m: usize, rows: impl Fn(usize) -> bool, cols: impl Fn(usize) -> bool) -> CMat {
    CMat::from_fn(mat.nrows(), mat.ncols(), |i, j| if rows(i / m) && cols(j / m) { mat[(i, j)] } else { C64::new(0.0, 0.0) })
}

fn check_scale(sys: &FiniteDyadicSystem, s: usize) -> Result<(), ParaError> {
    if s >= sys.depth() {
        return Err(ParaError::Scale(s));
    }
    Ok(())
}

/// `d_{m+1} π_b d_{n+1}`: input Haar scale `n`, output Haar scale `m`.
pub fn band(sys: &FiniteDyadicSystem, b: &Symbol, n: usize, m: usize) -> Result<CMat, ParaError> {
    check_scale(sys, n)?;
    check_scale(sys, m)?;
    let pi = paraproduct(sys, b)?;
    Ok(restrict(&pi, b.m, |r| sys.basis_scale(r) == Some(m), |c| sys.basis_scale(c) == Some(n)))
}

/// The part of `π_b` fed by the coarse coordinate.
pub fn coarse_remainder(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<CMat, ParaError> {
    let pi = paraproduct(sys, b)?;
    Ok(restrict(&pi, b.m, |_| true, |c| c == 0))
}

/// `π_{b,k}` and its parts: bands `(step·n + k, step·m + k + 1)` with
/// `n = m` in `diagonal` and `n < m` in `off_diagonal`, inside the window.
#[derive(Debug, Clone)]
pub struct Splitting {
    pub full: CMat,
    pub diagonal: CMat,
    pub off_diagonal: CMat,
}

pub fn splitting(sys: &FiniteDyadicSystem, b: &Symbol, step: usize, k: usize) -> Result<Splitting, ParaError> {
    if step < 2 {
        return Err(ParaError::Step);
    }
    if k >= step {
        return Err(ParaError::Scale(k));
    }
    let pi = paraproduct(sys, b)?;
    // progression number of a scale, if it lies on the input or output progression
    let input = |s: usize| (s % step == k).then(|| s / step);
    let output = |s: usize| (s >= k + 1 && (s - k - 1) % step == 0).then(|| (s - k - 1) / step);
    let pick = |diag: bool| {
        CMat::from_fn(pi.nrows(), pi.ncols(), |i, j| {
            let (r, c) = (i / b.m, j / b.m);
            let keep = match (sys.basis_scale(r).and_then(output), sys.basis_scale(c).and_then(input)) {
                (Some(mm), Some(nn)) => (diag && nn == mm) || (!diag && nn < mm),
                _ => false,
            };
            if keep {
                pi[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let diagonal = pick(true);
    let off_diagonal = pick(false);
    Ok(Splitting { full: &diagonal + &off_diagonal, diagonal, off_diagonal })
}

/// `h_I^i ⊗ (1_I/|I|)` scaled by `b_I^i`: the row of `π_b` at `(I, i)`.
pub fn rank_piece(sys: &FiniteDyadicSystem, b: &Symbol, h: HaarIndex) -> Result<CMat, ParaError> {
    check_symbol(sys, b)?;
    sys.check_haar(h)?;
    let row = sys.basis_index(h);
    let pi = paraproduct(sys, b)?;
    Ok(restrict(&pi, b.m, |r| r == row, |_| true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dyadic_core::CubeId;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use spectral::{max_abs, schatten_pow};

    fn random_symbol(sys: &FiniteDyadicSystem, m: usize, rng: &mut ChaCha8Rng) -> Symbol {
        let mut b = Symbol::zeros(sys, m);
        for blk in b.coeffs.iter_mut() {
            *blk = CMat::from_fn(m, m, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        }
        b
    }

    /// `Σ_{I ∈ D_s, i} (‖b_I^i‖_p / |I|^{1/2})^p`.
    fn scale_mass(sys: &FiniteDyadicSystem, b: &Symbol, s: usize, p: f64) -> f64 {
        (1..sys.basis_dim())
            .filter(|&beta| sys.basis_scale(beta) == Some(s))
            .map(|beta| b.block_lp_pow(beta, p) * sys.measure(s).powf(-p / 2.0))
            .sum()
    }

    #[test]
    fn bands_vanish_on_and_below_diagonal() {
        let sys = FiniteDyadicSystem::standard(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = random_symbol(&sys, 2, &mut rng);
        for n in 0..3 {
            for m in 0..=n {
                assert_eq!(max_abs(&band(&sys, &b, n, m).unwrap()), 0.0);
            }
        }
        assert_eq!(band(&sys, &b, 0, 3).unwrap_err(), ParaError::Scale(3));
    }

    #[test]
    fn bands_resolve_paraproduct() {
        let sys = FiniteDyadicSystem::standard(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_symbol(&sys, 1, &mut rng);
        let mut sum = coarse_remainder(&sys, &b).unwrap();
        for n in 0..4 {
            for m in n + 1..4 {
                sum += band(&sys, &b, n, m).unwrap();
            }
        }
        assert!(max_abs(&(sum - paraproduct(&sys, &b).unwrap())) < 1e-12);
    }

    #[test]
    fn single_coefficient_is_its_rank_piece() {
        let sys = FiniteDyadicSystem::standard(3, 2).unwrap();
        let h = HaarIndex { cube: CubeId { scale: 1, index: 2 }, color: 2 };
        let b = Symbol::single(&sys, h, CMat::from_element(1, 1, C64::new(0.3, -1.2)));
        assert_eq!(rank_piece(&sys, &b, h).unwrap(), paraproduct(&sys, &b).unwrap());
    }

    #[test]
    fn splitting_rejects_bad_step() {
        let sys = FiniteDyadicSystem::standard(2, 3).unwrap();
        let b = Symbol::zeros(&sys, 1);
        assert_eq!(splitting(&sys, &b, 1, 0).unwrap_err(), ParaError::Step);
        assert!(splitting(&sys, &b, 3, 3).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn rank_pieces_are_orthogonal_and_bound_below(seed in any::<u64>(), d in 2usize..4, m in 1usize..3) {
            let sys = FiniteDyadicSystem::standard(d, 2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_symbol(&sys, m, &mut rng);
            let pi = paraproduct(&sys, &b).unwrap();
            let hs: Vec<_> = sys.haar_indices().collect();
            let pieces: Vec<_> = hs.iter().map(|&h| rank_piece(&sys, &b, h).unwrap()).collect();
            for (i, x) in pieces.iter().enumerate() {
                for (j, y) in pieces.iter().enumerate() {
                    if i != j {
                        prop_assert!(max_abs(&(x.adjoint() * y)) < 1e-14);
                    }
                }
            }
            for p in [0.5, 1.0, 2.0] {
                let whole = spectral::DenseOperator::blocked(pi.clone(), m).unwrap().norm(p).unwrap();
                for &h in &hs {
                    let beta = sys.basis_index(h);
                    let piece = b.block_lp_pow(beta, p).powf(1.0 / p) / sys.measure(h.cube.scale).sqrt();
                    prop_assert!(whole - piece >= -1e-10);
                }
            }
        }

        #[test]
        fn band_norm_bound(seed in any::<u64>(), p in prop::sample::select(vec![0.3, 0.5, 0.7])) {
            let sys = FiniteDyadicSystem::standard(2, 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_symbol(&sys, 1, &mut rng);
            let d = 2.0f64;
            for n in 0..4 {
                for m in n + 1..4 {
                    let lhs = schatten_pow(&band(&sys, &b, n, m).unwrap(), p);
                    let rhs = (d - 1.0) * d.powf((n as f64 - m as f64) * p / 2.0) * scale_mass(&sys, &b, m, p);
                    prop_assert!(rhs - lhs >= -1e-10);
                }
            }
        }

        #[test]
        fn splitting_parts(seed in any::<u64>(), step in 2usize..4) {
            let sys = FiniteDyadicSystem::standard(2, 5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_symbol(&sys, 1, &mut rng);
            let mut total = CMat::zeros(sys.basis_dim(), sys.basis_dim());
            for k in 0..step {
                let s = splitting(&sys, &b, step, k).unwrap();
                prop_assert!(max_abs(&(&s.full - (&s.diagonal + &s.off_diagonal))) == 0.0);
                total += &s.full;
            }
            // the progressions cover exactly the bands with m − n ≡ 1 mod step
            let mut want = CMat::zeros(sys.basis_dim(), sys.basis_dim());
            for n in 0..5 {
                for m in n + 1..5 {
                    if (m - n) % step == 1 {
                        want += band(&sys, &b, n, m).unwrap();
                    }
                }
            }
            prop_assert!(max_abs(&(total - want)) < 1e-14);
        }
    }
}
