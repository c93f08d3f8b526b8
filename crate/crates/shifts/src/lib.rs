//! Dyadic shifts `S f = Σ_K Σ_{I,J ⊆ K} a_{IJK}^{ξη} ⟨H_I^ξ, f⟩ H_J^η` on
//! binary systems, with `I` and `J` at generations `i` and `j` below `K`.
//!
//! Coefficients of `K` form one matrix, rows `(J, η)` and columns `(I, ξ)`.
//! `J` runs over the descendants of `K` in the order of [`descendants`], and
//! colors run over `1..2^dim`.

mod averaging;
mod commutator;

pub use averaging::{averaged_cell_matrix, cell_unitary, translation_permutation};
pub use commutator::{commutator_growth_sweep, growth_row, lift, phi_blocks, GrowthRow, PhiBlocks};

use dyadic_core::{CubeId, FiniteDyadicSystem, HaarIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitDisc};
use std::collections::BTreeMap;
use thiserror::Error;

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;

#[derive(Debug, Error, PartialEq)]
pub enum ShiftError {
    #[error(transparent)]
    Dyadic(#[from] dyadic_core::DyadicError),
    #[error(transparent)]
    Para(#[from] paraproducts::ParaError),
    #[error(transparent)]
    Norm(#[from] norms::NormError),
    #[error("shifts need a binary system (d = 2)")]
    NotBinary,
    #[error("window of depth {depth} too shallow for complexity ({i}, {j})")]
    TooShallow { i: usize, j: usize, depth: usize },
    #[error("cube ({0}, {1}) carries no coefficients")]
    NotCarrying(usize, usize),
    #[error("coefficient block has shape {got:?}, expected {want:?}")]
    Shape { got: (usize, usize), want: (usize, usize) },
    #[error("coefficient {value} exceeds the bound {bound}")]
    Bound { value: f64, bound: f64 },
}

/// Cube indices at generation `g` below `(k, index)`, first child digit most significant.
pub fn descendants(sys: &FiniteDyadicSystem, k: usize, index: usize, g: usize) -> Vec<usize> {
    let mut out = vec![index];
    for s in 0..g {
        out = out.iter().flat_map(|&p| (0..sys.n_children()).map(move |c| (p, c))).map(|(p, c)| sys.child(k + s, p, c)).collect();
    }
    out
}

/// `√(|I||J|)/|K|` for generations `i`, `j`.
pub fn coefficient_bound(sys: &FiniteDyadicSystem, i: usize, j: usize) -> f64 {
    (sys.n_children() as f64).powf(-((i + j) as f64) / 2.0)
}

/// Cubes `K` whose generations `i` and `j` both carry Haar functions.
pub fn carrying_cubes(sys: &FiniteDyadicSystem, i: usize, j: usize) -> Vec<CubeId> {
    let top = sys.depth() as isize - 1 - i.max(j) as isize;
    (0..=top.max(-1))
        .filter(|&k| k >= 0)
        .flat_map(|k| (0..sys.cubes_at(k as usize)).map(move |index| CubeId { scale: k as usize, index }))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpec {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<CubeId, CMat>,
}

fn check_system(sys: &FiniteDyadicSystem, i: usize, j: usize) -> Result<(), ShiftError> {
    if sys.params().branching() != 1 << sys.dim() {
        return Err(ShiftError::NotBinary);
    }
    if i.max(j) + 1 > sys.depth() {
        return Err(ShiftError::TooShallow { i, j, depth: sys.depth() });
    }
    Ok(())
}

impl ShiftSpec {
    /// Validated spec; cubes without an entry carry zero.
    pub fn new(sys: &FiniteDyadicSystem, i: usize, j: usize, coeffs: BTreeMap<CubeId, CMat>) -> Result<Self, ShiftError> {
        check_system(sys, i, j)?;
        let colors = sys.n_children() - 1;
        let want = (sys.n_children().pow(j as u32) * colors, sys.n_children().pow(i as u32) * colors);
        let bound = coefficient_bound(sys, i, j);
        for (cube, a) in &coeffs {
            if cube.scale + i.max(j) >= sys.depth() || cube.index >= sys.cubes_at(cube.scale) {
                return Err(ShiftError::NotCarrying(cube.scale, cube.index));
            }
            if a.shape() != want {
                return Err(ShiftError::Shape { got: a.shape(), want });
            }
            if let Some(z) = a.iter().find(|z| !(z.norm() <= bound * (1.0 + 1e-12))) {
                return Err(ShiftError::Bound { value: z.norm(), bound });
            }
        }
        Ok(Self { i, j, coeffs })
    }

    pub fn zero(sys: &FiniteDyadicSystem, i: usize, j: usize) -> Result<Self, ShiftError> {
        Self::new(sys, i, j, BTreeMap::new())
    }

    /// Coefficients given by a rule of the relative positions:
    /// `rule(rel_I, ξ, rel_J, η)`.
    pub fn from_rule(sys: &FiniteDyadicSystem, i: usize, j: usize, rule: impl Fn(usize, usize, usize, usize) -> C64) -> Result<Self, ShiftError> {
        check_system(sys, i, j)?;
        let colors = sys.n_children() - 1;
        let (ni, nj) = (sys.n_children().pow(i as u32), sys.n_children().pow(j as u32));
        let a = CMat::from_fn(nj * colors, ni * colors, |r, c| rule(c / colors, c % colors + 1, r / colors, r % colors + 1));
        let coeffs = carrying_cubes(sys, i, j).into_iter().map(|k| (k, a.clone())).collect();
        Self::new(sys, i, j, coeffs)
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.values().map(|a| a.len()).sum()
    }
}

/// Coefficients uniform on the disk of radius `√(|I||J|)/(|K|·(2^dim − 1))`.
/// For dim 1 this is the full entrywise bound. In higher dimension the
/// extra factor keeps every `K` block a Frobenius contraction.
pub fn random_shift(sys: &FiniteDyadicSystem, i: usize, j: usize, seed: u64) -> Result<ShiftSpec, ShiftError> {
    check_system(sys, i, j)?;
    let colors = sys.n_children() - 1;
    let radius = coefficient_bound(sys, i, j) / colors as f64;
    let (ni, nj) = (sys.n_children().pow(i as u32), sys.n_children().pow(j as u32));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = carrying_cubes(sys, i, j)
        .into_iter()
        .map(|k| {
            let a = CMat::from_fn(nj * colors, ni * colors, |_, _| {
                let [x, y]: [f64; 2] = UnitDisc.sample(&mut rng);
                C64::new(x, y) * radius
            });
            (k, a)
        })
        .collect();
    ShiftSpec::new(sys, i, j, coeffs)
}

/// Basis rows and columns touched by the block of `K`: `(J, η)` rows, `(I, ξ)` columns.
pub fn block_support(sys: &FiniteDyadicSystem, spec: &ShiftSpec, k: CubeId) -> (Vec<usize>, Vec<usize>) {
    let idx = |g: usize| -> Vec<usize> {
        descendants(sys, k.scale, k.index, g)
            .into_iter()
            .flat_map(|index| {
                (1..sys.n_children()).map(move |color| HaarIndex { cube: CubeId { scale: k.scale + g, index }, color })
            })
            .map(|h| sys.basis_index(h))
            .collect()
    };
    (idx(spec.j), idx(spec.i))
}

/// Scalar `D × D` matrix of the shift in the basis of `sys`.
pub fn assemble_shift(sys: &FiniteDyadicSystem, spec: &ShiftSpec) -> Result<CMat, ShiftError> {
    let spec = ShiftSpec::new(sys, spec.i, spec.j, spec.coeffs.clone())?;
    let mut out = CMat::zeros(sys.basis_dim(), sys.basis_dim());
    for (k, a) in &spec.coeffs {
        let (rows, cols) = block_support(sys, &spec, *k);
        for (r, &row) in rows.iter().enumerate() {
            for (c, &col) in cols.iter().enumerate() {
                out[(row, col)] += a[(r, c)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dyadic_core::DyadicParams;
    use proptest::prelude::*;
    use spectral::op_norm;

    fn sys(dim: usize, depth: usize) -> FiniteDyadicSystem {
        FiniteDyadicSystem::build(DyadicParams::new(2, depth, dim).unwrap(), None).unwrap()
    }

    #[test]
    fn bound_values() {
        let s = sys(1, 3);
        assert_eq!(coefficient_bound(&s, 1, 1), 0.5);
        assert_eq!(coefficient_bound(&s, 0, 0), 1.0);
        assert_eq!(coefficient_bound(&sys(2, 3), 1, 0), 0.5);
    }

    #[test]
    fn carrying_and_shallow() {
        let s = sys(1, 4);
        assert_eq!(carrying_cubes(&s, 3, 1).len(), 1);
        assert_eq!(carrying_cubes(&s, 0, 0).len(), 15);
        assert_eq!(random_shift(&s, 4, 0, 1).unwrap_err(), ShiftError::TooShallow { i: 4, j: 0, depth: 4 });
        let tri = FiniteDyadicSystem::standard(3, 3).unwrap();
        assert_eq!(random_shift(&tri, 0, 0, 1).unwrap_err(), ShiftError::NotBinary);
    }

    #[test]
    fn deterministic_per_seed() {
        let s = sys(1, 4);
        assert_eq!(random_shift(&s, 1, 2, 9).unwrap(), random_shift(&s, 1, 2, 9).unwrap());
        assert_ne!(random_shift(&s, 1, 2, 9).unwrap(), random_shift(&s, 1, 2, 10).unwrap());
    }

    #[test]
    fn zero_and_single_entry() {
        let s = sys(1, 3);
        assert_eq!(assemble_shift(&s, &ShiftSpec::zero(&s, 1, 0).unwrap()).unwrap(), CMat::zeros(8, 8));
        let mut a = CMat::zeros(1, 2);
        let z = C64::new(0.3, -0.5);
        a[(0, 1)] = z;
        let k = CubeId { scale: 1, index: 1 };
        let spec = ShiftSpec::new(&s, 1, 0, [(k, a)].into()).unwrap();
        let m = assemble_shift(&s, &spec).unwrap();
        assert!((op_norm(&m) - z.norm()).abs() < 1e-14);
        let (rows, cols) = block_support(&s, &spec, k);
        assert_eq!(m[(rows[0], cols[1])], z);
        assert_eq!(m.iter().filter(|x| x.norm() > 0.0).count(), 1);
    }

    #[test]
    fn rejects_oversized_coefficients() {
        let s = sys(1, 3);
        let k = CubeId { scale: 0, index: 0 };
        let a = CMat::from_element(2, 2, C64::new(0.51, 0.0));
        assert!(matches!(ShiftSpec::new(&s, 1, 1, [(k, a)].into()), Err(ShiftError::Bound { .. })));
        let a = CMat::from_element(2, 1, C64::new(0.1, 0.0));
        assert!(matches!(ShiftSpec::new(&s, 1, 1, [(k, a)].into()), Err(ShiftError::Shape { .. })));
        let deep = CubeId { scale: 2, index: 0 };
        assert!(matches!(ShiftSpec::new(&s, 1, 1, [(deep, CMat::zeros(2, 2))].into()), Err(ShiftError::NotCarrying(2, 0))));
    }

    #[test]
    fn haar_multiplier_shift() {
        let s = sys(1, 4);
        let spec = random_shift(&s, 0, 0, 4).unwrap();
        let m = assemble_shift(&s, &spec).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                if r != c {
                    assert_eq!(m[(r, c)], C64::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(m[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn contractive_on_random_shifts() {
        let mut worst = 0.0f64;
        for seed in 0..100u64 {
            let dim = 1 + (seed % 2) as usize;
            let s = sys(dim, if dim == 1 { 5 } else { 3 });
            let (i, j) = ((seed / 2 % 3) as usize, (seed / 6 % 3) as usize);
            let m = assemble_shift(&s, &random_shift(&s, i, j, seed).unwrap()).unwrap();
            worst = worst.max(op_norm(&m));
        }
        assert!(worst <= 1.0 + 1e-10, "{worst}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn constructor_rejects_any_violation(scale in 1.0f64..4.0, r in 0usize..2, c in 0usize..4, i in 0usize..3, j in 0usize..2) {
            let s = sys(1, 4);
            let (i, j) = (i.min(2), j);
            let bound = coefficient_bound(&s, i, j);
            let mut a = CMat::zeros(1 << j, 1 << i);
            let (r, c) = (r % (1 << j), c % (1 << i));
            a[(r, c)] = C64::from_polar(bound * (1.0 + 1e-9) * scale, scale);
            let res = ShiftSpec::new(&s, i, j, [(CubeId { scale: 0, index: 0 }, a.clone())].into());
            let rejected = matches!(res, Err(ShiftError::Bound { .. }));
            prop_assert!(rejected);
            a[(r, c)] = C64::from_polar(bound / scale, scale);
            let accepted = ShiftSpec::new(&s, i, j, [(CubeId { scale: 0, index: 0 }, a)].into()).is_ok();
            prop_assert!(accepted);
        }

        #[test]
        fn sampled_specs_respect_bound(seed in any::<u64>(), dim in 1usize..3, i in 0usize..3, j in 0usize..3) {
            let s = sys(dim, 3);
            let spec = random_shift(&s, i, j, seed).unwrap();
            let bound = coefficient_bound(&s, i, j);
            let within = spec.coeffs.values().all(|a| a.iter().all(|z| z.norm() <= bound));
            let norm = op_norm(&assemble_shift(&s, &spec).unwrap());
            prop_assert!(within);
            prop_assert!(norm <= 1.0 + 1e-10);
        }
    }
}
