use crate::step::block_lp_pow;
use crate::{zero_block, CMat, DyadicError, FiniteDyadicSystem, HaarIndex, StepFunction, C64};

/// Haar coefficients of a step function: `coeffs[0]` is the coarse mean
/// `⟨1, b⟩`, `coeffs[β]` the coefficient of basis element `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub m: usize,
    pub coeffs: Vec<CMat>,
}

impl Symbol {
    pub fn zeros(sys: &FiniteDyadicSystem, m: usize) -> Self {
        Self { m, coeffs: vec![zero_block(m); sys.basis_dim()] }
    }

    /// Scalar symbol from coefficient values in basis order.
    pub fn scalar(values: &[C64]) -> Self {
        Self { m: 1, coeffs: values.iter().map(|&z| CMat::from_element(1, 1, z)).collect() }
    }

    pub fn single(sys: &FiniteDyadicSystem, h: HaarIndex, block: CMat) -> Self {
        let mut s = Self::zeros(sys, block.nrows());
        s.coeffs[sys.basis_index(h)] = block;
        s
    }

    pub fn coarse(&self) -> &CMat {
        &self.coeffs[0]
    }

    pub fn coeff(&self, sys: &FiniteDyadicSystem, h: HaarIndex) -> &CMat {
        &self.coeffs[sys.basis_index(h)]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.m == 1
    }

    /// Same coefficients with the coarse mean removed.
    pub fn mean_zero(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = zero_block(self.m);
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: self.m, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { m: self.m, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Coefficients of the pointwise adjoint function `b*`.
    pub fn adjoint_function(&self, sys: &FiniteDyadicSystem) -> Self {
        let mut out = Self::zeros(sys, self.m);
        out.coeffs[0] = self.coeffs[0].adjoint();
        for h in sys.haar_indices() {
            let conj = HaarIndex { color: sys.color_conj(h.color), ..h };
            out.coeffs[sys.basis_index(h)] = self.coeffs[sys.basis_index(conj)].adjoint();
        }
        out
    }

    /// `Σ_β ‖b_β‖_HS^2` including the coarse mean.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_squared()).sum()
    }

    /// `‖b_β‖_{L_p(M_m)}^p` under the normalized trace.
    pub fn block_lp_pow(&self, beta: usize, p: f64) -> f64 {
        block_lp_pow(&self.coeffs[beta], p)
    }
}

fn check_len(sys: &FiniteDyadicSystem, f: &StepFunction) -> Result<(), DyadicError> {
    if f.len() != sys.n_cells() {
        return Err(DyadicError::Shape(format!("{} values for {} cells", f.len(), sys.n_cells())));
    }
    Ok(())
}

pub fn haar_function(sys: &FiniteDyadicSystem, h: HaarIndex) -> Result<StepFunction, DyadicError> {
    sys.check_haar(h)?;
    let k = h.cube.scale;
    let amp = sys.measure(k).powf(-0.5);
    let mut vals = vec![C64::new(0.0, 0.0); sys.n_cells()];
    for c in 0..sys.n_children() {
        let child = sys.child(k, h.cube.index, c);
        for cell in sys.cube_cells(k + 1, child) {
            vals[cell] = sys.phase(h.color, c) * amp;
        }
    }
    Ok(StepFunction::scalar(&vals))
}

/// Cube averages at every scale, `avgs[k][index]`.
fn cube_averages(sys: &FiniteDyadicSystem, f: &StepFunction) -> Vec<Vec<CMat>> {
    let n = sys.depth();
    let mut avgs = vec![Vec::new(); n + 1];
    avgs[n] = f.values.clone();
    let w = C64::new(1.0 / sys.n_children() as f64, 0.0);
    for k in (0..n).rev() {
        avgs[k] = (0..sys.cubes_at(k))
            .map(|i| {
                let s = (0..sys.n_children()).fold(zero_block(f.m), |acc, c| acc + &avgs[k + 1][sys.child(k, i, c)]);
                s * w
            })
            .collect();
    }
    avgs
}

/// `E_k f`: averages over scale-`k` cubes, broadcast to cells.
pub fn expectation(sys: &FiniteDyadicSystem, f: &StepFunction, k: usize) -> Result<StepFunction, DyadicError> {
    check_len(sys, f)?;
    if k > sys.depth() {
        return Err(DyadicError::Scale(k));
    }
    let mut out = StepFunction::zeros(sys.n_cells(), f.m);
    let w = C64::new(1.0 / sys.cube_cells(k, 0).len() as f64, 0.0);
    for i in 0..sys.cubes_at(k) {
        let cells = sys.cube_cells(k, i);
        let avg = cells.iter().fold(zero_block(f.m), |acc, &c| acc + &f.values[c]) * w;
        for c in cells {
            out.values[c] = avg.clone();
        }
    }
    Ok(out)
}

/// `d_k f = E_k f − E_{k−1} f` for `1 ≤ k ≤ N`.
pub fn martingale_difference(sys: &FiniteDyadicSystem, f: &StepFunction, k: usize) -> Result<StepFunction, DyadicError> {
    if k == 0 || k > sys.depth() {
        return Err(DyadicError::Scale(k));
    }
    Ok(expectation(sys, f, k)?.sub(&expectation(sys, f, k - 1)?))
}

pub fn haar_transform(sys: &FiniteDyadicSystem, f: &StepFunction) -> Result<Symbol, DyadicError> {
    check_len(sys, f)?;
    let avgs = cube_averages(sys, f);
    let mut out = Symbol::zeros(sys, f.m);
    out.coeffs[0] = avgs[0][0].clone();
    let nc = sys.n_children();
    for k in 0..sys.depth() {
        let scale = C64::new(sys.measure(k).sqrt() / nc as f64, 0.0);
        for i in 0..sys.cubes_at(k) {
            for color in 1..nc {
                let mut acc = zero_block(f.m);
                for c in 0..nc {
                    acc += &avgs[k + 1][sys.child(k, i, c)] * sys.phase(color, c).conj();
                }
                let h = HaarIndex { cube: crate::CubeId { scale: k, index: i }, color };
                out.coeffs[sys.basis_index(h)] = acc * scale;
            }
        }
    }
    Ok(out)
}

pub fn haar_synthesize(sys: &FiniteDyadicSystem, b: &Symbol) -> Result<StepFunction, DyadicError> {
    if b.len() != sys.basis_dim() {
        return Err(DyadicError::Shape(format!("{} coefficients for basis of {}", b.len(), sys.basis_dim())));
    }
    let nc = sys.n_children();
    let mut level = vec![b.coeffs[0].clone()];
    for k in 0..sys.depth() {
        let amp = C64::new(sys.measure(k).powf(-0.5), 0.0);
        let mut next = vec![zero_block(b.m); sys.cubes_at(k + 1)];
        for (i, avg) in level.iter().enumerate() {
            let base = sys.basis_index(HaarIndex { cube: crate::CubeId { scale: k, index: i }, color: 1 });
            for c in 0..nc {
                let mut v = avg.clone();
                for color in 1..nc {
                    v += &b.coeffs[base + color - 1] * (sys.phase(color, c) * amp);
                }
                next[sys.child(k, i, c)] = v;
            }
        }
        level = next;
    }
    StepFunction::new(b.m, level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CubeId, DyadicParams, GridShift};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn random_step(rng: &mut ChaCha8Rng, cells: usize, m: usize) -> StepFunction {
        let vals = (0..cells)
            .map(|_| CMat::from_fn(m, m, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        StepFunction::new(m, vals).unwrap()
    }

    fn systems() -> Vec<FiniteDyadicSystem> {
        let mut v = Vec::new();
        for (d, n, dim) in [(2, 3, 1), (3, 2, 1), (5, 2, 1), (2, 2, 2)] {
            v.push(FiniteDyadicSystem::build(DyadicParams::new(d, n, dim).unwrap(), None).unwrap());
        }
        let p = DyadicParams::new(2, 3, 1).unwrap();
        v.push(FiniteDyadicSystem::build(p, Some(GridShift::new(vec![1, 0, 1]))).unwrap());
        let p = DyadicParams::new(2, 2, 2).unwrap();
        v.push(FiniteDyadicSystem::build(p, Some(GridShift::new(vec![3, 2]))).unwrap());
        v
    }

    fn root(color: usize) -> HaarIndex {
        HaarIndex { cube: CubeId { scale: 0, index: 0 }, color }
    }

    #[test]
    fn binary_root_haar() {
        let s = FiniteDyadicSystem::standard(2, 1).unwrap();
        assert_eq!(haar_function(&s, root(1)).unwrap().scalar_values(), vec![c(-1.0), c(1.0)]);
    }

    #[test]
    fn triadic_root_haar() {
        let s = FiniteDyadicSystem::standard(3, 1).unwrap();
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let got = haar_function(&s, root(1)).unwrap().scalar_values();
        for (g, e) in got.iter().zip([w, w * w, c(1.0)]) {
            assert!((g - e).norm() < 1e-15);
        }
    }

    #[test]
    fn haar_rejects_bad_color() {
        let s = FiniteDyadicSystem::standard(3, 1).unwrap();
        assert_eq!(haar_function(&s, root(3)).unwrap_err(), DyadicError::Color(3));
        assert!(haar_function(&s, root(0)).is_err());
    }

    #[test]
    fn orthonormal_basis() {
        for s in systems() {
            let fs: Vec<Vec<C64>> = (0..s.basis_dim())
                .map(|b| match s.basis_haar(b) {
                    None => vec![c(1.0); s.n_cells()],
                    Some(h) => haar_function(&s, h).unwrap().scalar_values(),
                })
                .collect();
            let w = s.cell_measure();
            for (a, fa) in fs.iter().enumerate() {
                for (b, fb) in fs.iter().enumerate() {
                    let ip: C64 = fa.iter().zip(fb).map(|(x, y)| x.conj() * y).sum::<C64>() * w;
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - c(want)).norm() < 1e-12, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn product_rule() {
        for d in [2usize, 3, 5] {
            let s = FiniteDyadicSystem::standard(d, 2).unwrap();
            for idx in 0..s.cubes_at(1) {
                let cube = CubeId { scale: 1, index: idx };
                let amp = s.measure(1).powf(-0.5);
                let indicator: Vec<C64> = {
                    let mut v = vec![c(0.0); s.n_cells()];
                    for cell in s.cube_cells(1, idx) {
                        v[cell] = c(amp);
                    }
                    v
                };
                for i in 1..d {
                    for j in 1..d {
                        let hi = haar_function(&s, HaarIndex { cube, color: i }).unwrap();
                        let hj = haar_function(&s, HaarIndex { cube, color: j }).unwrap();
                        let r = (i + j - 1) % d + 1;
                        let hr = if r == d {
                            StepFunction::scalar(&indicator)
                        } else {
                            haar_function(&s, HaarIndex { cube, color: r }).unwrap()
                        };
                        let diff = hi.mul(&hj).max_abs_diff(&hr.scale(c(amp)));
                        assert!(diff < 1e-12 * amp * amp, "d={d} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn expectation_examples() {
        let s = FiniteDyadicSystem::standard(2, 2).unwrap();
        let f = StepFunction::real(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(expectation(&s, &f, 1).unwrap(), StepFunction::real(&[1.5, 1.5, 3.5, 3.5]));
        let k = StepFunction::real(&[2.0; 4]);
        assert_eq!(expectation(&s, &k, 0).unwrap(), k);
        let h = haar_function(&s, HaarIndex { cube: CubeId { scale: 1, index: 1 }, color: 1 }).unwrap();
        assert!(expectation(&s, &h, 1).unwrap().max_abs() < 1e-15);
        assert!(expectation(&s, &f, 3).is_err());
        assert!(martingale_difference(&s, &f, 0).is_err());
    }

    #[test]
    fn transform_of_basis_elements() {
        for s in systems() {
            let one = StepFunction::real(&vec![1.0; s.n_cells()]);
            let t = haar_transform(&s, &one).unwrap();
            assert!((t.coeffs[0][(0, 0)] - c(1.0)).norm() < 1e-14);
            assert!(t.coeffs[1..].iter().all(|x| x.norm() < 1e-14));
            for h in s.haar_indices() {
                let t = haar_transform(&s, &haar_function(&s, h).unwrap()).unwrap();
                for (b, x) in t.coeffs.iter().enumerate() {
                    let want = if b == s.basis_index(h) { 1.0 } else { 0.0 };
                    assert!((x[(0, 0)] - c(want)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn differences_of_haar_function() {
        let s = FiniteDyadicSystem::standard(3, 3).unwrap();
        let h = HaarIndex { cube: CubeId { scale: 1, index: 2 }, color: 2 };
        let f = haar_function(&s, h).unwrap();
        for k in 1..=3 {
            let dk = martingale_difference(&s, &f, k).unwrap();
            let want = if k == 2 { f.clone() } else { StepFunction::zeros(s.n_cells(), 1) };
            assert!(dk.max_abs_diff(&want) < 1e-13);
        }
    }

    #[test]
    fn shifted_nesting_exhaustive() {
        for dim in [1usize, 2] {
            let n = if dim == 1 { 4 } else { 2 };
            let p = DyadicParams::new(2, n, dim).unwrap();
            for code in 0..(1u64 << (n * dim)) {
                let s = FiniteDyadicSystem::build(p, Some(GridShift::from_code(code, n, dim))).unwrap();
                for k in 0..n {
                    for i in 0..s.cubes_at(k) {
                        let mut parent = s.cube_cells(k, i);
                        let mut kids: Vec<usize> =
                            (0..s.n_children()).flat_map(|c| s.cube_cells(k + 1, s.child(k, i, c))).collect();
                        parent.sort();
                        let len = kids.len();
                        kids.sort();
                        kids.dedup();
                        assert_eq!(kids.len(), len);
                        assert_eq!(parent, kids);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn roundtrip_parseval_and_telescoping(seed in any::<u64>(), which in 0usize..6, m in 1usize..3) {
            let s = systems().swap_remove(which);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_step(&mut rng, s.n_cells(), m);
            let b = haar_transform(&s, &f).unwrap();
            let back = haar_synthesize(&s, &b).unwrap();
            prop_assert!(back.max_abs_diff(&f) < 1e-12);
            prop_assert!((b.l2_norm_sq() - f.l2_norm_sq()).abs() < 1e-12 * f.l2_norm_sq().max(1.0));
            let mut sum = expectation(&s, &f, 0).unwrap();
            for k in 1..=s.depth() {
                sum = sum.add(&martingale_difference(&s, &f, k).unwrap());
            }
            prop_assert!(sum.max_abs_diff(&f) < 1e-12);
        }

        #[test]
        fn filtration_laws(seed in any::<u64>(), which in 0usize..6) {
            let s = systems().swap_remove(which);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_step(&mut rng, s.n_cells(), 1);
            let n = s.depth();
            for k in 0..=n {
                let ek = expectation(&s, &f, k).unwrap();
                prop_assert!(expectation(&s, &ek, k).unwrap().max_abs_diff(&ek) < 1e-13);
                for j in 0..=n {
                    let ej = expectation(&s, &ek, j).unwrap();
                    prop_assert!(ej.max_abs_diff(&expectation(&s, &f, k.min(j)).unwrap()) < 1e-13);
                }
            }
            for k in 1..=n {
                let dk = martingale_difference(&s, &f, k).unwrap();
                for j in 1..=n {
                    let djk = martingale_difference(&s, &dk, j).unwrap();
                    let want = if j == k { dk.clone() } else { StepFunction::zeros(s.n_cells(), 1) };
                    prop_assert!(djk.max_abs_diff(&want) < 1e-13);
                }
            }
        }
    }
}
