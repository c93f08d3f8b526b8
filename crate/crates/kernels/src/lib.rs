//! Singular integral kernels and their finite models on uniform grids.

mod factor;
mod grid;
mod probe;
mod testing;

pub use factor::{partner_cube, weak_factorization, Factorization};
pub use grid::{discretize, CellCube, Grid, GridOperator};
pub use probe::{nondegenerate_probe, ProbeReport};
pub use testing::{besov_testing, dyadic_cubes, nwo_ratio, random_families, random_operator, DyadicCube, NwoReport, TestingReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;

pub type KernelFn = Arc<dyn Fn(&[f64], &[f64]) -> C64 + Send + Sync>;
pub type AngularFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("invalid kernel constants: {0}")]
    Constants(String),
    #[error("sample {0} violates |x − y| > 2|x − x'| > 0")]
    Sample(usize),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("probe found no point with |K| ≥ 1/(c0 ρ^n); best scaled value {best}")]
    ProbeFailed { best: f64 },
    #[error("T*(g) vanishes on the source cube (min |T*(g)| = {0}); increase A")]
    AdjointVanishes(f64),
    #[error("input must be supported in Q with zero mean: {0}")]
    Input(String),
    #[error(transparent)]
    Median(#[from] median::MedianError),
}

#[derive(Clone)]
pub enum Nondegeneracy {
    /// Far points with `|K(y, x)| ≥ 1/(c0 ρ^n)` exist at every radius `ρ`.
    Pointwise { c0: f64 },
    /// `K(x, y) = Ω(x − y)/|x − y|^n` with `Ω(θ0) ≠ 0` at a Lebesgue point.
    Homogeneous { omega: AngularFn, theta0: Vec<f64> },
}

#[derive(Clone)]
pub struct KernelSpec {
    pub name: String,
    pub dim: usize,
    /// Constant `C` of the size and smoothness estimates.
    pub c: f64,
    pub alpha: f64,
    pub nondegeneracy: Nondegeneracy,
    eval: KernelFn,
}

impl std::fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelSpec").field("name", &self.name).field("dim", &self.dim).field("c", &self.c).field("alpha", &self.alpha).finish()
    }
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl KernelSpec {
    pub fn new(name: &str, dim: usize, c: f64, alpha: f64, nondegeneracy: Nondegeneracy, eval: KernelFn) -> Result<Self, KernelError> {
        if dim == 0 {
            return Err(KernelError::Constants("dimension must be positive".into()));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(KernelError::Constants(format!("C = {c} must be positive")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(KernelError::Constants(format!("α = {alpha} must lie in (0, 1]")));
        }
        match &nondegeneracy {
            Nondegeneracy::Pointwise { c0 } if !(*c0 > 0.0) => return Err(KernelError::Constants(format!("c0 = {c0} must be positive"))),
            Nondegeneracy::Homogeneous { theta0, .. } if theta0.len() != dim || (distance(theta0, &vec![0.0; dim]) - 1.0).abs() > 1e-12 => {
                return Err(KernelError::Constants("θ0 must be a unit vector of the kernel dimension".into()))
            }
            _ => {}
        }
        Ok(Self { name: name.into(), dim, c, alpha, nondegeneracy, eval })
    }

    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> C64 {
        (self.eval)(x, y)
    }

    /// `1/(x − y)` on the line. The smoothness estimate needs `C = 4`
    /// (each difference is at most `2|x − x'|/|x − y|²`); the size estimate is tight at `C = 1`.
    pub fn hilbert() -> Self {
        let omega: AngularFn = Arc::new(|t: &[f64]| C64::new(t[0].signum(), 0.0));
        Self::new("hilbert", 1, 4.0, 1.0, Nondegeneracy::Homogeneous { omega, theta0: vec![1.0] }, Arc::new(|x: &[f64], y: &[f64]| C64::new(1.0 / (x[0] - y[0]), 0.0)))
            .expect("valid constants")
    }

    /// `(x_j − y_j)/|x − y|^{n+1}`.
    pub fn riesz(dim: usize, j: usize) -> Result<Self, KernelError> {
        if j >= dim {
            return Err(KernelError::Constants(format!("component {j} outside dimension {dim}")));
        }
        let n = dim as i32;
        let c = 2.0 * (dim as f64 + 2.0) * 2f64.powi(n + 1);
        let omega: AngularFn = Arc::new(move |t: &[f64]| C64::new(t[j] / distance(t, &vec![0.0; t.len()]), 0.0));
        let mut theta0 = vec![0.0; dim];
        theta0[j] = 1.0;
        Self::new(
            &format!("riesz{j}"),
            dim,
            c,
            1.0,
            Nondegeneracy::Homogeneous { omega, theta0 },
            Arc::new(move |x: &[f64], y: &[f64]| C64::new((x[j] - y[j]) / distance(x, y).powi(n + 1), 0.0)),
        )
    }

    /// `1/(z − w)²` in the plane, complex valued.
    pub fn beurling() -> Self {
        let omega: AngularFn = Arc::new(|t: &[f64]| {
            let z = C64::new(t[0], t[1]);
            (z.conj() / z.norm()).powi(2)
        });
        Self::new(
            "beurling",
            2,
            32.0,
            1.0,
            Nondegeneracy::Homogeneous { omega, theta0: vec![1.0, 0.0] },
            Arc::new(|x: &[f64], y: &[f64]| C64::new(x[0] - y[0], x[1] - y[1]).powi(-2)),
        )
        .expect("valid constants")
    }

    pub fn zero(dim: usize) -> Self {
        Self::new("zero", dim, 1.0, 1.0, Nondegeneracy::Pointwise { c0: 1.0 }, Arc::new(|_: &[f64], _: &[f64]| C64::new(0.0, 0.0)))
            .expect("valid constants")
    }

    pub fn by_name(name: &str, dim: usize) -> Result<Self, KernelError> {
        match (name, dim) {
            ("hilbert", 1) => Ok(Self::hilbert()),
            ("beurling", 2) => Ok(Self::beurling()),
            ("zero", _) => Ok(Self::zero(dim)),
            _ => match name.strip_prefix("riesz").and_then(|j| j.parse().ok()) {
                Some(j) => Self::riesz(dim, j),
                None => Err(KernelError::Constants(format!("unknown kernel {name} in dimension {dim}"))),
            },
        }
    }
}

/// A triple `(x, x', y)` for the standard estimates.
pub type Sample = (Vec<f64>, Vec<f64>, Vec<f64>);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    Size,
    Smoothness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardReport {
    /// `max |K|·|x − y|^n / C` over both orientations.
    pub size_ratio: f64,
    /// `max (|K(x,y) − K(x',y)| + |K(y,x) − K(y,x')|)·|x − y|^{n+α} / (C|x − x'|^α)`.
    pub smooth_ratio: f64,
    pub violations: Vec<(usize, Estimate, f64)>,
    pub samples: usize,
}

impl StandardReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn standard_check(k: &KernelSpec, samples: &[Sample]) -> Result<StandardReport, KernelError> {
    let n = k.dim as i32;
    let mut report = StandardReport { size_ratio: 0.0, smooth_ratio: 0.0, violations: Vec::new(), samples: samples.len() };
    for (idx, (x, xp, y)) in samples.iter().enumerate() {
        let (r, h) = (distance(x, y), distance(x, xp));
        if !(h > 0.0 && r > 2.0 * h) || x.len() != k.dim || xp.len() != k.dim || y.len() != k.dim {
            return Err(KernelError::Sample(idx));
        }
        let size = k.evaluate(x, y).norm().max(k.evaluate(y, x).norm()) * r.powi(n) / k.c;
        let diff = (k.evaluate(x, y) - k.evaluate(xp, y)).norm() + (k.evaluate(y, x) - k.evaluate(y, xp)).norm();
        let smooth = diff * r.powf(k.dim as f64 + k.alpha) / (k.c * h.powf(k.alpha));
        for (kind, ratio) in [(Estimate::Size, size), (Estimate::Smoothness, smooth)] {
            if ratio > 1.0 + 1e-12 {
                report.violations.push((idx, kind, ratio));
            }
        }
        report.size_ratio = report.size_ratio.max(size);
        report.smooth_ratio = report.smooth_ratio.max(smooth);
    }
    Ok(report)
}

/// Admissible triples with `|x − y|` log-uniform in `[1e-3, 1e3]` and `|x − x'|/|x − y| ∈ (0, 1/2)`.
pub fn random_samples(dim: usize, count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction = |rng: &mut ChaCha8Rng| loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let len = distance(&v, &vec![0.0; dim]);
        if len > 1e-3 && len <= 1.0 {
            return v.into_iter().map(|c| c / len).collect::<Vec<f64>>();
        }
    };
    (0..count)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
            let r = 10f64.powf(rng.random_range(-3.0..3.0));
            let h = r * rng.random_range(1e-6..0.4999);
            let (u, v) = (direction(&mut rng), direction(&mut rng));
            let y = x.iter().zip(&u).map(|(a, b)| a + r * b).collect();
            let xp = x.iter().zip(&v).map(|(a, b)| a + h * b).collect();
            (x, xp, y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_size_bound_is_tight() {
        let mut k = KernelSpec::hilbert();
        k.c = 1.0;
        let r = standard_check(&k, &random_samples(1, 500, 1)).unwrap();
        assert!((r.size_ratio - 1.0).abs() < 1e-12);
        assert!(r.violations.iter().all(|v| v.1 == Estimate::Smoothness));
        assert!(!r.passed());
    }

    #[test]
    fn hilbert_differences_bounded_by_two() {
        for (x, xp, y) in random_samples(1, 2000, 2) {
            let (x, xp, y) = (x[0], xp[0], y[0]);
            let lhs = (1.0 / (x - y) - 1.0 / (xp - y)).abs();
            assert!(lhs <= 2.0 * (x - xp).abs() / (x - y).powi(2) * (1.0 + 1e-12));
        }
        let r = standard_check(&KernelSpec::hilbert(), &random_samples(1, 2000, 3)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn declared_constants_hold() {
        for k in [KernelSpec::beurling(), KernelSpec::riesz(2, 0).unwrap(), KernelSpec::riesz(2, 1).unwrap(), KernelSpec::riesz(3, 2).unwrap()] {
            let r = standard_check(&k, &random_samples(k.dim, 2000, 4)).unwrap();
            assert!(r.passed(), "{} {r:?}", k.name);
            assert!(r.size_ratio > 0.0);
        }
    }

    #[test]
    fn zero_kernel_passes_vacuously() {
        let r = standard_check(&KernelSpec::zero(2), &random_samples(2, 50, 5)).unwrap();
        assert_eq!((r.size_ratio, r.smooth_ratio, r.passed()), (0.0, 0.0, true));
    }

    #[test]
    fn rejects_bad_input() {
        let bad = vec![(vec![0.0], vec![0.4], vec![0.5])];
        assert_eq!(standard_check(&KernelSpec::hilbert(), &bad), Err(KernelError::Sample(0)));
        let eval: KernelFn = Arc::new(|_: &[f64], _: &[f64]| C64::new(0.0, 0.0));
        assert!(KernelSpec::new("k", 1, 1.0, 1.5, Nondegeneracy::Pointwise { c0: 1.0 }, eval.clone()).is_err());
        assert!(KernelSpec::new("k", 1, -1.0, 1.0, Nondegeneracy::Pointwise { c0: 1.0 }, eval).is_err());
        assert!(KernelSpec::by_name("riesz3", 2).is_err());
        assert_eq!(KernelSpec::by_name("riesz1", 2).unwrap().name, "riesz1");
    }
}
