//! Uniform grids over a box and kernel cell-average matrices.

use crate::{KernelError, KernelSpec, CMat, C64};
use rayon::prelude::*;

/// Uniform grid of cubic cells; cell coordinates are row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub cell: f64,
    pub per_axis: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, cell: f64, per_axis: Vec<usize>) -> Result<Self, KernelError> {
        if lo.len() != per_axis.len() || lo.is_empty() || !(cell > 0.0) || per_axis.contains(&0) {
            return Err(KernelError::Geometry("grid needs matching positive extents".into()));
        }
        Ok(Self { lo, cell, per_axis })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn n_cells(&self) -> usize {
        self.per_axis.iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.cell.powi(self.dim() as i32)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            out[a] = idx % self.per_axis[a];
            idx /= self.per_axis[a];
        }
        out
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.per_axis).fold(0, |acc, (c, n)| acc * n + c)
    }

    /// Points `lo + (coords + (t + 1/2)/refine)·cell` for `t ∈ {0..refine}^dim`.
    pub fn cell_points(&self, idx: usize, refine: usize) -> Vec<Vec<f64>> {
        let c = self.coords(idx);
        let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
        for (a, &ca) in c.iter().enumerate() {
            let mut next = Vec::with_capacity(pts.len() * refine);
            for p in &pts {
                for t in 0..refine {
                    let mut q = p.clone();
                    q.push(self.lo[a] + (ca as f64 + (t as f64 + 0.5) / refine as f64) * self.cell);
                    next.push(q);
                }
            }
            pts = next;
        }
        pts
    }

    pub fn center(&self, idx: usize) -> Vec<f64> {
        self.cell_points(idx, 1).pop().expect("one point")
    }

    /// `‖v‖_{L_2}` for cell values `v`.
    pub fn l2(&self, v: &[C64]) -> f64 {
        (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.volume()).sqrt()
    }

    pub fn integral(&self, v: &[C64]) -> C64 {
        v.iter().sum::<C64>() * self.volume()
    }
}

/// Cube of `side^dim` cells starting at cell coordinates `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCube {
    pub start: Vec<usize>,
    pub side: usize,
}

impl CellCube {
    pub fn fits(&self, grid: &Grid) -> bool {
        self.side > 0 && self.start.len() == grid.dim() && self.start.iter().zip(&grid.per_axis).all(|(s, n)| s + self.side <= *n)
    }

    pub fn cells(&self, grid: &Grid) -> Vec<usize> {
        (0..self.side.pow(grid.dim() as u32))
            .map(|t| {
                let mut coords = vec![0; grid.dim()];
                let mut rest = t;
                for a in (0..grid.dim()).rev() {
                    coords[a] = self.start[a] + rest % self.side;
                    rest /= self.side;
                }
                grid.index(&coords)
            })
            .collect()
    }

    pub fn center(&self, grid: &Grid) -> Vec<f64> {
        self.start.iter().zip(&grid.lo).map(|(&s, lo)| lo + (s as f64 + self.side as f64 / 2.0) * grid.cell).collect()
    }

    pub fn side_length(&self, grid: &Grid) -> f64 {
        self.side as f64 * grid.cell
    }

    pub fn disjoint(&self, other: &CellCube) -> bool {
        self.start.iter().zip(&other.start).any(|(a, b)| a + self.side <= *b || b + other.side <= *a)
    }
}

/// Kernel cell averages `avg[a][b] ≈ ⨍_a ⨍_b K(x, y)`, zero on the diagonal.
#[derive(Debug, Clone)]
pub struct GridOperator {
    pub grid: Grid,
    pub avg: CMat,
}

impl GridOperator {
    /// Matrix on the orthonormal cell basis `1_a/|a|^{1/2}`.
    pub fn matrix(&self) -> CMat {
        &self.avg * C64::new(self.grid.volume(), 0.0)
    }

    /// `T f` on cell values.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let v = &self.avg * nalgebra::DVector::from_column_slice(f) * C64::new(self.grid.volume(), 0.0);
        v.iter().copied().collect()
    }

    /// `T^* g` on cell values.
    pub fn adjoint_apply(&self, g: &[C64]) -> Vec<C64> {
        let v = self.avg.adjoint() * nalgebra::DVector::from_column_slice(g) * C64::new(self.grid.volume(), 0.0);
        v.iter().copied().collect()
    }

    /// `[T, M_b]` on the orthonormal cell basis.
    pub fn commutator(&self, b: &[C64]) -> CMat {
        let m = self.matrix();
        CMat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * (b[c] - b[r]))
    }
}

/// Midpoint rule with `refine^dim` points per cell.
pub fn discretize(k: &KernelSpec, grid: &Grid, refine: usize) -> Result<GridOperator, KernelError> {
    if grid.dim() != k.dim || refine == 0 {
        return Err(KernelError::Geometry(format!("grid dimension {} vs kernel dimension {}", grid.dim(), k.dim)));
    }
    let n = grid.n_cells();
    let points: Vec<Vec<Vec<f64>>> = (0..n).map(|a| grid.cell_points(a, refine)).collect();
    let weight = 1.0 / (points[0].len() * points[0].len()) as f64;
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        return C64::new(0.0, 0.0);
                    }
                    points[a].iter().flat_map(|x| points[b].iter().map(move |y| k.evaluate(x, y))).sum::<C64>() * weight
                })
                .collect()
        })
        .collect();
    Ok(GridOperator { grid: grid.clone(), avg: CMat::from_fn(n, n, |a, b| rows[a][b]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(u: f64) -> f64 {
        if u == 0.0 {
            0.0
        } else {
            u * u.abs().ln() - u
        }
    }

    /// `⨍_{[a,a+h]} ⨍_{[b,b+h]} 1/(x − y)` in closed form.
    fn hilbert_average(a: f64, b: f64, h: f64) -> f64 {
        (phi(a - b + h) + phi(a - b - h) - 2.0 * phi(a - b)) / (h * h)
    }

    #[test]
    fn hilbert_matrix_is_antisymmetric() {
        let grid = Grid::new(vec![0.0], 0.25, vec![4]).unwrap();
        let t = discretize(&KernelSpec::hilbert(), &grid, 3).unwrap();
        assert!(spectral::max_abs(&(t.avg.transpose() + &t.avg)) < 1e-12);
        assert_eq!(t.avg[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn refinement_converges_monotonically() {
        let grid = Grid::new(vec![0.0], 0.25, vec![8]).unwrap();
        let k = KernelSpec::hilbert();
        for (a, b) in [(0usize, 2usize), (5, 1), (7, 0)] {
            let exact = hilbert_average(a as f64 * 0.25, b as f64 * 0.25, 0.25);
            let errs: Vec<f64> = [1, 2, 4, 8].iter().map(|&r| (discretize(&k, &grid, r).unwrap().avg[(a, b)].re - exact).abs()).collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        }
    }

    #[test]
    fn zero_kernel_zero_matrix() {
        let grid = Grid::new(vec![0.0, 0.0], 0.5, vec![2, 3]).unwrap();
        let t = discretize(&KernelSpec::zero(2), &grid, 2).unwrap();
        assert_eq!(t.avg, CMat::zeros(6, 6));
    }

    #[test]
    fn riesz_matrix_is_antisymmetric_in_two_dimensions() {
        let grid = Grid::new(vec![0.0, 0.0], 0.25, vec![3, 3]).unwrap();
        let t = discretize(&KernelSpec::riesz(2, 0).unwrap(), &grid, 2).unwrap();
        assert!(spectral::max_abs(&(t.avg.transpose() + &t.avg)) < 1e-12);
        assert!(discretize(&KernelSpec::hilbert(), &grid, 2).is_err());
    }

    #[test]
    fn apply_and_adjoint_are_dual() {
        let grid = Grid::new(vec![0.0, 0.0], 0.25, vec![3, 2]).unwrap();
        let t = discretize(&KernelSpec::beurling(), &grid, 2).unwrap();
        let f: Vec<C64> = (0..6).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let g: Vec<C64> = (0..6).map(|i| C64::new(0.5 * i as f64, (i * i) as f64)).collect();
        let lhs: C64 = g.iter().zip(t.apply(&f)).map(|(a, b)| a.conj() * b).sum();
        let rhs: C64 = t.adjoint_apply(&g).iter().zip(&f).map(|(a, b)| a.conj() * b).sum();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
        assert_eq!(grid.coords(grid.index(&[2, 1])), vec![2, 1]);
        let cube = CellCube { start: vec![1, 0], side: 2 };
        assert!(cube.fits(&grid));
        assert_eq!(cube.cells(&grid), vec![2, 3, 4, 5]);
    }
}
