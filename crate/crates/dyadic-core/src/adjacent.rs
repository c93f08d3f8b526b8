use crate::DyadicError;

/// Axis-aligned cube `∏ [lo_a, lo_a + side)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub side: f64,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, side: f64) -> Self {
        Self { lo, side }
    }

    pub fn contains_box(&self, other: &AxisBox, tol: f64) -> bool {
        self.lo.iter().zip(&other.lo).all(|(&a, &b)| a <= b + tol && b + other.side <= a + self.side + tol)
    }
}

/// Cube `2^{-scale}([0,1)^dim + index + offset(grid))` of one grid of the family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridCube {
    pub grid: usize,
    pub scale: i32,
    pub index: Vec<i64>,
}

/// One-third-shifted dyadic grids: grid `g` shifts axis `a` by
/// `(−1)^k/3` cube lengths at scale `k` when bit `a` of `g` is set.
/// Each grid is nested, and every cube is covered by some grid cube of
/// comparable size.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacentFamily {
    dim: usize,
}

const TOL: f64 = 1e-12;

impl AdjacentFamily {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_grids(&self) -> usize {
        1 << self.dim
    }

    /// `c_n`: every box `B` gets a cover `Q ⊇ B` with `ℓ(Q) ≤ c_n ℓ(B)`.
    pub fn dilation(&self) -> f64 {
        6.0 * (self.dim as f64).sqrt()
    }

    fn offset(&self, grid: usize, axis: usize, scale: i32) -> f64 {
        if (grid >> axis) & 1 == 0 {
            0.0
        } else if scale.rem_euclid(2) == 0 {
            1.0 / 3.0
        } else {
            -1.0 / 3.0
        }
    }

    pub fn cube_box(&self, q: &GridCube) -> AxisBox {
        let len = 2f64.powi(-q.scale);
        let lo = (0..self.dim).map(|a| len * (q.index[a] as f64 + self.offset(q.grid, a, q.scale))).collect();
        AxisBox { lo, side: len }
    }

    /// Cube of `grid` at `scale` containing the point.
    pub fn locate(&self, grid: usize, scale: i32, x: &[f64]) -> GridCube {
        let len = 2f64.powi(-scale);
        let index = (0..self.dim).map(|a| (x[a] / len - self.offset(grid, a, scale)).floor() as i64).collect();
        GridCube { grid, scale, index }
    }

    /// Smallest cube of one grid containing `b`, searching upward from `b`'s size.
    pub fn smallest_in_grid(&self, grid: usize, b: &AxisBox) -> Option<GridCube> {
        let mut scale = (-b.side.log2()).floor() as i32 + 1;
        while 2f64.powi(-scale) <= 64.0 * b.side {
            if 2f64.powi(-scale) >= b.side * (1.0 - TOL) {
                let q = self.locate(grid, scale, &b.lo);
                if self.cube_box(&q).contains_box(b, TOL) {
                    return Some(q);
                }
            }
            scale -= 1;
        }
        None
    }

    /// Cover of `b` by the first grid, in family order, whose smallest
    /// containing cube has side at most `c_n ℓ(b)`.
    pub fn cover_cube(&self, b: &AxisBox) -> Result<GridCube, DyadicError> {
        if b.lo.len() != self.dim {
            return Err(DyadicError::Shape(format!("box of dim {} in family of dim {}", b.lo.len(), self.dim)));
        }
        if !(b.side > 0.0) || b.lo.iter().any(|&x| x < 0.0 || x + b.side > 1.0 + TOL) {
            return Err(DyadicError::OutsideWindow);
        }
        (0..self.n_grids())
            .filter_map(|g| self.smallest_in_grid(g, b))
            .find(|q| 2f64.powi(-q.scale) <= self.dilation() * b.side * (1.0 + TOL))
            .ok_or(DyadicError::OutsideWindow)
    }

    /// Number of standard-grid cubes of side `2^{-scale}` inside `q`.
    pub fn count_subcubes(&self, q: &GridCube, scale: i32) -> usize {
        let qb = self.cube_box(q);
        let len = 2f64.powi(-scale);
        let per_axis: Vec<usize> = qb
            .lo
            .iter()
            .map(|&lo| {
                let first = (lo / len - TOL).ceil() as i64;
                let last = ((lo + qb.side) / len + TOL).floor() as i64;
                (last - first).max(0) as usize
            })
            .collect();
        per_axis.iter().product()
    }
}
