use crate::{DyadicError, C64};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicParams {
    pub d: usize,
    pub depth: usize,
    pub dim: usize,
}

impl DyadicParams {
    pub fn new(d: usize, depth: usize, dim: usize) -> Result<Self, DyadicError> {
        let p = Self { d, depth, dim };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DyadicError> {
        if self.d < 2 {
            return Err(DyadicError::Params(format!("d = {} < 2", self.d)));
        }
        if self.depth < 1 {
            return Err(DyadicError::Params("depth must be at least 1".into()));
        }
        if self.dim < 1 {
            return Err(DyadicError::Params("dim must be at least 1".into()));
        }
        if self.dim > 1 && self.d != 2 {
            return Err(DyadicError::Params("dim > 1 requires d = 2".into()));
        }
        let cells = (self.branching() as f64).powi(self.depth as i32);
        if cells > (1u64 << 22) as f64 {
            return Err(DyadicError::Params(format!("{cells} cells is too many")));
        }
        Ok(())
    }

    /// Children per cube: `d` in one dimension, `2^dim` otherwise.
    pub fn branching(&self) -> usize {
        if self.dim == 1 {
            self.d
        } else {
            1 << self.dim
        }
    }
}

/// Shift digits; `omega[s]` is a bitmask over axes translating scale `s+1`
/// cubes by `2^{-(s+1)}` per set bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridShift {
    pub omega: Vec<u32>,
}

impl GridShift {
    pub fn new(omega: Vec<u32>) -> Self {
        Self { omega }
    }

    pub fn zero(depth: usize) -> Self {
        Self { omega: vec![0; depth] }
    }

    /// Shift number `code` in `0..2^(depth·dim)`, digit `s` taken from bits `s·dim..`.
    pub fn from_code(code: u64, depth: usize, dim: usize) -> Self {
        let mask = (1u64 << dim) - 1;
        Self { omega: (0..depth).map(|s| ((code >> (s * dim)) & mask) as u32).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeId {
    pub scale: usize,
    /// Linear position at this scale, axis 0 least significant.
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HaarIndex {
    pub cube: CubeId,
    pub color: usize,
}

#[derive(Debug, Clone)]
pub struct FiniteDyadicSystem {
    params: DyadicParams,
    shift: Option<GridShift>,
    q: usize,
    nc: usize,
    side: usize,
    /// `offsets[k][axis]`, translation of scale `k` in finest cells.
    offsets: Vec<Vec<usize>>,
    phases: Vec<Vec<C64>>,
}

impl FiniteDyadicSystem {
    pub fn build(params: DyadicParams, shift: Option<GridShift>) -> Result<Self, DyadicError> {
        params.validate()?;
        let n = params.depth;
        let q = if params.dim == 1 { params.d } else { 2 };
        let nc = params.branching();
        let side = q.pow(n as u32);
        let mut offsets = vec![vec![0usize; params.dim]; n + 1];
        if let Some(s) = &shift {
            if s.omega.len() != n {
                return Err(DyadicError::ShiftLength { got: s.omega.len(), want: n });
            }
            if q != 2 && s.omega.iter().any(|&w| w != 0) {
                return Err(DyadicError::ShiftNeedsBinary);
            }
            if s.omega.iter().any(|&w| w >> params.dim != 0) {
                return Err(DyadicError::Params("shift digit has bits beyond dim".into()));
            }
            for k in (0..n).rev() {
                for a in 0..params.dim {
                    let bit = ((s.omega[k] >> a) & 1) as usize;
                    offsets[k][a] = offsets[k + 1][a] + bit * (1 << (n - k - 1));
                }
            }
        }
        let phases = (0..nc)
            .map(|color| (0..nc).map(|c| phase(params, color, c)).collect())
            .collect();
        Ok(Self { params, shift, q, nc, side, offsets, phases })
    }

    pub fn standard(d: usize, depth: usize) -> Result<Self, DyadicError> {
        Self::build(DyadicParams::new(d, depth, 1)?, None)
    }

    pub fn params(&self) -> DyadicParams {
        self.params
    }
    pub fn shift(&self) -> Option<&GridShift> {
        self.shift.as_ref()
    }
    pub fn d(&self) -> usize {
        self.params.d
    }
    pub fn depth(&self) -> usize {
        self.params.depth
    }
    pub fn dim(&self) -> usize {
        self.params.dim
    }
    pub fn n_children(&self) -> usize {
        self.nc
    }
    pub fn n_colors(&self) -> usize {
        self.nc - 1
    }
    pub fn n_cells(&self) -> usize {
        self.nc.pow(self.params.depth as u32)
    }
    /// Size of the Haar basis including the coarse indicator; equals the cell count.
    pub fn basis_dim(&self) -> usize {
        self.n_cells()
    }
    pub fn cells_per_axis(&self) -> usize {
        self.side
    }
    pub fn cubes_at(&self, k: usize) -> usize {
        self.nc.pow(k as u32)
    }
    pub fn measure(&self, k: usize) -> f64 {
        (self.nc as f64).powi(-(k as i32))
    }
    pub fn side_length(&self, k: usize) -> f64 {
        (self.q as f64).powi(-(k as i32))
    }
    pub fn cell_measure(&self) -> f64 {
        self.measure(self.params.depth)
    }
    pub fn offset(&self, k: usize) -> &[usize] {
        &self.offsets[k]
    }

    pub fn check_cube(&self, c: CubeId) -> Result<(), DyadicError> {
        if c.scale > self.params.depth {
            return Err(DyadicError::Scale(c.scale));
        }
        if c.index >= self.cubes_at(c.scale) {
            return Err(DyadicError::Index(c.index));
        }
        Ok(())
    }

    pub fn check_haar(&self, h: HaarIndex) -> Result<(), DyadicError> {
        self.check_cube(h.cube)?;
        if h.cube.scale >= self.params.depth {
            return Err(DyadicError::Scale(h.cube.scale));
        }
        if h.color == 0 || h.color >= self.nc {
            return Err(DyadicError::Color(h.color));
        }
        Ok(())
    }

    pub fn coords(&self, k: usize, index: usize) -> Vec<usize> {
        let w = self.q.pow(k as u32);
        (0..self.params.dim).map(|a| (index / w.pow(a as u32)) % w).collect()
    }

    pub fn index_of(&self, k: usize, coords: &[usize]) -> usize {
        let w = self.q.pow(k as u32);
        coords.iter().rev().fold(0, |acc, &x| acc * w + x)
    }

    fn digit(&self, c: usize, axis: usize) -> usize {
        (c / self.q.pow(axis as u32)) % self.q
    }

    /// Cells of a cube, ordered by relative position (axis 0 fastest).
    pub fn cube_cells(&self, k: usize, index: usize) -> Vec<usize> {
        let len = self.q.pow((self.params.depth - k) as u32);
        let coords = self.coords(k, index);
        let dim = self.params.dim;
        let count = len.pow(dim as u32);
        let mut out = Vec::with_capacity(count);
        for r in 0..count {
            let mut cell = 0;
            for a in (0..dim).rev() {
                let ra = (r / len.pow(a as u32)) % len;
                let x = (coords[a] * len + self.offsets[k][a] + ra) % self.side;
                cell = cell * self.side + x;
            }
            out.push(cell);
        }
        out
    }

    /// Scale-`k` cube containing a finest cell.
    pub fn cube_of_cell(&self, k: usize, cell: usize) -> usize {
        let len = self.q.pow((self.params.depth - k) as u32);
        let w = self.q.pow(k as u32);
        let mut idx = 0;
        for a in (0..self.params.dim).rev() {
            let x = (cell / self.side.pow(a as u32)) % self.side;
            let rel = (x + self.side - self.offsets[k][a]) % self.side;
            idx = idx * w + rel / len;
        }
        idx
    }

    /// Child number `c` of cube `(k, index)`, as an index at scale `k+1`.
    pub fn child(&self, k: usize, index: usize, c: usize) -> usize {
        let coords = self.coords(k, index);
        let w = self.q.pow((k + 1) as u32);
        let unit = 1usize << (self.params.depth - k - 1);
        let child: Vec<usize> = (0..self.params.dim)
            .map(|a| {
                let shift = if self.q == 2 { (self.offsets[k][a] - self.offsets[k + 1][a]) / unit } else { 0 };
                (coords[a] * self.q + self.digit(c, a) + shift) % w
            })
            .collect();
        self.index_of(k + 1, &child)
    }

    /// Parent index at scale `k` of cube `(k+1, index)` and its child number.
    pub fn parent(&self, k: usize, index: usize) -> (usize, usize) {
        let coords = self.coords(k + 1, index);
        let w = self.q.pow((k + 1) as u32);
        let unit = 1usize << (self.params.depth - k - 1);
        let mut parent = vec![0; self.params.dim];
        let mut c = 0;
        for a in (0..self.params.dim).rev() {
            let shift = if self.q == 2 { (self.offsets[k][a] - self.offsets[k + 1][a]) / unit } else { 0 };
            let rel = (coords[a] + w - shift) % w;
            parent[a] = rel / self.q;
            c = c * self.q + rel % self.q;
        }
        (self.index_of(k, &parent), c)
    }

    /// Unscaled Haar value of `color` on child `c`; multiply by `|I|^{-1/2}`.
    pub fn phase(&self, color: usize, c: usize) -> C64 {
        self.phases[color][c]
    }

    /// `i ∘ j` with `h^i h^j = |I|^{-1/2} h^{i∘j}` and color 0 the normalized indicator.
    pub fn color_product(&self, i: usize, j: usize) -> usize {
        if self.params.dim == 1 {
            (i + j) % self.params.d
        } else {
            i ^ j
        }
    }

    /// Color of the pointwise conjugate Haar function.
    pub fn color_conj(&self, i: usize) -> usize {
        if self.params.dim == 1 {
            (self.params.d - i) % self.params.d
        } else {
            i
        }
    }

    /// Basis position: 0 is the coarse indicator, then scale, position, color.
    pub fn basis_index(&self, h: HaarIndex) -> usize {
        let k = h.cube.scale as u32;
        self.nc.pow(k) + h.cube.index * (self.nc - 1) + h.color - 1
    }

    pub fn basis_haar(&self, beta: usize) -> Option<HaarIndex> {
        if beta == 0 || beta >= self.basis_dim() {
            return None;
        }
        let mut k = 0;
        while self.nc.pow(k as u32 + 1) <= beta {
            k += 1;
        }
        let rel = beta - self.nc.pow(k as u32);
        Some(HaarIndex { cube: CubeId { scale: k, index: rel / (self.nc - 1) }, color: rel % (self.nc - 1) + 1 })
    }

    /// Scale of a basis element; the coarse indicator gets `None`.
    pub fn basis_scale(&self, beta: usize) -> Option<usize> {
        self.basis_haar(beta).map(|h| h.cube.scale)
    }

    pub fn haar_indices(&self) -> impl Iterator<Item = HaarIndex> + '_ {
        (1..self.basis_dim()).map(move |b| self.basis_haar(b).unwrap())
    }

    /// Ancestors of `(k, index)` from scale `k-1` up to 0, each with the child number leading down.
    pub fn ancestors(&self, k: usize, index: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(k);
        let mut idx = index;
        for s in (0..k).rev() {
            let (p, c) = self.parent(s, idx);
            out.push((s, p, c));
            idx = p;
        }
        out
    }
}

fn phase(params: DyadicParams, color: usize, c: usize) -> C64 {
    if params.dim == 1 {
        let d = params.d;
        let e = (color * (c + 1)) % d;
        if (4 * e) % d == 0 {
            return [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][4 * e / d];
        }
        C64::from_polar(1.0, 2.0 * PI * e as f64 / d as f64)
    } else if (color & c).count_ones() % 2 == 0 {
        C64::new(1.0, 0.0)
    } else {
        C64::new(-1.0, 0.0)
    }
}
