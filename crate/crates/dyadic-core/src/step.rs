use crate::{zero_block, CMat, DyadicError, C64};

/// Block-valued function constant on each finest cell.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub m: usize,
    pub values: Vec<CMat>,
}

impl StepFunction {
    pub fn new(m: usize, values: Vec<CMat>) -> Result<Self, DyadicError> {
        if values.iter().any(|v| v.nrows() != m || v.ncols() != m) {
            return Err(DyadicError::Shape(format!("blocks must be {m}x{m}")));
        }
        Ok(Self { m, values })
    }

    pub fn scalar(values: &[C64]) -> Self {
        Self { m: 1, values: values.iter().map(|&z| CMat::from_element(1, 1, z)).collect() }
    }

    pub fn real(values: &[f64]) -> Self {
        Self::scalar(&values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn zeros(cells: usize, m: usize) -> Self {
        Self { m, values: vec![zero_block(m); cells] }
    }

    pub fn constant(cells: usize, block: CMat) -> Self {
        Self { m: block.nrows(), values: vec![block; cells] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry `(0,0)` of every cell.
    pub fn scalar_values(&self) -> Vec<C64> {
        self.values.iter().map(|v| v[(0, 0)]).collect()
    }

    fn zip(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Self {
        assert_eq!(self.len(), other.len(), "step functions on different systems");
        Self { m: self.m, values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    /// Pointwise block product `self(x) · other(x)`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.m == other.m {
            return self.zip(other, |a, b| a * b);
        }
        // scalar times block in either order
        let m = self.m.max(other.m);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| match (a.nrows(), b.nrows()) {
                (1, _) => b * a[(0, 0)],
                (_, 1) => a * b[(0, 0)],
                _ => panic!("block sizes {} and {} do not multiply", a.nrows(), b.nrows()),
            })
            .collect();
        Self { m, values }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { m: self.m, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Pointwise adjoint `b*(x) = b(x)^†`.
    pub fn adjoint(&self) -> Self {
        Self { m: self.m, values: self.values.iter().map(|v| v.adjoint()).collect() }
    }

    /// `∫ f` with cells of measure `1/len`.
    pub fn integral(&self) -> CMat {
        let w = 1.0 / self.len() as f64;
        self.values.iter().fold(zero_block(self.m), |acc, v| acc + v) * C64::new(w, 0.0)
    }

    /// `∫ ‖f‖_HS^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_squared()).sum::<f64>() / self.len() as f64
    }

    /// `‖f‖_{L_p(L_p(M_m))}` with the normalized trace on blocks.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_norm_pow(p).powf(1.0 / p)
    }

    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        let w = 1.0 / self.len() as f64;
        self.values.iter().map(|v| block_lp_pow(v, p)).sum::<f64>() * w
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flat_map(|v| v.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `tr_m |x|^p` for one block; scalars reduce to `|x|^p`.
pub fn block_lp_pow(x: &CMat, p: f64) -> f64 {
    let m = x.nrows();
    if m == 1 {
        return x[(0, 0)].norm().powf(p);
    }
    let sv = x.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let cut = top * m as f64 * f64::EPSILON;
    sv.iter().filter(|&&s| s > cut).map(|s| s.powf(p)).sum::<f64>() / m as f64
}
