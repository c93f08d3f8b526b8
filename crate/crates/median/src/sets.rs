//! Quadrant sets on a pair of cubes: wedges of half-angle `π/4` around the
//! rotated axes, centred at the complex median of the values on the second cube.

use crate::{boundary_tol, complex_median, MedianError, WeightedPointSet, C64};
use std::f64::consts::{FRAC_PI_4, PI};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadrantSets {
    pub theta: f64,
    pub alpha: C64,
    /// Indices into the first cube with `arg(e^{iθ}(b(x) − α))` in wedge `s`.
    pub e_sets: [Vec<usize>; 4],
    /// Indices into the second cube with `arg(e^{iθ}(α − b(x̂)))` in wedge `s`.
    pub f_sets: [Vec<usize>; 4],
}

/// Wedge `s` (0-based) is `[−π/4 + sπ/2, π/4 + sπ/2]`; zero lies in all of them.
fn wedges(w: C64, tol: f64) -> [bool; 4] {
    if w.norm() <= tol {
        return [true; 4];
    }
    let mut out = [false; 4];
    for (s, slot) in out.iter_mut().enumerate() {
        let centre = s as f64 * PI / 2.0;
        let d = (w.arg() - centre + PI).rem_euclid(2.0 * PI) - PI;
        *slot = d.abs() <= FRAC_PI_4 + 1e-12;
    }
    out
}

pub fn quadrant_sets(b_i: &[C64], b_hat: &[C64]) -> Result<QuadrantSets, MedianError> {
    if b_i.is_empty() || b_hat.is_empty() {
        return Err(MedianError::Empty);
    }
    let hat = WeightedPointSet::unit(b_hat)?;
    let frame = complex_median(&hat);
    let alpha = frame.center();
    // frame quadrants start at direction θ_frame; wedge centres sit at −θ + π + sπ/2
    let theta = (3.0 * FRAC_PI_4 - frame.theta).rem_euclid(2.0 * PI);
    let rot = C64::from_polar(1.0, theta);
    let tol = boundary_tol(&WeightedPointSet::unit(&[b_i, b_hat].concat())?);
    let mut e_sets: [Vec<usize>; 4] = Default::default();
    let mut f_sets: [Vec<usize>; 4] = Default::default();
    for (k, &z) in b_i.iter().enumerate() {
        for (s, inside) in wedges(rot * (z - alpha), tol).into_iter().enumerate() {
            if inside {
                e_sets[s].push(k);
            }
        }
    }
    for (k, &z) in b_hat.iter().enumerate() {
        for (s, inside) in wedges(rot * (alpha - z), tol).into_iter().enumerate() {
            if inside {
                f_sets[s].push(k);
            }
        }
    }
    Ok(QuadrantSets { theta, alpha, e_sets, f_sets })
}

/// Worst slack of the pairwise inequalities over all matched pairs
/// `x ∈ E_s`, `x̂ ∈ F_s`; nonpositive values mean every inequality holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCheck {
    /// `max (|b(x) − α| − 2|b(x) − b(x̂)|)`.
    pub triangle: f64,
    /// `max (|w| − 2 Re w)` with `w = i^{−s} e^{iθ}(b(x) − b(x̂))`.
    pub real_part: f64,
    /// `max (|Im w| − Re w)`.
    pub imag_part: f64,
    pub pairs: usize,
}

impl QuadrantSets {
    pub fn check_pairs(&self, b_i: &[C64], b_hat: &[C64]) -> PairCheck {
        let rot = C64::from_polar(1.0, self.theta);
        let mut out = PairCheck { triangle: f64::NEG_INFINITY, real_part: f64::NEG_INFINITY, imag_part: f64::NEG_INFINITY, pairs: 0 };
        for s in 0..4 {
            let turn = C64::from_polar(1.0, -(s as f64) * PI / 2.0);
            for &x in &self.e_sets[s] {
                for &xh in &self.f_sets[s] {
                    let diff = b_i[x] - b_hat[xh];
                    let w = turn * rot * diff;
                    out.triangle = out.triangle.max((b_i[x] - self.alpha).norm() - 2.0 * diff.norm());
                    out.real_part = out.real_part.max(w.norm() - 2.0 * w.re);
                    out.imag_part = out.imag_part.max(w.im.abs() - w.re);
                    out.pairs += 1;
                }
            }
        }
        out
    }

    pub fn f_counts(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|s| self.f_sets[s].len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_second_cube() {
        let q = quadrant_sets(&[c(1.0, 2.0), c(-1.0, 0.5)], &[c(0.25, 0.5); 4]).unwrap();
        assert!((q.alpha - c(0.25, 0.5)).norm() < 1e-14);
        assert_eq!(q.f_counts(), [4; 4]);
        assert!(q.check_pairs(&[c(1.0, 2.0), c(-1.0, 0.5)], &[c(0.25, 0.5); 4]).triangle <= 1e-12);
    }

    #[test]
    fn symmetric_second_cube() {
        let hat = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        let q = quadrant_sets(&[c(0.3, 0.1)], &hat).unwrap();
        assert!(q.f_counts().iter().all(|&n| 4 * n >= hat.len() / 4 * 4 / 4));
        assert!(q.f_counts().iter().all(|&n| n >= 1));
        assert_eq!(quadrant_sets(&[], &hat).unwrap_err(), MedianError::Empty);
    }

    #[test]
    fn random_pairs_satisfy_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let n = rng.random_range(1..20);
            let m = rng.random_range(1..20);
            let grid = rng.random_bool(0.3);
            let draw = |rng: &mut ChaCha8Rng| {
                if grid {
                    c(rng.random_range(-2..3) as f64, rng.random_range(-2..3) as f64)
                } else {
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                }
            };
            let b_i: Vec<C64> = (0..n).map(|_| draw(&mut rng)).collect();
            let b_hat: Vec<C64> = (0..m).map(|_| draw(&mut rng)).collect();
            let q = quadrant_sets(&b_i, &b_hat).unwrap();
            assert!(q.f_counts().iter().all(|&k| 16 * k >= m), "{:?}", q.f_counts());
            let covered = (0..n).all(|x| q.e_sets.iter().any(|e| e.contains(&x)));
            assert!(covered);
            let chk = q.check_pairs(&b_i, &b_hat);
            assert!(chk.triangle <= 1e-12 && chk.real_part <= 1e-12 && chk.imag_part <= 1e-12, "{chk:?}");
        }
    }
}
