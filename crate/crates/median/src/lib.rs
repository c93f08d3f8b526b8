//! Medians of finite weighted point sets in the complex plane.
//!
//! Every region is closed: a point on a boundary line belongs to each
//! adjacent region, so quadrant masses may sum to more than the total.
//! "On a line" means within [`boundary_tol`] of it.

mod construct;
mod io;
mod sets;

pub use construct::{complex_median, complex_median_report, fallback_count, MedianCase, MedianReport};
pub use io::{format_frame, format_points, parse_frame, parse_points};
pub use sets::{quadrant_sets, PairCheck, QuadrantSets};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, PartialEq)]
pub enum MedianError {
    #[error("point set is empty")]
    Empty,
    #[error("weight {0} is not positive and finite")]
    Weight(f64),
    #[error("point {0} is not finite")]
    NotFinite(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet {
    points: Vec<(C64, f64)>,
}

impl WeightedPointSet {
    pub fn new(points: Vec<(C64, f64)>) -> Result<Self, MedianError> {
        if points.is_empty() {
            return Err(MedianError::Empty);
        }
        for (k, &(z, w)) in points.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(MedianError::Weight(w));
            }
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(MedianError::NotFinite(k));
            }
        }
        Ok(Self { points })
    }

    pub fn unit(values: &[C64]) -> Result<Self, MedianError> {
        Self::new(values.iter().map(|&z| (z, 1.0)).collect())
    }

    pub fn points(&self) -> &[(C64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Result<Self, MedianError> {
        Self::new(self.points.iter().map(|&(z, w)| (f(z), w)).collect())
    }
}

/// Distance below which a point counts as lying on a line.
pub fn boundary_tol(pts: &WeightedPointSet) -> f64 {
    1e-11 * (1.0 + pts.points.iter().map(|p| p.0.norm()).fold(0.0, f64::max))
}

/// Two orthogonal lines. `L1` has direction `e^{iθ}` and is
/// `{Im(z e^{−iθ}) = c1}`; `L2` is `{Re(z e^{−iθ}) = c2}`.
/// Quadrant `T_s` is the closed wedge at the intersection between
/// directions `θ + (s−1)π/2` and `θ + sπ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantFrame {
    pub theta: f64,
    pub c1: f64,
    pub c2: f64,
}

impl QuadrantFrame {
    /// Frame with `L1` through `p` in direction `e^{iφ}` and `L2` through `q`.
    pub fn through(phi: f64, p: C64, q: C64) -> Self {
        let theta = phi.rem_euclid(std::f64::consts::PI);
        let rot = C64::from_polar(1.0, -theta);
        Self { theta, c1: (p * rot).im, c2: (q * rot).re }
    }

    pub fn center(&self) -> C64 {
        C64::new(self.c2, self.c1) * C64::from_polar(1.0, self.theta)
    }

    /// Closed quadrants (0-based) containing `z`.
    pub fn quadrants_of(&self, z: C64, tol: f64) -> [bool; 4] {
        let w = z * C64::from_polar(1.0, -self.theta);
        let (u, v) = (w.re - self.c2, w.im - self.c1);
        let (up, down, right, left) = (v >= -tol, v <= tol, u >= -tol, u <= tol);
        [right && up, left && up, left && down, right && down]
    }
}

/// Masses of the four closed quadrants.
pub fn quadrant_masses(pts: &WeightedPointSet, frame: &QuadrantFrame) -> [f64; 4] {
    let tol = boundary_tol(pts);
    let mut out = [0.0; 4];
    for &(z, w) in &pts.points {
        for (m, inside) in out.iter_mut().zip(frame.quadrants_of(z, tol)) {
            if inside {
                *m += w;
            }
        }
    }
    out
}

/// True when every closed quadrant carries at least `total/16`.
pub fn frame_is_valid(pts: &WeightedPointSet, frame: &QuadrantFrame) -> bool {
    let total = pts.total();
    quadrant_masses(pts, frame).iter().all(|&m| m >= total / 16.0 - 1e-12 * total)
}

/// Smallest `t` with `Σ_{x_k ≤ t} w_k ≥ target`, with `target` at most the total.
pub(crate) fn lower_quantile(vals: &mut [(f64, f64)], target: f64, slack: f64) -> f64 {
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    for &(x, w) in vals.iter() {
        acc += w;
        if acc + slack >= target {
            return x;
        }
    }
    vals.last().expect("nonempty").0
}

/// Largest `t` with `Σ_{x_k ≥ t} w_k ≥ target`.
pub(crate) fn upper_quantile(vals: &mut [(f64, f64)], target: f64, slack: f64) -> f64 {
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut acc = 0.0;
    for &(x, w) in vals.iter() {
        acc += w;
        if acc + slack >= target {
            return x;
        }
    }
    vals.last().expect("nonempty").0
}

/// Offset `α` of the line `{Re(z e^{−iφ}) = α}` whose closed sides each
/// carry half the mass, as the infimum of admissible offsets.
pub fn halfplane_median(pts: &WeightedPointSet, phi: f64) -> f64 {
    let rot = C64::from_polar(1.0, -phi);
    let project = |z: C64| {
        if phi == 0.0 {
            z.re
        } else if phi == std::f64::consts::FRAC_PI_2 {
            z.im
        } else {
            (z * rot).re
        }
    };
    let mut proj: Vec<(f64, f64)> = pts.points.iter().map(|&(z, w)| (project(z), w)).collect();
    let total = pts.total();
    lower_quantile(&mut proj, total / 2.0, 1e-12 * total)
}

/// A line `l` and two perpendicular rays from `l`, cutting the plane into
/// four closed pieces of mass at least a quarter each.
///
/// `l` is the horizontal line `Im z = level`. The upper ray starts at
/// `alpha1 + i·level`, the lower ray at `alpha2 + i·level`. Piece 1 is
/// upper-left, 2 upper-right, 3 lower-left, 4 lower-right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantSplit {
    pub level: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub masses: [f64; 4],
}

impl QuadrantSplit {
    pub fn pieces_of(&self, z: C64, tol: f64) -> [bool; 4] {
        let v = z.im - self.level;
        let (up, down) = (v >= -tol, v <= tol);
        [
            up && z.re <= self.alpha1 + tol,
            up && z.re >= self.alpha1 - tol,
            down && z.re <= self.alpha2 + tol,
            down && z.re >= self.alpha2 - tol,
        ]
    }
}

pub fn quadrant_split(pts: &WeightedPointSet) -> QuadrantSplit {
    let level = halfplane_median(pts, std::f64::consts::FRAC_PI_2);
    let total = pts.total();
    let side = |upper: bool| -> f64 {
        let mut re: Vec<(f64, f64)> =
            pts.points.iter().filter(|p| if upper { p.0.im >= level } else { p.0.im <= level }).map(|p| (p.0.re, p.1)).collect();
        let mass: f64 = re.iter().map(|p| p.1).sum();
        lower_quantile(&mut re, mass / 2.0, 1e-12 * total)
    };
    let mut split = QuadrantSplit { level, alpha1: side(true), alpha2: side(false), masses: [0.0; 4] };
    let tol = boundary_tol(pts);
    for &(z, w) in &pts.points {
        let pieces = split.pieces_of(z, tol);
        for (m, inside) in split.masses.iter_mut().zip(pieces) {
            if inside {
                *m += w;
            }
        }
    }
    split
}
