//! Orthogonal frames whose four closed quadrants each carry a sixteenth of
//! the mass, built from a quadrant split by sweeping a ray origin along the
//! split line.
//!
//! In normalized coordinates the split line is the real axis, piece `S1` is
//! upper-left of the upper ray at `α1` and `S4` is lower-right of the lower
//! ray at `α2 > α1`. For `x` on `[A, B]` the admissible angles of a ray from
//! `x` into the upper half-plane, splitting `S1` into two parts with a quarter
//! of its mass each, form `[r1(x), r2(x)]`; the same for `S4` and the lower
//! half-plane gives `[r3(x), r4(x)]`. Each `r_i(x)` is the angle of one
//! quantile point seen from `x`, and that point only changes where the
//! angular order of two points of a piece changes. Comparisons `r1 ≤ r4` and
//! `r3 ≤ r2` switch only where `x` lies on a segment joining a point of `S1`
//! to a point of `S4`. Scanning all these crossings of the real axis and the
//! midpoints between them therefore decides every comparison.

use crate::{boundary_tol, frame_is_valid, lower_quantile, quadrant_split, upper_quantile, QuadrantFrame, WeightedPointSet, C64};
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

static FALLBACKS: AtomicUsize = AtomicUsize::new(0);

/// Number of frames produced by the exhaustive fallback since process start.
pub fn fallback_count() -> usize {
    FALLBACKS.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedianCase {
    /// Both rays of the split start at the same point.
    Coincident,
    /// Half of `S1` lies on one ray from the split line.
    RayUpper,
    /// Half of `S4` lies on one ray from the split line.
    RayLower,
    /// A common angle in `[r1, r2] ∩ [r3, r4]`.
    Sweep,
    /// Exhaustive search over breakpoint frames.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianReport {
    pub frame: QuadrantFrame,
    pub case: MedianCase,
    /// An angle function touched 0 or π somewhere on the sweep.
    pub boundary_angle: bool,
    pub masses: [f64; 4],
}

pub fn complex_median(pts: &WeightedPointSet) -> QuadrantFrame {
    complex_median_report(pts).frame
}

/// Normalized coordinates: `w = s(z − i·level)`, with `s` a reflection `w ↦ −w̄` when needed.
#[derive(Clone, Copy)]
struct Chart {
    level: f64,
    reflect: bool,
}

impl Chart {
    fn to_local(self, z: C64) -> C64 {
        let w = z - C64::new(0.0, self.level);
        if self.reflect {
            -w.conj()
        } else {
            w
        }
    }

    /// Frame with `L1` through `p` in direction `e^{iφ}` and `L2` perpendicular through `q`, all local.
    fn frame(self, phi: f64, p: C64, q: C64) -> QuadrantFrame {
        let back = |w: C64| (if self.reflect { -w.conj() } else { w }) + C64::new(0.0, self.level);
        let phi = if self.reflect { PI - phi } else { phi };
        QuadrantFrame::through(phi, back(p), back(q))
    }
}

struct Side {
    /// `(w, weight)` of the piece in local coordinates.
    pts: Vec<(C64, f64)>,
    mass: f64,
    upper: bool,
}

impl Side {
    /// Angles seen from `x`: measured from the positive axis for the upper
    /// piece, clockwise from it for the lower one; apex mass apart.
    fn angles(&self, x: f64) -> (Vec<(f64, f64)>, f64) {
        let mut apex = 0.0;
        let mut out = Vec::with_capacity(self.pts.len());
        for &(w, m) in &self.pts {
            if w.im == 0.0 && w.re == x {
                apex += m;
            } else {
                out.push((w.im.abs().atan2(w.re - x), m));
            }
        }
        (out, apex)
    }

    /// Interval of ray angles `r` with a quarter of the piece on each side.
    /// Upper piece: ray direction `e^{i(π−r)}`. Lower piece: `e^{−ir}`.
    fn interval(&self, x: f64, slack: f64) -> (f64, f64) {
        let (mut ang, apex) = self.angles(x);
        let target = self.mass / 4.0 - apex;
        if ang.is_empty() || target <= slack {
            return (0.0, PI);
        }
        let lo = lower_quantile(&mut ang, target, slack);
        let hi = upper_quantile(&mut ang, target, slack);
        if self.upper {
            (PI - hi, PI - lo)
        } else {
            (lo, hi)
        }
    }

    fn direction(&self, r: f64) -> C64 {
        if self.upper {
            C64::from_polar(1.0, PI - r)
        } else {
            C64::from_polar(1.0, -r)
        }
    }

    /// Point on the ray from `x` splitting the mass on the ray in halves.
    fn ray_median(&self, x: f64, dir: C64, tol: f64, slack: f64) -> C64 {
        let mut along: Vec<(f64, f64)> = self
            .pts
            .iter()
            .filter_map(|&(w, m)| {
                let r = w - x;
                let s = r.re * dir.re + r.im * dir.im;
                let off = (r.im * dir.re - r.re * dir.im).abs();
                (off <= tol && s >= -tol).then_some((s.max(0.0), m))
            })
            .collect();
        if along.is_empty() {
            return C64::new(x, 0.0);
        }
        let mass: f64 = along.iter().map(|p| p.1).sum();
        C64::new(x, 0.0) + dir * lower_quantile(&mut along, mass / 2.0, slack)
    }
}

/// Crossings with the real axis of lines through two points, within `[a, b]`.
fn breakpoints(first: &Side, second: &Side, a: f64, b: f64, out: &mut Vec<f64>) {
    let crossing = |p: C64, q: C64| (p.im != q.im).then(|| p.re - p.im * (q.re - p.re) / (q.im - p.im));
    for side in [first, second] {
        for (k, &(p, _)) in side.pts.iter().enumerate() {
            if p.im == 0.0 {
                out.push(p.re);
            }
            out.extend(side.pts[k + 1..].iter().filter_map(|&(q, _)| crossing(p, q)));
        }
    }
    for &(p, _) in &first.pts {
        out.extend(second.pts.iter().filter_map(|&(q, _)| crossing(p, q)));
    }
    out.retain(|&x| x >= a && x <= b);
}

pub fn complex_median_report(pts: &WeightedPointSet) -> MedianReport {
    let total = pts.total();
    let slack = 1e-12 * total;
    let tol = boundary_tol(pts);
    let split = quadrant_split(pts);
    let report = |frame: QuadrantFrame, case, boundary_angle| MedianReport { frame, case, boundary_angle, masses: crate::quadrant_masses(pts, &frame) };

    let chart = Chart { level: split.level, reflect: split.alpha1 > split.alpha2 };
    if split.alpha1 == split.alpha2 {
        let frame = chart.frame(0.0, C64::new(split.alpha1, 0.0), C64::new(split.alpha1, 0.0));
        if frame_is_valid(pts, &frame) {
            return report(frame, MedianCase::Coincident, false);
        }
    }
    let (a1, a2) = if chart.reflect { (-split.alpha1, -split.alpha2) } else { (split.alpha1, split.alpha2) };
    let local: Vec<(C64, f64)> = pts.points().iter().map(|&(z, w)| (chart.to_local(z), w)).collect();
    let piece = |upper: bool| -> Side {
        let pts: Vec<(C64, f64)> = local
            .iter()
            .copied()
            .filter(|&(w, _)| if upper { w.im >= 0.0 && w.re <= a1 } else { w.im <= 0.0 && w.re >= a2 })
            .collect();
        let mass = pts.iter().map(|p| p.1).sum();
        Side { pts, mass, upper }
    };
    let (s1, s4) = (piece(true), piece(false));
    let median_re = |s: &Side| {
        let mut re: Vec<(f64, f64)> = s.pts.iter().map(|p| (p.0.re, p.1)).collect();
        lower_quantile(&mut re, s.mass / 2.0, slack)
    };
    let (a, b) = (median_re(&s1), median_re(&s4));
    let (a, b) = (a.min(b), a.max(b));

    let mut xs = vec![a, b];
    breakpoints(&s1, &s4, a, b, &mut xs);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mids: Vec<f64> = xs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    xs.extend(mids);
    xs.sort_by(f64::total_cmp);

    let centre = C64::new(0.5 * (a1 + a2), 0.0);
    let mut boundary_angle = false;
    for &x in &xs {
        let (r1, r2) = s1.interval(x, slack);
        let (r3, r4) = s4.interval(x, slack);
        boundary_angle |= r1 == 0.0 || r3 == 0.0 || r2 == PI || r4 == PI;
        for (side, lo, hi, case) in [(&s1, r1, r2, MedianCase::RayUpper), (&s4, r3, r4, MedianCase::RayLower)] {
            if lo == hi {
                let dir = side.direction(lo);
                let t = side.ray_median(x, dir, tol, slack);
                let frame = chart.frame(dir.arg(), C64::new(x, 0.0), t);
                if frame_is_valid(pts, &frame) {
                    return report(frame, case, boundary_angle);
                }
            }
        }
        let r0 = r1.max(r3);
        if r0 <= r2.min(r4) {
            let frame = chart.frame(PI - r0, C64::new(x, 0.0), centre);
            if frame_is_valid(pts, &frame) {
                return report(frame, MedianCase::Sweep, boundary_angle);
            }
        }
    }

    FALLBACKS.fetch_add(1, Ordering::Relaxed);
    let frame = exhaustive(pts).expect("a valid frame exists for every finite weighted set");
    report(frame, MedianCase::Fallback, boundary_angle)
}

/// Search over directions spanned by pairs of points and their normals.
/// For each direction and each `L1` through a point, `L2` is chosen from
/// the quantiles of both sides.
pub(crate) fn exhaustive(pts: &WeightedPointSet) -> Option<QuadrantFrame> {
    let p = pts.points();
    let total = pts.total();
    let (slack, tol) = (1e-12 * total, boundary_tol(pts));
    let mut dirs = vec![0.0, PI / 2.0];
    for (k, &(u, _)) in p.iter().enumerate() {
        for &(v, _) in &p[k + 1..] {
            if (v - u).norm() > tol {
                let t = (v - u).arg().rem_euclid(PI);
                dirs.push(t);
                dirs.push((t + PI / 2.0).rem_euclid(PI));
            }
        }
    }
    dirs.sort_by(f64::total_cmp);
    dirs.dedup();
    for theta in dirs {
        let rot = C64::from_polar(1.0, -theta);
        let uv: Vec<(f64, f64, f64)> = p.iter().map(|&(z, w)| ((z * rot).re, (z * rot).im, w)).collect();
        for &(_, c1, _) in &uv {
            let feasible = |upper: bool| -> Option<(f64, f64)> {
                let mut us: Vec<(f64, f64)> =
                    uv.iter().filter(|q| if upper { q.1 >= c1 - tol } else { q.1 <= c1 + tol }).map(|q| (q.0, q.2)).collect();
                let target = total / 16.0;
                if us.iter().map(|q| q.1).sum::<f64>() + slack < 2.0 * target {
                    return None;
                }
                let lo = lower_quantile(&mut us, target, slack);
                let hi = upper_quantile(&mut us, target, slack);
                (lo <= hi).then_some((lo, hi))
            };
            if let (Some((l1, h1)), Some((l2, h2))) = (feasible(true), feasible(false)) {
                let c2 = l1.max(l2);
                if c2 <= h1.min(h2) {
                    let frame = QuadrantFrame { theta, c1, c2 };
                    if frame_is_valid(pts, &frame) {
                        return Some(frame);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrant_masses;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn check(pts: &WeightedPointSet) -> MedianReport {
        let r = complex_median_report(pts);
        let total = pts.total();
        assert!(quadrant_masses(pts, &r.frame).iter().all(|&m| m >= total / 16.0 - 1e-12 * total), "{r:?}");
        r
    }

    #[test]
    fn symmetric_and_degenerate_examples() {
        let r = check(&WeightedPointSet::unit(&[c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]).unwrap());
        assert!(r.masses.iter().all(|&m| m >= 1.0));
        let r = check(&WeightedPointSet::unit(&[c(0.5, -2.0); 3]).unwrap());
        assert_eq!(r.masses, [3.0; 4]);
        check(&WeightedPointSet::unit(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]).unwrap());
        check(&WeightedPointSet::unit(&[c(0.0, 0.0), c(1.0, 1.0), c(2.0, 2.0), c(3.0, 3.0), c(4.0, 4.0)]).unwrap());
    }

    #[test]
    fn exhaustive_search_finds_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let pts = crate::tests::random_set(&mut rng);
            let f = exhaustive(&pts).expect("frame");
            assert!(frame_is_valid(&pts, &f));
        }
    }

    #[test]
    fn random_sets_need_no_fallback() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut cases = std::collections::HashMap::new();
        for _ in 0..1000 {
            let pts = crate::tests::random_set(&mut rng);
            let r = check(&pts);
            *cases.entry(format!("{:?}", r.case)).or_insert(0usize) += 1;
            if r.case == MedianCase::Fallback && std::env::var("DIAG").is_ok() { eprintln!("FB {:?}", pts.points()); }
        }
        eprintln!("{cases:?}");
        assert!(cases.contains_key("Sweep"), "{cases:?}");
    }

    #[test]
    fn equivariant_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let pts = crate::tests::random_set(&mut rng);
            let f = complex_median(&pts);
            let a = C64::from_polar(rng.random_range(0.5..3.0), rng.random_range(0.0..6.0));
            let b = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let moved = pts.map(|z| a * z + b).unwrap();
            let o = f.center();
            let dir = C64::from_polar(1.0, f.theta);
            let g = QuadrantFrame::through((a * dir).arg(), a * o + b, a * o + b);
            assert!(frame_is_valid(&moved, &g));
        }
    }
}
