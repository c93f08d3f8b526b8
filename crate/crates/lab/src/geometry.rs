//! Complex medians, quadrant sets and covering by adjacent grids.

use crate::random::{rng, trial_seed};
use crate::{compute, Check, LabError, C64};
use dyadic_core::{AdjacentFamily, AxisBox};
use median::{complex_median_report, halfplane_median, MedianCase, quadrant_sets, quadrant_split, WeightedPointSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

pub const MEDIAN_SETS: usize = 1000;
/// Rounded near-collinear sets, checked for masses but outside the exact corpus.
pub const NEAR_SETS: usize = 200;
pub const CUBE_PAIRS: usize = 500;
pub const COVER_BOXES: usize = 1000;
/// Relative tolerance for closed-region membership in the independent mass counts.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// Point families: generic, lattice duplicates, exactly collinear, heavy atoms,
/// concyclic, near-horizontal, single point, two points. Kind 8 is collinear
/// only up to rounding.
pub fn random_points(kind: usize, rng: &mut ChaCha8Rng) -> Vec<(C64, f64)> {
    let n = match kind {
        6 => 1,
        7 => 2,
        _ => rng.random_range(3..60),
    };
    let dir = if kind == 2 {
        let (mut a, mut b) = (0, 0);
        while a == 0 && b == 0 {
            (a, b) = (rng.random_range(-3..=3), rng.random_range(-3..=3));
        }
        C64::new(a as f64, b as f64)
    } else {
        C64::from_polar(1.0, rng.random_range(0.0..TAU))
    };
    let base = if kind == 2 {
        C64::new(rng.random_range(-8..=8) as f64 / 4.0, rng.random_range(-8..=8) as f64 / 4.0)
    } else {
        C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
    };
    (0..n)
        .map(|k| {
            let z = match kind {
                1 => C64::new(rng.random_range(-2..3) as f64, rng.random_range(-2..3) as f64),
                2 => base + dir * (rng.random_range(-64..=64) as f64 / 64.0),
                8 => base + dir * rng.random_range(-1.0..1.0),
                3 if k < 3 => C64::new(k as f64, (k * k) as f64 * 0.5),
                4 => C64::from_polar(1.0, (rng.random_range(0..12) as f64) * PI / 6.0),
                5 => C64::new(rng.random_range(-1.0..1.0), 1e-10 * rng.random_range(-1.0..1.0)),
                _ => C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            };
            let w = match kind {
                3 if k < 3 => 40.0,
                1 => 1.0,
                _ => rng.random_range(0.05..3.0),
            };
            (z, w)
        })
        .collect()
}

fn tol(points: &[(C64, f64)]) -> f64 {
    MEMBERSHIP_TOL * (1.0 + points.iter().map(|p| p.0.norm()).fold(0.0, f64::max))
}

/// Worst `min_quadrant_mass / total − 1/16` etc. over the median corpus.
pub fn median_suite(seed: u64) -> Result<Vec<Check>, LabError> {
    let (mut quad, mut half, mut split): (f64, f64, f64) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let (mut fallbacks, mut near_fallbacks) = (0, 0);
    for t in 0..MEDIAN_SETS + NEAR_SETS {
        let mut r = rng(trial_seed(seed, 3000, t));
        let exact = t < MEDIAN_SETS;
        let pts = random_points(if exact { t % 8 } else { 8 }, &mut r);
        let set = WeightedPointSet::new(pts.clone()).map_err(compute)?;
        let total: f64 = pts.iter().map(|p| p.1).sum();
        let eps = tol(&pts);

        let rep = complex_median_report(&set);
        let frame = rep.frame;
        let used = usize::from(rep.case == MedianCase::Fallback);
        if exact {
            fallbacks += used;
        } else {
            near_fallbacks += used;
        }
        let rot = C64::from_polar(1.0, -frame.theta);
        let mut masses = [0.0; 4];
        for &(z, w) in &pts {
            let v = z * rot;
            let (u, y) = (v.re - frame.c2, v.im - frame.c1);
            let inside = [u >= -eps && y >= -eps, u <= eps && y >= -eps, u <= eps && y <= eps, u >= -eps && y <= eps];
            for (m, i) in masses.iter_mut().zip(inside) {
                if i {
                    *m += w;
                }
            }
        }
        quad = quad.min(masses.iter().fold(f64::INFINITY, |a, &b| a.min(b)) / total - 1.0 / 16.0);

        let phi = r.random_range(0.0..PI);
        let cut = halfplane_median(&set, phi);
        let proj = |z: C64| (z * C64::from_polar(1.0, -phi)).re;
        let below: f64 = pts.iter().filter(|p| proj(p.0) <= cut + eps).map(|p| p.1).sum();
        let above: f64 = pts.iter().filter(|p| proj(p.0) >= cut - eps).map(|p| p.1).sum();
        half = half.min(below.min(above) / total - 0.5);

        let s = quadrant_split(&set);
        let mut pieces = [0.0; 4];
        for &(z, w) in &pts {
            for (m, i) in pieces.iter_mut().zip(s.pieces_of(z, eps)) {
                if i {
                    *m += w;
                }
            }
        }
        split = split.min(pieces.iter().fold(f64::INFINITY, |a, &b| a.min(b)) / total - 0.25);
    }
    let pairs = quadrant_set_pairs(seed)?;
    let mut out = vec![
        Check::slack("median quadrant masses", "every closed quadrant of the complex median frame holds ≥ 1/16 of the mass", quad, 1e-12),
        Check::slack("half-plane median", "both closed half-planes of the median line hold ≥ 1/2", half, 1e-12),
        Check::slack("quadrant split", "line-and-rays split leaves ≥ 1/4 of the mass in each piece", split, 1e-12),
        Check::truth(
            "median without fallback",
            "the constructive median succeeds without exhaustive search",
            fallbacks == 0,
            fallbacks as f64,
            format!(
                "{fallbacks} fallback activations over {MEDIAN_SETS} exact-corpus sets; \
                 {near_fallbacks} over {NEAR_SETS} rounded near-collinear sets"
            ),
        ),
    ];
    out.extend(pairs);
    Ok(out)
}

/// Quadrant sets of random cube pairs: the three pairwise inequalities and `|F_s| ≥ |Î|/16`.
pub fn quadrant_set_pairs(seed: u64) -> Result<Vec<Check>, LabError> {
    let (mut pair_slack, mut count_slack): (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut total_pairs = 0usize;
    for t in 0..CUBE_PAIRS {
        let mut r = rng(trial_seed(seed, 3100, t));
        let first: Vec<C64> = random_points(t % 8, &mut r).into_iter().map(|p| p.0).collect();
        let second: Vec<C64> = random_points((t / 8) % 8, &mut r).into_iter().map(|p| p.0).collect();
        let qs = quadrant_sets(&first, &second).map_err(compute)?;
        let chk = qs.check_pairs(&first, &second);
        let scale = 1.0 + first.iter().chain(&second).map(|z| z.norm()).fold(0.0, f64::max);
        pair_slack = pair_slack.max(chk.triangle.max(chk.real_part).max(chk.imag_part) / scale);
        total_pairs += chk.pairs;
        let smallest = qs.f_counts().into_iter().min().unwrap_or(0) as f64;
        count_slack = count_slack.min(smallest / second.len() as f64 - 1.0 / 16.0);
    }
    let mut c = Check::residual(
        "quadrant set inequalities",
        "|b(x) − α| ≤ 2|b(x) − b(x̂)|, |w| ≤ 2 Re w and |Im w| ≤ Re w on matched quadrant sets",
        pair_slack.max(0.0),
        1e-12,
    );
    c.worst = pair_slack;
    c.detail = format!("worst excess {pair_slack:.3e} over {total_pairs} matched pairs in {CUBE_PAIRS} cube pairs");
    Ok(vec![c, Check::slack("quadrant set sizes", "each F_s holds ≥ 1/16 of the second cube", count_slack, 1e-12)])
}

/// `B ⊆ Q` and `ℓ(Q) ≤ c_n ℓ(B)` for random boxes in the unit cube.
pub fn covering(seed: u64) -> Result<Check, LabError> {
    let mut worst: f64 = f64::INFINITY;
    let mut contained = true;
    let mut dilation = 0.0;
    for dim in [1usize, 2] {
        let fam = AdjacentFamily::new(dim);
        dilation = fam.dilation();
        let mut r = rng(trial_seed(seed, 3200, dim));
        for t in 0..COVER_BOXES {
            let side = if t % 5 == 0 { 10f64.powf(r.random_range(-6.0..-1.0)) } else { r.random_range(1e-3..0.5) };
            let lo: Vec<f64> = (0..dim).map(|_| r.random_range(0.0..1.0 - side)).collect();
            let b = AxisBox::new(lo, side);
            let q = fam.cover_cube(&b).map_err(compute)?;
            let qb = fam.cube_box(&q);
            let inside = (0..dim).all(|a| qb.lo[a] <= b.lo[a] + 1e-12 && b.lo[a] + b.side <= qb.lo[a] + qb.side + 1e-12);
            contained &= inside;
            worst = worst.min(dilation * side / qb.side - 1.0);
        }
    }
    Ok(Check::truth(
        "adjacent-grid covering",
        "every box B lies in an adjacent-grid cube Q with ℓ(Q) ≤ c_n ℓ(B)",
        contained && worst >= -1e-12,
        worst,
        format!("{COVER_BOXES} boxes per dimension, c_n = {dilation:.3} for dim 2, smallest c_n·ℓ(B)/ℓ(Q) − 1 = {worst:.3e}, containment {contained}"),
    ))
}
