//! Far-point probe for non-degenerate kernels.

use crate::{distance, KernelError, KernelSpec, Nondegeneracy, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub y0: Vec<f64>,
    pub distance: f64,
    /// Distance bracket `[Ar, (c0 C)^{1/n} Ar]`, collapsed to `Ar` for homogeneous kernels.
    pub bracket: (f64, f64),
    pub k0: C64,
    /// `|K(y0, x0)|·(Ar)^n`.
    pub scaled: f64,
    /// `max |K(y1, x1) − K(y0, x0)|·A^{n+α} r^n` over the sample pairs.
    pub difference: f64,
    /// `max |Im| / Re` of `e^{iθ1} K(y1, x1)` after rotating `K(y0, x0)` to the positive axis.
    pub rho: f64,
    /// `δ/(1 − δ)` with `δ = max |K(y1, x1) − K(y0, x0)| / |K(y0, x0)|`; bounds `rho`.
    pub rho_bound: f64,
    /// `|K(y1, x1)| ≤ 2 Re(e^{iθ1} K(y1, x1))` at every sample pair.
    pub two_re: bool,
    pub samples: usize,
}

fn directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..128).map(|t| {
            let a = t as f64 * std::f64::consts::PI / 64.0;
            vec![a.cos(), a.sin()]
        }).collect(),
        _ => {
            let mut out = Vec::new();
            for j in 0..dim {
                for s in [1.0, -1.0] {
                    let mut v = vec![0.0; dim];
                    v[j] = s;
                    out.push(v);
                }
            }
            out.push(vec![1.0 / (dim as f64).sqrt(); dim]);
            out
        }
    }
}

/// Points of the closed ball `B(c, r)` on a lattice of spacing `r/4` (`r/2` beyond two dimensions).
pub(crate) fn ball_samples(c: &[f64], r: f64) -> Vec<Vec<f64>> {
    let steps: i32 = if c.len() <= 2 { 4 } else { 2 };
    let mut pts = vec![Vec::new()];
    for _ in 0..c.len() {
        pts = pts.into_iter().flat_map(|p: Vec<i32>| (-steps..=steps).map(move |t| [p.clone(), vec![t]].concat())).collect();
    }
    pts.into_iter()
        .filter(|p| p.iter().map(|&t| (t * t) as i64).sum::<i64>() <= (steps * steps) as i64)
        .map(|p| c.iter().zip(&p).map(|(a, &t)| a + r * t as f64 / steps as f64).collect())
        .collect()
}

pub fn nondegenerate_probe(k: &KernelSpec, x0: &[f64], r: f64, a: f64) -> Result<ProbeReport, KernelError> {
    if a < 3.0 || !(r > 0.0) || x0.len() != k.dim {
        return Err(KernelError::Geometry(format!("need A ≥ 3, r > 0 and a point in dimension {}", k.dim)));
    }
    let n = k.dim as i32;
    let reach = a * r;
    let (y0, bracket) = match &k.nondegeneracy {
        Nondegeneracy::Homogeneous { theta0, .. } => (x0.iter().zip(theta0).map(|(x, t)| x + reach * t).collect::<Vec<f64>>(), (reach, reach)),
        Nondegeneracy::Pointwise { c0 } => {
            let top = (c0 * k.c).powf(1.0 / k.dim as f64).max(1.0);
            let floor = 1.0 / (c0 * reach.powi(n));
            let mut best = 0.0f64;
            let mut found = None;
            'search: for t in 0..=64 {
                let rho = reach * (1.0 + (top - 1.0) * t as f64 / 64.0);
                for u in directions(k.dim) {
                    let y: Vec<f64> = x0.iter().zip(&u).map(|(x, d)| x + rho * d).collect();
                    let v = k.evaluate(&y, x0).norm();
                    best = best.max(v * reach.powi(n));
                    if v >= floor {
                        found = Some(y);
                        break 'search;
                    }
                }
            }
            (found.ok_or(KernelError::ProbeFailed { best })?, (reach, top * reach))
        }
    };
    let k0 = k.evaluate(&y0, x0);
    if k0.norm() == 0.0 || !k0.norm().is_finite() {
        return Err(KernelError::ProbeFailed { best: k0.norm() * reach.powi(n) });
    }
    let rot = k0.conj() / k0.norm();
    let (mut diff, mut rho, mut two_re, mut samples) = (0.0f64, 0.0f64, true, 0);
    let ys = ball_samples(&y0, r);
    for x1 in ball_samples(x0, r) {
        for y1 in &ys {
            let v = k.evaluate(y1, &x1);
            let w = rot * v;
            diff = diff.max((v - k0).norm());
            rho = rho.max(if w.re > 0.0 { w.im.abs() / w.re } else { f64::INFINITY });
            two_re &= v.norm() <= 2.0 * w.re;
            samples += 1;
        }
    }
    let delta = diff / k0.norm();
    Ok(ProbeReport {
        distance: distance(x0, &y0),
        y0,
        bracket,
        k0,
        scaled: k0.norm() * reach.powi(n),
        difference: diff * a.powf(k.dim as f64 + k.alpha) * r.powi(n),
        rho,
        rho_bound: if delta < 1.0 { delta / (1.0 - delta) } else { f64::INFINITY },
        two_re,
        samples,
    })
}
