//! Decomposition `f = g·T(h) − h·(T^*g)^* + f̃` with `g = 1_{Q̃}`,
//! `h = −f/(T^*g)^*` on `Q` and `f̃ = −g·T(h)`.

use crate::{nondegenerate_probe, CellCube, GridOperator, KernelError, KernelSpec, ProbeReport, C64};

#[derive(Debug, Clone)]
pub struct Factorization {
    pub g: Vec<C64>,
    pub h: Vec<C64>,
    pub f_tilde: Vec<C64>,
    /// `max |f − (g T h − h (T^*g)^* + f̃)|`.
    pub residual: f64,
    /// `∫_{Q̃} f̃`.
    pub tilde_mean: C64,
    /// `min_Q |T^*g|`.
    pub min_adjoint: f64,
    pub h_ratio: f64,
    pub tilde_ratio: f64,
}

/// Cube of the same side as `q` whose centre is the cell nearest the probe point.
pub fn partner_cube(k: &KernelSpec, t: &GridOperator, q: &CellCube, a: f64) -> Result<(CellCube, ProbeReport), KernelError> {
    let grid = &t.grid;
    let ell = q.side_length(grid);
    let probe = nondegenerate_probe(k, &q.center(grid), ell * (grid.dim() as f64).sqrt() / 2.0, a)?;
    let mut start = Vec::with_capacity(grid.dim());
    for (axis, y) in probe.y0.iter().enumerate() {
        let s = ((y - grid.lo[axis]) / grid.cell - q.side as f64 / 2.0).round();
        if s < 0.0 {
            return Err(KernelError::Geometry(format!("partner cube leaves the window for A = {a}")));
        }
        start.push(s as usize);
    }
    let partner = CellCube { start, side: q.side };
    if !partner.fits(grid) || !partner.disjoint(q) {
        return Err(KernelError::Geometry(format!("partner cube for A = {a} is outside the window or overlaps Q")));
    }
    Ok((partner, probe))
}

pub fn weak_factorization(f: &[C64], q: &CellCube, q_tilde: &CellCube, t: &GridOperator) -> Result<Factorization, KernelError> {
    let grid = &t.grid;
    let n = grid.n_cells();
    if f.len() != n || !q.fits(grid) || !q_tilde.fits(grid) || !q.disjoint(q_tilde) {
        return Err(KernelError::Geometry("Q and Q̃ must be disjoint cubes inside the grid".into()));
    }
    let in_q = {
        let mut v = vec![false; n];
        q.cells(grid).into_iter().for_each(|c| v[c] = true);
        v
    };
    let scale = f.iter().map(|z| z.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    if f.iter().zip(&in_q).any(|(z, inside)| !inside && *z != C64::new(0.0, 0.0)) {
        return Err(KernelError::Input("f has mass outside Q".into()));
    }
    if grid.integral(f).norm() > 1e-12 * scale * grid.volume() {
        return Err(KernelError::Input(format!("∫ f = {}", grid.integral(f))));
    }
    let mut g = vec![C64::new(0.0, 0.0); n];
    q_tilde.cells(grid).into_iter().for_each(|c| g[c] = C64::new(1.0, 0.0));
    let tg = t.adjoint_apply(&g);
    let min_adjoint = q.cells(grid).into_iter().map(|c| tg[c].norm()).fold(f64::INFINITY, f64::min);
    if !(min_adjoint > 1e-300) {
        return Err(KernelError::AdjointVanishes(min_adjoint));
    }
    let h: Vec<C64> = (0..n).map(|c| if in_q[c] { -f[c] / tg[c].conj() } else { C64::new(0.0, 0.0) }).collect();
    let th = t.apply(&h);
    let f_tilde: Vec<C64> = (0..n).map(|c| -g[c] * th[c]).collect();
    let residual = (0..n).map(|c| (f[c] - (g[c] * th[c] - h[c] * tg[c].conj() + f_tilde[c])).norm()).fold(0.0, f64::max);
    let norm_f = grid.l2(f);
    let ratio = |v: &[C64]| if norm_f > 0.0 { grid.l2(v) / norm_f } else { 0.0 };
    Ok(Factorization {
        tilde_mean: grid.integral(&f_tilde),
        min_adjoint,
        h_ratio: ratio(&h),
        tilde_ratio: ratio(&f_tilde),
        residual,
        g,
        h,
        f_tilde,
    })
}
