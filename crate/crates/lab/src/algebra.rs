//! Transference equalities and the algebraic relations behind them.

use crate::random::{rng, trial_seed, unit_complex};
use crate::{compute, Check, LabError, CMat, C64, EXACT_TOL, TRANSFER_TOL};
use noncommutative::car::{car_generators, car_paraproduct, car_transference_check, pauli, CarAlgebra};
use noncommutative::tensor::{eta_lambda, index_word, tensor_basis, tensor_paraproduct, tensor_transference_check, word_index, TensorAlgebra};
use spectral::max_abs;

const PS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

fn coeffs(len: usize, seed: u64) -> Vec<C64> {
    let mut r = rng(seed);
    (0..len).map(|_| unit_complex(&mut r)).collect()
}

/// Scalar-side and Walsh-side norms agree, and the algebra route rebuilds the scalar matrix.
pub fn transference(seed: u64) -> Result<Vec<Check>, LabError> {
    let (mut car, mut car_route, mut tensor, mut tensor_route): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for n in 1..=3usize {
        let alg = CarAlgebra::new(n).map_err(compute)?;
        for t in 0..4 {
            let bhat = coeffs(1 << n, trial_seed(seed, 2000 + n as u64, t));
            let direct = car_paraproduct(&bhat, n).map_err(compute)?;
            car_route = car_route.max(max_abs(&(&direct - alg.paraproduct_from_algebra(&bhat).map_err(compute)?)));
            for p in PS {
                let tr = car_transference_check(&alg, &bhat, p).map_err(compute)?;
                car = car.max(tr.residual / tr.scalar_side.max(1.0));
            }
        }
    }
    for (d, n, reps) in [(2usize, 1usize, 4usize), (2, 2, 3), (2, 3, 2), (3, 1, 4), (3, 2, 2)] {
        let alg = TensorAlgebra::new(d, n).map_err(compute)?;
        for t in 0..reps {
            let bhat = coeffs(alg.basis_len(), trial_seed(seed, 2100 + (d * 10 + n) as u64, t));
            let direct = tensor_paraproduct(&bhat, d, n).map_err(compute)?;
            tensor_route = tensor_route.max(max_abs(&(&direct - alg.paraproduct_from_algebra(&bhat).map_err(compute)?)));
            for p in PS {
                let tr = tensor_transference_check(&alg, &bhat, p).map_err(compute)?;
                tensor = tensor.max(tr.residual / tr.scalar_side.max(1.0));
            }
        }
    }
    Ok(vec![
        Check::residual("CAR transference", "‖[π_b̃]‖_p = ‖π_b‖_p for CAR-valued symbols, n ≤ 3", car, TRANSFER_TOL),
        Check::residual("CAR paraproduct routes agree", "Walsh-model matrix equals the algebra filtration sum", car_route, EXACT_TOL),
        Check::residual("tensor transference", "‖[π_b̃]‖_p = ‖π_b‖_p for M_d^{⊗n}-valued symbols, n ≤ 3", tensor, TRANSFER_TOL),
        Check::residual("tensor paraproduct routes agree", "d²-adic matrix equals the algebra filtration sum", tensor_route, EXACT_TOL),
    ])
}

/// `c_j c_k + c_k c_j = 2δ_{jk}`, self-adjoint generators, and the Pauli products.
pub fn car_relations() -> Result<Check, LabError> {
    let mut res: f64 = 0.0;
    for n in 1..=4usize {
        let gens = car_generators(n).map_err(compute)?;
        let dim = gens[0].nrows();
        for (j, a) in gens.iter().enumerate() {
            res = res.max(max_abs(&(a - a.adjoint())));
            for (k, b) in gens.iter().enumerate() {
                let want = if j == k { CMat::identity(dim, dim) * C64::new(2.0, 0.0) } else { CMat::zeros(dim, dim) };
                res = res.max(max_abs(&(a * b + b * a - want)));
            }
        }
    }
    let [s0, s1, s2] = pauli();
    let i = C64::new(0.0, 1.0);
    res = res.max(max_abs(&(&s1 * &s2 - &s0 * i)));
    res = res.max(max_abs(&(&s1 * &s2 + &s2 * &s1)));
    Ok(Check::residual("CAR relations", "c_jc_k + c_kc_j = 2δ_{jk}, generators self-adjoint", res, EXACT_TOL))
}

/// `U_{(i,j)}` straight from its definition, as an independent oracle.
fn clock_shift(i: usize, j: usize, d: usize) -> CMat {
    let w = |e: usize| C64::from_polar(1.0, std::f64::consts::TAU * (e % d) as f64 / d as f64);
    let mut u = CMat::zeros(d, d);
    for l in 1..=d {
        u[(l - 1, (l + j - 1) % d)] = w(i * l);
    }
    u
}

fn root(d: usize, e: i64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * e.rem_euclid(d as i64) as f64 / d as f64)
}

fn wrap(v: i64, d: usize) -> usize {
    let r = v.rem_euclid(d as i64) as usize;
    if r == 0 {
        d
    } else {
        r
    }
}

/// Adjoint and product rules of the clock-shift basis for every index, d ∈ {2..5}.
pub fn clock_shift_rules() -> Result<Check, LabError> {
    let mut res: f64 = 0.0;
    for d in 2..=5usize {
        for i in 1..=d {
            for j in 1..=d {
                let u = clock_shift(i, j, d);
                res = res.max(max_abs(&(&u - tensor_basis(i, j, d).map_err(compute)?)));
                let adj = clock_shift(wrap(-(i as i64), d), wrap(-(j as i64), d), d) * root(d, (i * j) as i64);
                res = res.max(max_abs(&(u.adjoint() - adj)));
                for k in 1..=d {
                    for l in 1..=d {
                        let prod = clock_shift(wrap((i + k) as i64, d), wrap((j + l) as i64, d), d) * root(d, (j * k) as i64);
                        res = res.max(max_abs(&(&u * clock_shift(k, l, d) - prod)));
                    }
                }
            }
        }
    }
    Ok(Check::residual("clock-shift basis rules", "U^*_{(i,j)} = ω^{ij}U_{(−i,−j)}, U_{(i,j)}U_{(k,l)} = ω^{jk}U_{(i+k,j+l)}", res, EXACT_TOL))
}

/// `U_α U_β^* = λ U_η` with `|λ| = 1` for every pair of words, against Kronecker products.
pub fn word_products() -> Result<Check, LabError> {
    let mut res: f64 = 0.0;
    let mut modulus: f64 = 0.0;
    let mut pairs = 0usize;
    for (d, n) in [(2usize, 2usize), (3, 2), (2, 3)] {
        let total = (d * d).pow(n as u32);
        let words: Vec<CMat> = (0..total)
            .map(|idx| {
                let mut w = index_word(idx, d);
                w.resize(n, (d, d));
                w.iter().fold(CMat::identity(1, 1), |acc, &(i, j)| acc.kronecker(&clock_shift(i, j, d)))
            })
            .collect();
        for a in 0..total {
            for b in 0..total {
                let (eta, lambda) = eta_lambda(&index_word(a, d), &index_word(b, d), d);
                let got = &words[word_index(&eta, d)] * lambda;
                res = res.max(max_abs(&(&words[a] * words[b].adjoint() - got)));
                modulus = modulus.max((lambda.norm() - 1.0).abs());
                pairs += 1;
            }
        }
    }
    let mut c = Check::residual("word product phases", "U_αU_β^* = λ_{α,β}U_{η_{α,β}} with |λ| = 1", res.max(modulus), EXACT_TOL);
    c.detail = format!("{} over {pairs} pairs", c.detail);
    Ok(c)
}

/// Criterion group 5.
pub fn algebra_suite(seed: u64) -> Result<Vec<Check>, LabError> {
    let mut out = transference(seed)?;
    out.push(car_relations()?);
    out.push(clock_shift_rules()?);
    out.push(word_products()?);
    Ok(out)
}
