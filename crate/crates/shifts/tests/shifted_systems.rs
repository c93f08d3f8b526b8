use dyadic_core::{DyadicParams, FiniteDyadicSystem, GridShift, Symbol};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use shifts::{assemble_shift, phi_blocks, random_shift};
use spectral::op_norm;

#[test]
fn shifted_systems_keep_every_identity() {
    for (dim, depth, code) in [(1usize, 4usize, 0b1011u64), (1, 5, 0b10110), (2, 2, 0b1001)] {
        let params = DyadicParams::new(2, depth, dim).unwrap();
        let sys = FiniteDyadicSystem::build(params, Some(GridShift::from_code(code, depth, dim))).unwrap();
        let vals: Vec<C64> = (0..sys.n_cells()).map(|x| C64::new((x as f64 * 0.37).sin(), (x as f64 * 0.11).cos())).collect();
        let f = dyadic_core::StepFunction::scalar(&vals);
        let b: Symbol = dyadic_core::haar_transform(&sys, &f).unwrap();
        for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let spec = random_shift(&sys, i, j, code + i as u64 * 7 + j as u64).unwrap();
            let s: DMatrix<C64> = assemble_shift(&sys, &spec).unwrap();
            assert!(op_norm(&s) <= 1.0 + 1e-10);
            let pb = phi_blocks(&sys, &spec, &b).unwrap();
            assert!(pb.assembly_residual() < 1e-12);
            assert!(pb.max_cross() < 1e-14);
            let (lhs, rhs) = pb.additivity(2.0);
            assert!((lhs - rhs).abs() < 1e-10 * lhs.max(1.0));
        }
    }
}
