use noncommutative::car::{car_paraproduct, car_transference_check, word_sign, CarAlgebra};
use noncommutative::tensor::{eta_lambda, index_word, tensor_paraproduct, word_index, TensorAlgebra};
use noncommutative::C64;
use proptest::prelude::*;

fn coeffs(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn car_transference(bhat in coeffs(8), p in 1.0f64..4.0) {
        let alg = CarAlgebra::new(3).unwrap();
        let t = car_transference_check(&alg, &bhat, p).unwrap();
        prop_assert!(t.residual < 1e-8 * (1.0 + t.scalar_side));
    }

    #[test]
    fn car_paraproduct_is_linear(x in coeffs(8), y in coeffs(8), s in -2.0f64..2.0) {
        let sum: Vec<C64> = x.iter().zip(&y).map(|(a, b)| a * s + b).collect();
        let lhs = car_paraproduct(&sum, 3).unwrap();
        let rhs = car_paraproduct(&x, 3).unwrap() * C64::new(s, 0.0) + car_paraproduct(&y, 3).unwrap();
        let gap = spectral::max_abs(&(lhs - rhs));
        prop_assert!(gap < 1e-12);
    }

    #[test]
    fn sign_is_symmetric_up_to_conjugation(a in 0usize..64, b in 0usize..64) {
        // (c_A c_B^*)^* = c_B c_A^*
        let alg = CarAlgebra::new(6).unwrap();
        let lhs = word_sign(a, b);
        let rhs = word_sign(b, a);
        let w = alg.word(a ^ b).unwrap();
        let back = spectral::max_abs(&(w.adjoint() - w * C64::new(lhs * rhs, 0.0)));
        prop_assert!(back < 1e-12);
    }

    #[test]
    fn tensor_eta_inverse(a in 0usize..81, b in 0usize..81) {
        // U_α U_β^* = λ U_η and U_β U_α^* = (λ U_η)^*.
        let d = 3;
        let alg = TensorAlgebra::new(d, 2).unwrap();
        let (wa, wb) = (index_word(a, d), index_word(b, d));
        let (eta, lambda) = eta_lambda(&wa, &wb, d);
        let (eta2, lambda2) = eta_lambda(&wb, &wa, d);
        let u = alg.word(word_index(&eta, d)).unwrap() * lambda;
        let v = alg.word(word_index(&eta2, d)).unwrap() * lambda2;
        let gap = spectral::max_abs(&(u.adjoint() - v));
        prop_assert!(gap < 1e-12);
    }

    #[test]
    fn tensor_paraproduct_is_strictly_lower(bhat in coeffs(16)) {
        let m = tensor_paraproduct(&bhat, 2, 2).unwrap();
        let alg = TensorAlgebra::new(2, 2).unwrap();
        let mut leak = 0.0f64;
        for a in 0..16 {
            for b in 0..16 {
                if alg.max_of(a) <= alg.max_of(b) {
                    leak = leak.max(m[(a, b)].norm());
                }
            }
        }
        prop_assert!(leak == 0.0);
    }
}
