use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use sporadic::hermlinalg::{signature_exact, signature_float, HermForm, Mat3, Vec3};
use sporadic::spgroups::hermitian_form;
use sporadic::{CycNum, SporadicId, TriangleGroup};

const CONDUCTORS: [u64; 6] = [3, 4, 7, 12, 15, 24];

fn cyc(n: u64) -> impl Strategy<Value = CycNum> {
    (prop::collection::vec((0..n as i64, -6i64..=6), 0..5), 1i64..=4).prop_map(move |(terms, den)| {
        let terms: Vec<(i64, BigInt)> = terms.into_iter().map(|(k, c)| (k, BigInt::from(c))).collect();
        CycNum::from_terms(n, &terms, BigInt::from(den))
    })
}

fn triple() -> impl Strategy<Value = (CycNum, CycNum, CycNum)> {
    prop::sample::select(CONDUCTORS.to_vec()).prop_flat_map(|n| (cyc(n), cyc(n), cyc(n)))
}

fn mat() -> impl Strategy<Value = Mat3<CycNum>> {
    prop::sample::select(vec![4u64, 12]).prop_flat_map(|n| prop::collection::vec(cyc(n), 9)).prop_map(|e| {
        Mat3::from_rows([
            [e[0].clone(), e[1].clone(), e[2].clone()],
            [e[3].clone(), e[4].clone(), e[5].clone()],
            [e[6].clone(), e[7].clone(), e[8].clone()],
        ])
    })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&(&a - &b) + &b) == a);
    }

    #[test]
    fn inverse_is_exact(a in prop::sample::select(vec![5u64, 8, 12]).prop_flat_map(cyc)) {
        prop_assume!(!a.is_zero());
        let inv = a.inv().unwrap();
        prop_assert!((&a * &inv).is_one());
    }

    #[test]
    fn embedding_is_a_homomorphism((a, b, _) in triple()) {
        prop_assert!(close((&a * &b).to_c64(), a.to_c64() * b.to_c64()));
        prop_assert!(close((&a + &b).to_c64(), a.to_c64() + b.to_c64()));
        prop_assert!(close(a.conj().to_c64(), a.to_c64().conj()));
    }

    #[test]
    fn conjugation_and_galois((a, b, _) in triple(), t in 1i64..60) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        let n = a.conductor() as i64;
        prop_assume!(num_integer::Integer::gcd(&t, &n) == 1);
        let g = |x: &CycNum| x.galois_apply(t).unwrap();
        prop_assert_eq!(g(&(&a * &b)), &g(&a) * &g(&b));
        prop_assert_eq!(g(&a.conj()), g(&a).conj());
    }

    #[test]
    fn norm_is_real_and_nonnegative((a, _, _) in triple()) {
        let n = a.norm_sq();
        prop_assert_eq!(n.conj(), n.clone());
        prop_assert!(n.real_sign() != std::cmp::Ordering::Less);
        prop_assert_eq!(n.is_zero(), a.is_zero());
    }

    #[test]
    fn adjugate_times_matrix_is_det(m in mat()) {
        let d = m.det();
        prop_assert_eq!(m.mul(&m.adjugate()), Mat3::scalar(&d));
        prop_assert_eq!(m.adjugate().mul(&m), Mat3::scalar(&d));
    }

    #[test]
    fn det_is_multiplicative(a in mat(), b in mat()) {
        prop_assert_eq!(a.mul(&b).det(), &a.det() * &b.det());
    }

    #[test]
    fn exact_and_float_signatures_agree(p in 3u32..30, which in 0usize..18) {
        let id = SporadicId::all()[which];
        let h = hermitian_form(p, &sporadic::spgroups::sporadic(id).value);
        let exact = signature_exact(&h);
        if exact.zero == 0 {
            prop_assert_eq!(signature_float(&h.to_c64(), 1e-9).unwrap(), exact);
        }
    }

    #[test]
    fn generated_words_preserve_the_form(word in "[123J]{1,8}") {
        let g = TriangleGroup::sporadic(5, "sigma4bar".parse().unwrap()).unwrap();
        let m = g.eval_str(&word).unwrap();
        let lhs = m.conj_transpose().mul(&g.form.matrix).mul(&m);
        prop_assert_eq!(lhs, g.form.matrix.clone());
    }

    #[test]
    fn hermitian_symmetry(a in prop::collection::vec(-3i64..=3, 6), b in prop::collection::vec(-3i64..=3, 6)) {
        let g = TriangleGroup::sporadic(3, "sigma4bar".parse().unwrap()).unwrap();
        let n = g.field;
        let v = |c: &[i64]| Vec3::new(
            CycNum::from_terms(n, &[(0, BigInt::from(c[0])), (1, BigInt::from(c[1]))], BigInt::from(1)),
            CycNum::from_terms(n, &[(0, BigInt::from(c[2])), (2, BigInt::from(c[3]))], BigInt::from(1)),
            CycNum::from_terms(n, &[(0, BigInt::from(c[4])), (3, BigInt::from(c[5]))], BigInt::from(1)),
        );
        let (x, y) = (v(&a), v(&b));
        let h: &HermForm<CycNum> = &g.form;
        prop_assert_eq!(h.inner(&x, &y), h.inner(&y, &x).conj());
    }
}
