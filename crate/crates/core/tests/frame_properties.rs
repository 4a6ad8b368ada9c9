use proptest::prelude::*;
use racah_frames::frame::{
    check_conjugation, devectorize, expand, quadratic_residuals, reconstruct, vectorize, FrameVector,
};
use racah_frames::linalg::{max_abs_diff, CMatrix, C64};
use racah_frames::tensor::{check_coupling, couple, basis};

fn matrix(two_j: u32, entries: &[(f64, f64)]) -> CMatrix {
    let d = two_j as usize + 1;
    CMatrix::from_fn(d, d, |r, c| {
        let (re, im) = entries[(r * d + c) % entries.len()];
        C64::new(re, im)
    })
}

fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 81)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expansion_round_trip(two_j in 0u32..=8, e in entries()) {
        let a = matrix(two_j, &e);
        let c = expand(&a, two_j).unwrap();
        prop_assert!(max_abs_diff(&reconstruct(&c), &a) < 1e-12);
        let again = expand(&reconstruct(&c), two_j).unwrap();
        let dev = c.coeffs.iter().zip(&again.coeffs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-12);
    }

    #[test]
    fn vector_round_trip(two_j in 0u32..=8, e in entries()) {
        let n = (two_j as usize + 1).pow(2);
        let v = FrameVector { two_j, components: (0..n).map(|i| C64::new(e[i % 81].0, e[i % 81].1)).collect() };
        let c = devectorize(&v, "").unwrap();
        let w = vectorize(&c);
        let dev = v.components.iter().zip(&w.components).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-12);
    }

    #[test]
    fn hermitian_operators_obey_conjugation(two_j in 0u32..=6, e in entries()) {
        let a = matrix(two_j, &e);
        let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        prop_assert!(check_conjugation(&expand(&h, two_j).unwrap(), 1e-12).pass);
    }

    #[test]
    fn k0_equation_is_the_normalization(two_j in 0u32..=5, e in entries()) {
        let a = matrix(two_j, &e);
        let mut h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        // shift to a nonzero trace, then normalize it to one
        for i in 0..=two_j as usize { h[(i, i)] += C64::new(3.0, 0.0); }
        let h = &h / h.trace();
        let c = expand(&h, two_j).unwrap();
        let norm = vectorize(&c).norm_sqr();
        let d = (two_j + 1) as f64;
        prop_assert!((quadratic_residuals(&c)[0] - C64::new((1.0 - norm) / d.sqrt(), 0.0)).norm() < 1e-10 * norm.max(1.0));
    }

    #[test]
    fn couple_reconstructs_products(two_j in 0u32..=8, i in 0usize..81, k in 0usize..81) {
        let b = basis(two_j);
        let n = b.tensors.len();
        let (u, v) = (&b.tensors[i % n], &b.tensors[k % n]);
        let c = couple(two_j, u.k, u.q, v.k, v.q).unwrap();
        prop_assert!(max_abs_diff(&reconstruct(&c), &(&u.matrix * &v.matrix)) < 1e-12);
    }
}

#[test]
fn coupling_relation_all_pairs_small_spins() {
    for two_j in 0..=4 {
        let c = check_coupling(two_j, 1e-12);
        assert!(c.pass, "{c:?}");
    }
}
