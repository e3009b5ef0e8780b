use partlab::ensemble::{haar_sample, Group};
use partlab::estimate::Estimate;
use partlab::moments::{block_sum, trace_pairing_c};
use partlab::{CMatrix, Matrix, QMatrix, C64};
use partlab_core::npoly::qi;
use partlab_core::{enumerate_family, FamilyTag};
use proptest::prelude::*;

fn permutation_matrix(images: &[usize]) -> QMatrix {
    Matrix::from_fn(images.len(), |i, j| qi((images[i] == j) as i64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn estimate_merge_is_order_independent(xs in prop::collection::vec(-100i32..100, 1..40), cut in 0usize..40) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        let cut = cut.min(xs.len());
        let whole = Estimate::from_samples(xs.iter().copied());
        let a = Estimate::from_samples(xs[..cut].iter().copied());
        let b = Estimate::from_samples(xs[cut..].iter().copied());
        prop_assert_eq!(a.merge(&b), b.merge(&a));
        prop_assert_eq!(a.merge(&b).samples, whole.samples);
        prop_assert_eq!(a.merge(&b).sum, whole.sum);
    }

    #[test]
    fn trace_pairings_are_permutation_invariant(
        entries in prop::collection::vec(-3i64..=3, 18),
        images in Just((0..3usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let n = 3;
        let a: QMatrix = Matrix::from_fn(n, |i, j| qi(entries[i * n + j]));
        let b: QMatrix = Matrix::from_fn(n, |i, j| qi(entries[9 + i * n + j]));
        let g = permutation_matrix(&images);
        let gt = g.transpose();
        let conj = |m: &QMatrix| g.mul_naive(m).mul_naive(&gt);
        let (ca, cb) = (conj(&a), conj(&b));
        for p in enumerate_family(2, FamilyTag::P).unwrap() {
            prop_assert_eq!(
                block_sum(&p, &[&a, &b], u128::MAX).unwrap(),
                block_sum(&p, &[&ca, &cb], u128::MAX).unwrap()
            );
        }
    }

    #[test]
    fn permutation_pairings_are_unitarily_invariant(seed in any::<u64>(), entries in prop::collection::vec(-3.0f64..3.0, 32)) {
        let n = 4;
        let a = CMatrix::from_fn(n, |i, j| C64::new(entries[i * n + j], 0.0));
        let b = CMatrix::from_fn(n, |i, j| C64::new(entries[16 + i * n + j], 0.0));
        let u = haar_sample(Group::U, n, seed).unwrap();
        let conj = |m: &CMatrix| u.mul(m).mul(&u.adjoint());
        let (ca, cb) = (conj(&a), conj(&b));
        for s in enumerate_family(3, FamilyTag::S).unwrap() {
            let x = trace_pairing_c(&s, &[&a, &b, &a], u128::MAX).unwrap();
            let y = trace_pairing_c(&s, &[&ca, &cb, &ca], u128::MAX).unwrap();
            prop_assert!((x - y).norm() < 1e-9 * (1.0 + x.norm()));
        }
    }
}
