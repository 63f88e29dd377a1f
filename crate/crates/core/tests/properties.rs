//! Property tests for the algebraic invariants: round trips, bilinearity,
//! transpose rules, product associativity/distributivity, t-SVD factor
//! properties, Parseval consistency, and trace/norm identities.

use proptest::prelude::*;

use tcomp_core::algebra::{
    conj_transpose, identity_tensor, is_orthogonal, off_fdiagonal_mass, t_product, t_svd,
    tensor_nuclear_norm, truncated_norm,
};
use tcomp_core::spectral::{dft_mode3, idft_mode3};
use tcomp_core::tensor::Tensor3;

fn tensor_strategy(
    max1: usize,
    max2: usize,
    max3: usize,
) -> impl Strategy<Value = Tensor3> {
    (1..=max1, 1..=max2, 1..=max3).prop_flat_map(|(n1, n2, n3)| {
        prop::collection::vec(-10.0f64..10.0, n1 * n2 * n3)
            .prop_map(move |data| Tensor3::from_data(n1, n2, n3, data).unwrap())
    })
}

/// Pair of tensors with compatible product shapes and matching tube length.
fn product_pair() -> impl Strategy<Value = (Tensor3, Tensor3)> {
    (1usize..=4, 1usize..=4, 1usize..=4, 1usize..=4).prop_flat_map(|(n1, n2, n4, n3)| {
        let a = prop::collection::vec(-10.0f64..10.0, n1 * n2 * n3)
            .prop_map(move |d| Tensor3::from_data(n1, n2, n3, d).unwrap());
        let b = prop::collection::vec(-10.0f64..10.0, n2 * n4 * n3)
            .prop_map(move |d| Tensor3::from_data(n2, n4, n3, d).unwrap());
        (a, b)
    })
}

fn rel(err: f64, scale: f64) -> f64 {
    err / scale.max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fold_unfold_round_trip(t in tensor_strategy(5, 5, 5)) {
        let back = Tensor3::fold(&t.unfold(), t.dims()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn dft_idft_round_trip(t in tensor_strategy(4, 4, 6)) {
        let back = idft_mode3(&dft_mode3(&t)).unwrap();
        prop_assert!((&back - &t).fro_norm() <= 1e-10 * t.fro_norm().max(1.0));
    }

    #[test]
    fn parseval_holds(t in tensor_strategy(4, 4, 6)) {
        let s = dft_mode3(&t);
        let lhs = t.fro_norm().powi(2);
        let rhs = s.fro_norm().powi(2) / t.dims().2 as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
    }

    #[test]
    fn inner_is_symmetric_bilinear(t in tensor_strategy(3, 3, 3), alpha in -3.0f64..3.0) {
        let (n1, n2, n3) = t.dims();
        let u = Tensor3::from_fn(n1, n2, n3, |i, j, k| ((i + 2*j + 3*k) as f64).sin());
        let v = Tensor3::from_fn(n1, n2, n3, |i, j, k| ((2*i + j) as f64 - k as f64) * 0.1);

        prop_assert_eq!(t.inner(&u).unwrap(), u.inner(&t).unwrap());

        let lin = t.inner(&u.add_scaled(&v, alpha)).unwrap();
        let split = t.inner(&u).unwrap() + alpha * t.inner(&v).unwrap();
        let scale = t.fro_norm() * (u.fro_norm() + alpha.abs() * v.fro_norm());
        prop_assert!((lin - split).abs() <= 1e-12 * scale.max(1.0));

        let self_inner = t.inner(&t).unwrap();
        prop_assert!(self_inner >= 0.0);
        if t.fro_norm() > 0.0 {
            prop_assert!(self_inner > 0.0);
        }
    }

    #[test]
    fn bcirc_of_identity_is_identity((n, n3) in (1usize..=4, 1usize..=4)) {
        let id = identity_tensor(n, n3);
        prop_assert_eq!(id.bcirc(), tcomp_core::Matrix::identity(n * n3, n * n3));
    }

    #[test]
    fn product_matches_bcirc_oracle((a, b) in product_pair()) {
        let got = t_product(&a, &b).unwrap();
        let (n1, _, n3) = a.dims();
        let (_, n4, _) = b.dims();
        let oracle = Tensor3::fold(&(a.bcirc() * b.unfold()), (n1, n4, n3)).unwrap();
        prop_assert!(rel((&got - &oracle).fro_norm(), oracle.fro_norm()) <= 1e-8);
    }

    #[test]
    fn product_transpose_rule((a, b) in product_pair()) {
        let lhs = conj_transpose(&t_product(&a, &b).unwrap());
        let rhs = t_product(&conj_transpose(&b), &conj_transpose(&a)).unwrap();
        prop_assert!(rel((&lhs - &rhs).fro_norm(), rhs.fro_norm()) <= 1e-8);
    }

    #[test]
    fn product_is_associative(
        a in tensor_strategy(3, 3, 3),
    ) {
        let (n1, n2, n3) = a.dims();
        let b = Tensor3::from_fn(n2, 3, n3, |i, j, k| ((i * j + k) as f64).cos());
        let c = Tensor3::from_fn(3, 2, n3, |i, j, k| (i + j + k) as f64 * 0.2 - 1.0);
        let lhs = t_product(&t_product(&a, &b).unwrap(), &c).unwrap();
        let rhs = t_product(&a, &t_product(&b, &c).unwrap()).unwrap();
        let scale = a.fro_norm() * b.fro_norm() * c.fro_norm() * n1 as f64;
        prop_assert!((&lhs - &rhs).fro_norm() <= 1e-7 * scale.max(1.0));
    }

    #[test]
    fn product_distributes_over_addition(a in tensor_strategy(3, 3, 3)) {
        let (_, n2, n3) = a.dims();
        let b = Tensor3::from_fn(n2, 2, n3, |i, j, k| ((3 * i + j) as f64).sin() + k as f64 * 0.1);
        let c = Tensor3::from_fn(n2, 2, n3, |i, j, k| ((i + 5 * j + 2 * k) as f64).cos());
        let lhs = t_product(&a, &(&b + &c)).unwrap();
        let rhs = &t_product(&a, &b).unwrap() + &t_product(&a, &c).unwrap();
        let scale = a.fro_norm() * (b.fro_norm() + c.fro_norm());
        prop_assert!((&lhs - &rhs).fro_norm() <= 1e-8 * scale.max(1.0));
    }

    #[test]
    fn transpose_is_involution(t in tensor_strategy(4, 4, 5)) {
        prop_assert_eq!(conj_transpose(&conj_transpose(&t)), t);
    }

    #[test]
    fn tsvd_factor_invariants(a in tensor_strategy(4, 4, 4)) {
        let (n1, n2, _) = a.dims();
        let f = t_svd(&a).unwrap();

        let recon = t_product(&t_product(&f.u, &f.s).unwrap(), &conj_transpose(&f.v)).unwrap();
        prop_assert!((&recon - &a).fro_norm() <= 1e-8 * a.fro_norm().max(1e-300));

        prop_assert!(is_orthogonal(&f.u, 1e-8 * (n1 as f64).sqrt()).unwrap());
        prop_assert!(is_orthogonal(&f.v, 1e-8 * (n2 as f64).sqrt()).unwrap());
        prop_assert!(off_fdiagonal_mass(&f.s) <= 1e-10 * f.s.fro_norm().max(1e-300));

        for sv in f.spectral_singular_values() {
            prop_assert!(sv.iter().all(|&x| x >= 0.0));
            prop_assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn trace_identity_for_products(a in tensor_strategy(4, 4, 4)) {
        // tr(a ∗ b) equals the matrix trace of the product of slice sums;
        // left side evaluated through the block-circulant oracle.
        let (n1, n2, n3) = a.dims();
        let b = Tensor3::from_fn(n2, n1, n3, |i, j, k| {
            ((i * 3 + j * 5 + k * 7) as f64).sin() * 2.0
        });
        let prod = Tensor3::fold(&(a.bcirc() * b.unfold()), (n1, n1, n3)).unwrap();
        let lhs = prod.trace().unwrap();
        let rhs = (a.slice_sum() * b.slice_sum()).trace();
        let scale = a.fro_norm() * b.fro_norm() * n3 as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-8 * scale.max(1.0));
    }

    #[test]
    fn nuclear_norm_identity(t in tensor_strategy(4, 4, 4)) {
        // diagonal sum of the (possibly rectangular) f-diagonal factor
        // against the one-SVD fast path
        let f = t_svd(&t).unwrap();
        let (s1, s2, s3) = f.s.dims();
        let mut trace_s = 0.0;
        for k in 1..=s3 {
            for d in 1..=s1.min(s2) {
                trace_s += f.s.get(d, d, k);
            }
        }
        let fast = tensor_nuclear_norm(&t);
        prop_assert!((trace_s - fast).abs() <= 1e-8 * fast.max(1.0));
    }

    #[test]
    fn truncated_norm_nonincreasing(t in tensor_strategy(4, 4, 3)) {
        let (n1, n2, _) = t.dims();
        let mut prev = f64::INFINITY;
        for r in 0..=n1.min(n2) {
            let v = truncated_norm(&t, r).unwrap();
            prop_assert!(v <= prev);
            prev = v;
        }
        prop_assert_eq!(truncated_norm(&t, 0).unwrap(), tensor_nuclear_norm(&t));
    }
}
