//! Property tests for the anisotropic distance.

use mnl_core::Anisotropy;
use proptest::prelude::*;

fn weights(n: usize) -> impl Strategy<Value = Anisotropy> {
    prop::collection::vec(prop_oneof![Just(1.0), Just(2.0), 1.0f64..4.0], n).prop_map(|a| Anisotropy::new(a).unwrap())
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -1e3f64..1e3, -1e-3f64..1e-3], n)
}

fn case() -> impl Strategy<Value = (Anisotropy, Vec<f64>, Vec<f64>)> {
    (1usize..=4).prop_flat_map(|n| (weights(n), point(n), point(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn prop_homogeneity((a, x, _) in case(), t in 0.1f64..10.0) {
        let lhs = a.distance(&a.dilate(t, &x).unwrap()).unwrap();
        let rhs = t * a.distance(&x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn prop_triangle((a, x, y) in case()) {
        let sum: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        let lhs = a.distance(&sum).unwrap();
        let rhs = a.distance(&x).unwrap() + a.distance(&y).unwrap();
        prop_assert!(lhs <= rhs + 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn prop_sandwich((a, x, _) in case()) {
        let (lo, hi) = a.bounds(&x);
        let d = a.distance(&x).unwrap();
        prop_assert!(lo <= d * (1.0 + 1e-10) && d <= hi * (1.0 + 1e-10));
    }

    #[test]
    fn prop_defining_residual((a, x, _) in case()) {
        prop_assume!(x.iter().any(|v| *v != 0.0));
        let t = a.distance(&x).unwrap();
        let g: f64 = x
            .iter()
            .zip(a.weights())
            .map(|(xk, ak)| (xk / t.powf(*ak)).powi(2))
            .sum();
        prop_assert!((g - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn prop_isotropic_is_euclidean(x in (1usize..=5).prop_flat_map(point)) {
        let d = Anisotropy::isotropic(x.len()).distance(&x).unwrap();
        let e = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((d - e).abs() <= 1e-12 * e.max(1e-300));
    }
}
