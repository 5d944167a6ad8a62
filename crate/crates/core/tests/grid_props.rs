//! Property tests for the sampled-grid layer and the MNF1 codec.

use mnl_core::io::{decode, encode};
use mnl_core::verifier::ensemble::{complex_gaussian, trial_rng};
use mnl_core::{GridSpec, SampledField};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = GridSpec> {
    prop::collection::vec(prop::sample::select(vec![2usize, 4, 6, 8, 16]), 1..=3)
        .prop_flat_map(|samples| {
            let n = samples.len();
            (Just(samples), prop::collection::vec(0.5f64..10.0, n))
        })
        .prop_map(|(samples, periods)| GridSpec::new(samples, periods).unwrap())
}

fn field_strategy() -> impl Strategy<Value = SampledField> {
    grid_strategy().prop_flat_map(|spec| {
        let len = spec.len();
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), len).prop_map(move |v| {
            let values = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            SampledField::new(spec.clone(), values).unwrap()
        })
    })
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn prop_spectral_round_trip(spec in grid_strategy(), seed in any::<u64>()) {
        // random amplitudes on every addressable (non-Nyquist) mode
        let mut rng = trial_rng(seed, 0);
        let coeffs: Vec<(Vec<i64>, Complex64)> = (0..spec.len())
            .map(|i| spec.frequency_at(i))
            .filter(|k| k.iter().zip(spec.samples()).all(|(kk, n)| kk.unsigned_abs() < (*n as u64) / 2))
            .map(|k| (k, complex_gaussian(&mut rng)))
            .collect();
        let u = SampledField::from_spectrum(spec.clone(), &coeffs).unwrap();
        let fresh = SampledField::new(spec.clone(), u.values().to_vec()).unwrap();
        for (k, c) in &coeffs {
            prop_assert!((fresh.coefficient(k).unwrap() - c).norm() <= 1e-12);
        }
        let back = SampledField::new(spec, fresh.values().to_vec()).unwrap();
        prop_assert!(max_diff(back.values(), u.values()) <= 1e-12 * u.max_abs().max(1.0));
    }

    #[test]
    fn prop_transform_is_linear(u in field_strategy(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let alpha = Complex64::new(re, im);
        let beta = Complex64::new(0.5, -1.25);
        let v = u.scale(Complex64::new(0.0, 1.0)).apply_multiplier(&vec![0.5; u.spec().len()]).unwrap();
        let combined = u.combine(alpha, &v, beta).unwrap();
        let expected: Vec<Complex64> = u
            .to_spectrum()
            .iter()
            .zip(v.to_spectrum())
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let scale = u.max_abs().max(1.0) * 10.0;
        prop_assert!(max_diff(combined.to_spectrum(), &expected) <= 1e-12 * scale);
    }

    #[test]
    fn prop_parseval(u in field_strategy()) {
        let mean_sq = u.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / u.spec().len() as f64;
        let coeff_sq: f64 = u.to_spectrum().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((mean_sq - coeff_sq).abs() <= 1e-12 * mean_sq.max(1.0));
    }

    #[test]
    fn prop_mnf1_bit_exact(u in field_strategy()) {
        let bytes = encode(&u);
        let back = decode(&bytes).unwrap();
        prop_assert_eq!(back.spec(), u.spec());
        for (a, b) in back.values().iter().zip(u.values()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        prop_assert_eq!(encode(&back), bytes);
    }
}

#[test]
fn round_trip_on_a_cube() {
    let spec = GridSpec::torus(3, 64).unwrap();
    let coeffs: Vec<(Vec<i64>, Complex64)> = (0..200)
        .map(|i| {
            let k = vec![(i * 7 % 63) as i64 - 31, (i * 13 % 63) as i64 - 31, (i * 29 % 63) as i64 - 31];
            (k, Complex64::new((i as f64).sin(), (i as f64 * 0.37).cos()))
        })
        .collect();
    let u = SampledField::from_spectrum(spec.clone(), &coeffs).unwrap();
    let fresh = SampledField::new(spec, u.values().to_vec()).unwrap();
    assert!(max_diff(fresh.to_spectrum(), u.to_spectrum()) <= 1e-12);
}
