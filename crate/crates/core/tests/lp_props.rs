//! Properties of the Littlewood-Paley window stack and band decomposition.

use mnl_core::littlewood_paley::{max_admissible_level, spectral_rectangle, SPECTRAL_THRESHOLD};
use mnl_core::verifier::{generate, EnsembleKind, EnsembleSpec};
use mnl_core::{build_family, Anisotropy, Error, GridSpec, SampledField};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn configuration() -> impl Strategy<Value = (GridSpec, Anisotropy)> {
    prop_oneof![
        (prop::sample::select(vec![16usize, 32, 64]), Just(vec![1.0])),
        (prop::sample::select(vec![16usize, 32, 64]), Just(vec![1.0, 1.0])),
        (prop::sample::select(vec![32usize, 64]), Just(vec![1.0, 2.0])),
        (prop::sample::select(vec![32usize, 64]), Just(vec![1.0, 1.5])),
        (Just(16usize), Just(vec![1.0, 1.0, 2.0])),
    ]
    .prop_map(|(n, a)| {
        let aniso = Anisotropy::new(a).unwrap();
        (GridSpec::new(vec![n; aniso.ndim()], vec![2.0 * PI; aniso.ndim()]).unwrap(), aniso)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn prop_partition_of_unity((spec, aniso) in configuration()) {
        let jmax = max_admissible_level(&spec, &aniso).unwrap();
        let fam = build_family(&spec, &aniso, jmax).unwrap();
        let radius = fam.admissible_radius();
        for (i, d) in fam.distances().iter().enumerate() {
            let total: f64 = fam.windows().iter().map(|w| w[i]).sum();
            prop_assert!((0.0..=1.0).contains(&total));
            if *d <= radius {
                prop_assert!((total - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn prop_windows_live_in_coronas((spec, aniso) in configuration()) {
        let jmax = max_admissible_level(&spec, &aniso).unwrap();
        let fam = build_family(&spec, &aniso, jmax).unwrap();
        for (j, w) in fam.windows().iter().enumerate() {
            let (inner, outer) = if j == 0 { (0.0, 2.0) } else { (2f64.powi(j as i32 - 1), 2f64.powi(j as i32 + 1)) };
            for (i, v) in w.iter().enumerate() {
                prop_assert!((-1e-15..=1.0 + 1e-15).contains(v));
                let d = fam.distances()[i];
                if *v != 0.0 {
                    prop_assert!(d >= inner * (1.0 - 1e-12) && d <= outer * (1.0 + 1e-12), "j={} d={}", j, d);
                }
            }
        }
    }

    #[test]
    fn prop_bands_reconstruct_and_fit_rectangles((spec, aniso) in configuration(), seed in any::<u64>()) {
        let jmax = max_admissible_level(&spec, &aniso).unwrap();
        let fields = generate(&EnsembleSpec {
            grid: spec.clone(),
            kind: EnsembleKind::LpBands { aniso: aniso.clone(), jmax },
            count: 1,
            seed,
        })
        .unwrap();
        let u = &fields[0];
        let fam = build_family(&spec, &aniso, jmax).unwrap();
        let bands = fam.decompose(u).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let mut sum = SampledField::zeros(spec.clone());
        for (j, b) in bands.iter().enumerate() {
            sum = sum.combine(one, b, one).unwrap();
            let rect = spectral_rectangle(b, SPECTRAL_THRESHOLD).unwrap();
            for (r, a) in rect.half_widths.iter().zip(aniso.weights()) {
                prop_assert!(*r <= 2f64.powf(a * (j + 1) as f64) * (1.0 + 1e-12));
            }
        }
        let err = sum.combine(one, u, -one).unwrap().max_abs();
        prop_assert!(err <= 1e-10 * u.max_abs());
    }
}

#[test]
fn decompose_refuses_foreign_grids_and_wide_spectra() {
    let spec = GridSpec::torus(2, 32).unwrap();
    let fam = build_family(&spec, &Anisotropy::isotropic(2), 2).unwrap();
    let other = SampledField::zeros(GridSpec::torus(2, 16).unwrap());
    assert!(matches!(fam.decompose(&other), Err(Error::GridMismatch)));
    let wide = SampledField::from_spectrum(spec, &[(vec![3, 0], Complex64::new(1.0, 0.0))]).unwrap();
    assert!(matches!(fam.decompose(&wide), Err(Error::NotBandLimited { .. })));
}
