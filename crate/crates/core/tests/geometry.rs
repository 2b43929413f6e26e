mod common;

use common::{dist, random_prior};
use phaseprox::geometry::{
    amplitude_objective, data_misfit, full_objective_k, grad_h, gradient_mapping_norm, majorizer, partial_min_value,
    project_onto_zc, project_real_onto_zc, smooth_objective_h, MagnitudeSet, SplitPoint, TorusProjector,
};
use phaseprox::priors::{PriorKind, PriorSpec};
use phaseprox::spectral::{complexify, dft, dft_real, idft, magnitudes, Complex64};
use phaseprox::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(0.0f64..4.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_lands_on_the_torus_and_is_idempotent((x, c) in instance(48)) {
        let m = MagnitudeSet::new(c.clone()).unwrap();
        let z = project_real_onto_zc(&m, &x).unwrap();
        let mags = magnitudes(&dft(&z));
        for (a, b) in mags.iter().zip(&c) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b));
        }
        let again = project_onto_zc(&m, &z).unwrap();
        let gap = again.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-10);
    }

    /// Independent oracle: the distance to Z_c through Parseval, per frequency.
    #[test]
    fn partial_minimum_equals_scaled_magnitude_misfit((x, c) in instance(64)) {
        let m = MagnitudeSet::new(c.clone()).unwrap();
        let n = x.len() as f64;
        let spectrum = dft_real(&x);
        let oracle: f64 = spectrum.iter().zip(&c).map(|(v, c)| (v.norm() - c).powi(2)).sum::<f64>() / (2.0 * n);
        let value = partial_min_value(&m, &x).unwrap();
        prop_assert!((value - oracle).abs() <= 1e-9 * (1.0 + oracle));
        prop_assert!((data_misfit(&m, &x).unwrap() - oracle).abs() <= 1e-9 * (1.0 + oracle));
    }

    #[test]
    fn projection_beats_random_points_of_the_torus((x, c) in instance(24), phases in prop::collection::vec(0.0f64..6.3, 24)) {
        let m = MagnitudeSet::new(c.clone()).unwrap();
        let z = project_real_onto_zc(&m, &x).unwrap();
        let other = idft(&c.iter().zip(&phases).map(|(&r, &t)| Complex64::from_polar(r, t)).collect::<Vec<_>>());
        let d = |w: &[Complex64]| w.iter().zip(&x).map(|(a, b)| (a - Complex64::new(*b, 0.0)).norm_sqr()).sum::<f64>();
        prop_assert!(d(&z) <= d(&other) + 1e-9);
    }

    #[test]
    fn majorizer_is_tight_and_above((x, c) in instance(32), y in prop::collection::vec(-3.0f64..3.0, 32), lambda in 0.0f64..1.0) {
        let m = MagnitudeSet::new(c).unwrap();
        let y = &y[..x.len()];
        let p = PriorSpec::l1(lambda).unwrap();
        let f_y = amplitude_objective(&m, &p, y).unwrap();
        prop_assert!(majorizer(&m, &p, &x, y).unwrap() >= f_y - 1e-10);
        let tight = majorizer(&m, &p, &x, &x).unwrap() - amplitude_objective(&m, &p, &x).unwrap();
        prop_assert!(tight.abs() <= 1e-10);
    }

    #[test]
    fn grad_h_is_one_lipschitz(w1 in prop::collection::vec(-3.0f64..3.0, 6), w2 in prop::collection::vec(-3.0f64..3.0, 6),
                               v1 in prop::collection::vec(-3.0f64..3.0, 6), v2 in prop::collection::vec(-3.0f64..3.0, 6),
                               kind in 0usize..7, seed in any::<u64>()) {
        let names = ["none", "l1", "l0_topk", "support_only", "l1_with_support", "l0_with_support", "basis_l1"];
        let p = random_prior(&mut ChaCha8Rng::seed_from_u64(seed), names[kind], 6);
        let (u, v) = (SplitPoint::new(w1, w2).unwrap(), SplitPoint::new(v1, v2).unwrap());
        if !p.is_convex() {
            prop_assert!(matches!(grad_h(&p, &u), Err(Error::NonconvexPrior(_))));
            return Ok(());
        }
        let lhs = grad_h(&p, &u).unwrap().distance(&grad_h(&p, &v).unwrap());
        prop_assert!(lhs <= u.distance(&v) * (1.0 + 1e-9) + 1e-12);
    }
}

#[test]
fn grad_h_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for kind in PriorKind::ALL.into_iter().filter(|k| k.is_convex()) {
        for _ in 0..30 {
            let n = 7;
            let p = random_prior(&mut rng, kind.name(), n);
            let w = SplitPoint::new(common::gaussian_vec(&mut rng, n), common::gaussian_vec(&mut rng, n)).unwrap();
            let exact = grad_h(&p, &w).unwrap();
            let h = 1e-5;
            let mut fd = Vec::new();
            for part in 0..2 {
                for i in 0..n {
                    let (mut a, mut b) = (w.clone(), w.clone());
                    let (pa, pb) = if part == 0 {
                        (&mut a.w1, &mut b.w1)
                    } else {
                        (&mut a.w2, &mut b.w2)
                    };
                    pa[i] += h;
                    pb[i] -= h;
                    fd.push((smooth_objective_h(&p, &a).unwrap() - smooth_objective_h(&p, &b).unwrap()) / (2.0 * h));
                }
            }
            let exact: Vec<f64> = exact.w1.iter().chain(&exact.w2).copied().collect();
            let norm = exact.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(dist(&exact, &fd) <= 1e-5 * norm, "{kind}: {exact:?} vs {fd:?}");
        }
    }
}

#[test]
fn zero_spectrum_entries_take_phase_zero() {
    let m = MagnitudeSet::new(vec![1.0, 2.0, 2.0, 0.5]).unwrap();
    let z = project_real_onto_zc(&m, &[0.0; 4]).unwrap();
    let spectrum = dft(&z);
    for (v, c) in spectrum.iter().zip(m.values()) {
        assert!((v - Complex64::new(*c, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn fixed_points_have_zero_gradient_mapping() {
    let x0 = [3.4, 0.0, -3.1, 0.0, 0.0, 0.0, 0.0, 0.0];
    let m = MagnitudeSet::of_signal(&x0).unwrap();
    let p = PriorSpec::support_only(phaseprox::priors::Support::leading_half(8));
    let w = SplitPoint::from_complex(&complexify(&x0));
    assert!(gradient_mapping_norm(&m, &p, &w).unwrap() < 1e-12);
    assert!(full_objective_k(&m, &p, &x0, &w).unwrap().abs() < 1e-20);
    let off = SplitPoint::new(vec![1.0; 8], vec![0.0; 8]).unwrap();
    assert_eq!(full_objective_k(&m, &p, &x0, &off).unwrap(), f64::INFINITY);
}

#[test]
fn measurement_validation() {
    assert!(MagnitudeSet::new(vec![]).is_err());
    assert!(matches!(
        MagnitudeSet::new(vec![1.0, -0.5]),
        Err(Error::InvalidMeasurement { index: 1, .. })
    ));
    assert!(MagnitudeSet::new(vec![f64::NAN]).is_err());
    let (m, clamped) = MagnitudeSet::clamped(vec![1.0, -0.5, -0.1, 2.0]).unwrap();
    assert_eq!((m.values(), clamped), (&[1.0, 0.0, 0.0, 2.0][..], 2));
    let p = TorusProjector::new(m);
    assert!(p.project_real(&[0.0; 3]).is_err());
}
