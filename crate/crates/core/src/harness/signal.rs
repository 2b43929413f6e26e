use rand::{Rng, RngExt};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::MagnitudeSet;
use crate::priors::Support;
use crate::spectral::FourierPlan;

/// Draws a `k`-sparse signal supported in the leading half `0..n/2`.
///
/// The support is chosen uniformly without replacement; each nonzero has a
/// fair random sign and magnitude uniform on `[3, 4]`.
pub fn generate_signal<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<f64>> {
    let half = n / 2;
    if k == 0 || k > half {
        return Err(Error::InvalidParameter(format!(
            "sparsity K = {k} must lie in 1..={half} for n = {n}"
        )));
    }
    let mut x = vec![0.0; n];
    for i in rand::seq::index::sample(rng, half, k) {
        let magnitude = rng.random_range(3.0..=4.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        x[i] = sign * magnitude;
    }
    Ok(x)
}

/// Clean squared magnitudes `s = |dft(x0)|^2` and the additive noise drawn for them.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisySquares {
    pub clean: Vec<f64>,
    pub noise: Vec<f64>,
    pub variance: f64,
}

/// Noise variance `sigma^2 = ||s||^2 / (n 10^(snr/10))`.
pub fn noise_variance(clean: &[f64], snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    let energy: f64 = clean.iter().map(|s| s * s).sum();
    energy / (clean.len() as f64 * 10f64.powf(snr_db / 10.0))
}

/// Draws white Gaussian noise for the squared magnitudes of `x0`.
pub fn noisy_squares<R: Rng + ?Sized>(x0: &[f64], snr_db: f64, rng: &mut R) -> Result<NoisySquares> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter(format!("invalid SNR {snr_db} dB")));
    }
    let spectrum = FourierPlan::new(x0.len()).forward_real(x0)?;
    let clean: Vec<f64> = spectrum.iter().map(|v| v.norm_sqr()).collect();
    let variance = noise_variance(&clean, snr_db);
    let sigma = variance.sqrt();
    let noise = if variance == 0.0 {
        vec![0.0; clean.len()]
    } else {
        (0..clean.len())
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            })
            .collect()
    };
    Ok(NoisySquares { clean, noise, variance })
}

/// Magnitude measurements `c = sqrt(max(|dft(x0)|^2 + eps, 0))`.
///
/// The SNR is defined on the squared measurements as
/// `10 log10(||s||^2 / (n sigma^2))` with `s = |dft(x0)|^2`. An infinite SNR
/// yields `c = |dft(x0)|` exactly.
pub fn generate_measurements<R: Rng + ?Sized>(x0: &[f64], snr_db: f64, rng: &mut R) -> Result<MagnitudeSet> {
    if snr_db == f64::INFINITY {
        return MagnitudeSet::of_signal(x0);
    }
    let squares = noisy_squares(x0, snr_db, rng)?;
    let c = squares
        .clean
        .iter()
        .zip(&squares.noise)
        .map(|(s, e)| (s + e).max(0.0).sqrt())
        .collect();
    MagnitudeSet::new(c)
}

/// Standard Gaussian entries on `support`, zero elsewhere.
pub fn random_init<R: Rng + ?Sized>(n: usize, support: &Support, rng: &mut R) -> Result<Vec<f64>> {
    if support.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: support.len(),
        });
    }
    let mut x = vec![0.0; n];
    for i in support.indices() {
        x[i] = StandardNormal.sample(rng);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::rng::{stream, Purpose};

    #[test]
    fn signal_postconditions() {
        let mut rng = stream(1, Purpose::Signal, 0, 0);
        for _ in 0..200 {
            let x = generate_signal(32, 5, &mut rng).unwrap();
            assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 5);
            for (i, v) in x.iter().enumerate() {
                if *v != 0.0 {
                    assert!(i < 16);
                    assert!((3.0..=4.0).contains(&v.abs()));
                }
            }
        }
    }

    #[test]
    fn full_half_support() {
        let mut rng = stream(2, Purpose::Signal, 0, 0);
        let x = generate_signal(4, 2, &mut rng).unwrap();
        assert!(x[0] != 0.0 && x[1] != 0.0 && x[2] == 0.0 && x[3] == 0.0);
        assert!(generate_signal(4, 3, &mut rng).is_err());
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = generate_signal(64, 3, &mut stream(9, Purpose::Signal, 4, 0)).unwrap();
        let b = generate_signal(64, 3, &mut stream(9, Purpose::Signal, 4, 0)).unwrap();
        assert_eq!(a, b);
        let support = Support::leading_half(8);
        let i = random_init(8, &support, &mut stream(9, Purpose::Init, 0, 0)).unwrap();
        let j = random_init(8, &support, &mut stream(9, Purpose::Init, 0, 0)).unwrap();
        let k = random_init(8, &support, &mut stream(9, Purpose::Init, 0, 1)).unwrap();
        assert_eq!(i, j);
        assert_ne!(i, k);
        assert!(i[4..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn noiseless_measurements_are_exact_magnitudes() {
        let x = generate_signal(16, 2, &mut stream(3, Purpose::Signal, 0, 0)).unwrap();
        let c = generate_measurements(&x, f64::INFINITY, &mut stream(3, Purpose::Noise, 0, 0)).unwrap();
        assert_eq!(c, MagnitudeSet::of_signal(&x).unwrap());
    }

    #[test]
    fn noisy_measurements_are_nonnegative() {
        let x = generate_signal(16, 2, &mut stream(3, Purpose::Signal, 0, 0)).unwrap();
        for trial in 0..50 {
            let c = generate_measurements(&x, -5.0, &mut stream(3, Purpose::Noise, trial, 0)).unwrap();
            assert!(c.values().iter().all(|v| *v >= 0.0));
        }
    }
}
