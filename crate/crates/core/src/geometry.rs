//! Projection onto the magnitude torus `Z_c = { z : |dft(z)| = c }` and the
//! objectives built on it.
//!
//! With `P(x)` the projection, the amplitude objective is
//! `F(x) = (1/2n) || |dft(x)| - c ||^2 + g(x)`, and the partial minimum
//! `min_{z in Z_c} 1/2 ||x - z||^2` equals its data term. In the split real
//! coordinates `w = (w1, w2) = (Re z, Im z)` the problem becomes smooth:
//! `H(w) = G(w1) + 1/2 ||w2||^2` with `G` the Moreau envelope of `g`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::priors::PriorSpec;
use crate::spectral::{complexify, Complex64, FourierPlan};

/// Relative threshold below which a Fourier coefficient counts as zero.
pub const ZERO_REL_TOL: f64 = 1e-12;
/// Absolute fallback threshold when the whole spectrum vanishes.
pub const ZERO_ABS_FLOOR: f64 = 1e-300;
/// Per-entry magnitude tolerance for membership in `Z_c`.
pub const TORUS_MEMBERSHIP_TOL: f64 = 1e-8;

/// Nonnegative Fourier magnitudes `c` defining `Z_c`.
///
/// When a coefficient of the projected point is (numerically) zero its phase
/// is undefined; the phase is then taken as zero, i.e. `z_hat[j] = c[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MagnitudeSet {
    c: Vec<f64>,
}

impl TryFrom<Vec<f64>> for MagnitudeSet {
    type Error = Error;

    fn try_from(c: Vec<f64>) -> Result<Self> {
        MagnitudeSet::new(c)
    }
}

impl From<MagnitudeSet> for Vec<f64> {
    fn from(m: MagnitudeSet) -> Self {
        m.c
    }
}

impl MagnitudeSet {
    /// Rejects empty input and any negative or non-finite entry.
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidParameter("magnitude vector is empty".into()));
        }
        if let Some((index, &value)) = c.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidMeasurement { index, value });
        }
        Ok(MagnitudeSet { c })
    }

    /// Clamps negative entries to zero. Returns the set and how many entries
    /// were clamped. Non-finite entries are still rejected.
    pub fn clamped(mut c: Vec<f64>) -> Result<(Self, usize)> {
        let mut clamped = 0;
        for v in c.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
                clamped += 1;
            }
        }
        Ok((MagnitudeSet::new(c)?, clamped))
    }

    /// Magnitudes of the DFT of `x`, i.e. the set containing `x`.
    pub fn of_signal(x: &[f64]) -> Result<Self> {
        let plan = FourierPlan::new(x.len());
        let spectrum = plan.forward_real(x)?;
        MagnitudeSet::new(spectrum.iter().map(|v| v.norm()).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.c
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }
}

/// A point `z = w1 + i w2` of `C^n` written in real coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPoint {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
}

impl SplitPoint {
    pub fn new(w1: Vec<f64>, w2: Vec<f64>) -> Result<Self> {
        check_len(w1.len(), w2.len())?;
        Ok(SplitPoint { w1, w2 })
    }

    pub fn from_complex(z: &[Complex64]) -> Self {
        SplitPoint {
            w1: z.iter().map(|v| v.re).collect(),
            w2: z.iter().map(|v| v.im).collect(),
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.w1
            .iter()
            .zip(&self.w2)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.w1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w1.is_empty()
    }

    pub fn distance(&self, other: &SplitPoint) -> f64 {
        let d1: f64 = self.w1.iter().zip(&other.w1).map(|(a, b)| (a - b).powi(2)).sum();
        let d2: f64 = self.w2.iter().zip(&other.w2).map(|(a, b)| (a - b).powi(2)).sum();
        (d1 + d2).sqrt()
    }
}

/// Reusable projector onto `Z_c` for one magnitude vector.
///
/// Holds the FFT plans so that iterative solvers pay for planning once.
#[derive(Debug, Clone)]
pub struct TorusProjector {
    magnitudes: MagnitudeSet,
    plan: FourierPlan,
}

impl TorusProjector {
    pub fn new(magnitudes: MagnitudeSet) -> Self {
        let plan = FourierPlan::new(magnitudes.len());
        TorusProjector { magnitudes, plan }
    }

    pub fn magnitudes(&self) -> &MagnitudeSet {
        &self.magnitudes
    }

    pub fn plan(&self) -> &FourierPlan {
        &self.plan
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// `(1/2n) || |spectrum| - c ||^2` for an already transformed point.
    pub fn misfit_of_spectrum(&self, spectrum: &[Complex64]) -> f64 {
        let n = self.len() as f64;
        let sum: f64 = spectrum
            .iter()
            .zip(self.magnitudes.values())
            .map(|(v, c)| (v.norm() - c).powi(2))
            .sum();
        sum / (2.0 * n)
    }

    /// `|| |dft(x)| - c ||^2` (no `1/2n` factor), the residual used to rank
    /// candidate solutions.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        let spectrum = self.plan.forward_real(x)?;
        Ok(2.0 * self.len() as f64 * self.misfit_of_spectrum(&spectrum))
    }

    /// Replaces the spectrum `X` by `z_hat` with `z_hat[j] = c[j] X[j]/|X[j]|`.
    pub fn retarget_spectrum(&self, spectrum: &mut [Complex64]) {
        let peak = spectrum.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
        let threshold = if peak > 0.0 {
            ZERO_REL_TOL * peak
        } else {
            ZERO_ABS_FLOOR
        };
        for (v, &c) in spectrum.iter_mut().zip(self.magnitudes.values()) {
            let mag = v.norm();
            *v = if mag > threshold {
                *v * (c / mag)
            } else {
                Complex64::new(c, 0.0)
            };
        }
    }

    /// Projects a point whose spectrum is given, consuming the buffer:
    /// on return it holds the projected point in the signal domain.
    pub fn project_spectrum_in_place(&self, spectrum: &mut [Complex64]) {
        self.retarget_spectrum(spectrum);
        self.plan.inverse_in_place(spectrum);
    }

    pub fn project(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len(), x.len())?;
        let mut buf = x.to_vec();
        self.plan.forward_in_place(&mut buf);
        self.project_spectrum_in_place(&mut buf);
        Ok(buf)
    }

    pub fn project_real(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        self.project(&complexify(x))
    }

    /// Largest deviation `max_j | |dft(z)[j]| - c[j] |`.
    pub fn membership_defect(&self, z: &[Complex64]) -> Result<f64> {
        let spectrum = self.plan.forward(z)?;
        Ok(spectrum
            .iter()
            .zip(self.magnitudes.values())
            .map(|(v, c)| (v.norm() - c).abs())
            .fold(0.0, f64::max))
    }
}

/// Closest point of `Z_c` to `x`.
pub fn project_onto_zc(m: &MagnitudeSet, x: &[Complex64]) -> Result<Vec<Complex64>> {
    TorusProjector::new(m.clone()).project(x)
}

pub fn project_real_onto_zc(m: &MagnitudeSet, x: &[f64]) -> Result<Vec<Complex64>> {
    project_onto_zc(m, &complexify(x))
}

/// `(1/2n) || |dft(x)| - c ||^2`
pub fn data_misfit(m: &MagnitudeSet, x: &[f64]) -> Result<f64> {
    let projector = TorusProjector::new(m.clone());
    let spectrum = projector.plan.forward_real(x)?;
    Ok(projector.misfit_of_spectrum(&spectrum))
}

/// `F(x) = (1/2n) || |dft(x)| - c ||^2 + g(x)`; `+inf` when `g(x)` is.
pub fn amplitude_objective(m: &MagnitudeSet, p: &PriorSpec, x: &[f64]) -> Result<f64> {
    let prior = p.evaluate(x)?;
    if prior.is_infinite() {
        check_len(m.len(), x.len())?;
        return Ok(f64::INFINITY);
    }
    Ok(data_misfit(m, x)? + prior)
}

/// `min_{z in Z_c} 1/2 ||x - z||^2`, evaluated through the projection.
pub fn partial_min_value(m: &MagnitudeSet, x: &[f64]) -> Result<f64> {
    let z = project_real_onto_zc(m, x)?;
    Ok(0.5 * complex_real_distance_sq(&z, x))
}

fn complex_real_distance_sq(z: &[Complex64], x: &[f64]) -> f64 {
    z.iter().zip(x).map(|(v, &r)| (v.re - r).powi(2) + v.im.powi(2)).sum()
}

/// `h(x, y) = 1/2 ||y - P(x)||^2 + g(y)`, a majorizer of `F` tight at `y = x`.
pub fn majorizer(m: &MagnitudeSet, p: &PriorSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x.len(), y.len())?;
    let z = project_real_onto_zc(m, x)?;
    let prior = p.evaluate(y)?;
    Ok(0.5 * complex_real_distance_sq(&z, y) + prior)
}

/// Moreau envelope `G(v) = min_x 1/2 ||v - x||^2 + g(x)`, evaluated at the prox.
pub fn moreau_envelope(p: &PriorSpec, v: &[f64]) -> Result<f64> {
    let x = p.prox(v)?;
    let dist: f64 = v.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(0.5 * dist + p.evaluate(&x)?)
}

/// `H(w1, w2) = G(w1) + 1/2 ||w2||^2`
pub fn smooth_objective_h(p: &PriorSpec, w: &SplitPoint) -> Result<f64> {
    let imag: f64 = w.w2.iter().map(|v| v * v).sum();
    Ok(moreau_envelope(p, &w.w1)? + 0.5 * imag)
}

/// `grad H(w1, w2) = (w1 - prox_g(w1), w2)`. Only defined for convex `g`.
pub fn grad_h(p: &PriorSpec, w: &SplitPoint) -> Result<SplitPoint> {
    p.require_convex()?;
    check_len(w.w1.len(), w.w2.len())?;
    let prox = p.prox(&w.w1)?;
    Ok(SplitPoint {
        w1: w.w1.iter().zip(&prox).map(|(a, b)| a - b).collect(),
        w2: w.w2.clone(),
    })
}

/// Norm of the unit-step projected-gradient residual
/// `|| w - P(w - grad H(w)) ||`. Zero exactly at fixed points of the
/// alternating-minimization map.
pub fn gradient_mapping_norm(m: &MagnitudeSet, p: &PriorSpec, w: &SplitPoint) -> Result<f64> {
    let grad = grad_h(p, w)?;
    let step = SplitPoint {
        w1: w.w1.iter().zip(&grad.w1).map(|(a, b)| a - b).collect(),
        w2: w.w2.iter().zip(&grad.w2).map(|(a, b)| a - b).collect(),
    };
    let projected = SplitPoint::from_complex(&project_onto_zc(m, &step.to_complex())?);
    Ok(w.distance(&projected))
}

/// `K~(x, w) = 1/2 ||x - w1||^2 + 1/2 ||w2||^2 + g(x)` restricted to
/// `w in Z~_c`; `+inf` outside, with membership tested per magnitude entry
/// at [`TORUS_MEMBERSHIP_TOL`].
pub fn full_objective_k(m: &MagnitudeSet, p: &PriorSpec, x: &[f64], w: &SplitPoint) -> Result<f64> {
    check_len(m.len(), x.len())?;
    check_len(m.len(), w.len())?;
    check_len(w.w1.len(), w.w2.len())?;
    let projector = TorusProjector::new(m.clone());
    if projector.membership_defect(&w.to_complex())? > TORUS_MEMBERSHIP_TOL {
        return Ok(f64::INFINITY);
    }
    let prior = p.evaluate(x)?;
    let coupling: f64 = x.iter().zip(&w.w1).map(|(a, b)| (a - b).powi(2)).sum();
    let imag: f64 = w.w2.iter().map(|v| v * v).sum();
    Ok(0.5 * coupling + 0.5 * imag + prior)
}
