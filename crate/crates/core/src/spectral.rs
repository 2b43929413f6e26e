//! Discrete Fourier transform with a pinned normalization.
//!
//! The forward transform is unnormalized,
//! `X[j] = sum_t x[t] exp(-2 pi i j t / n)`, and the inverse carries the
//! `1/n` factor. Under this convention `||dft(x)||^2 = n ||x||^2`, which is
//! what makes the partial-minimization identity over the magnitude torus
//! exact. Any length `n >= 1` is supported.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward and inverse FFT plans for one transform length.
///
/// Plans are cheap to clone (they share the underlying twiddle tables) and
/// are `Send + Sync`, so a solver builds one up front and reuses it for
/// every iteration.
#[derive(Clone)]
pub struct FourierPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierPlan").field("len", &self.len).finish()
    }
}

impl FourierPlan {
    pub fn new(len: usize) -> Self {
        PLANNER.with(|planner| {
            let mut planner = planner.borrow_mut();
            FourierPlan {
                len,
                forward: planner.plan_fft_forward(len),
                inverse: planner.plan_fft_inverse(len),
            }
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized forward transform, in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        if self.len > 0 {
            self.forward.process(buf);
        }
    }

    /// Inverse transform including the `1/n` factor, in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        if self.len == 0 {
            return;
        }
        self.inverse.process(buf);
        let scale = 1.0 / self.len as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    pub fn forward(&self, input: &[Complex64]) -> Result<Vec<Complex64>> {
        crate::error::check_len(self.len, input.len())?;
        let mut buf = input.to_vec();
        self.forward_in_place(&mut buf);
        Ok(buf)
    }

    pub fn forward_real(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        crate::error::check_len(self.len, x.len())?;
        let mut buf = complexify(x);
        self.forward_in_place(&mut buf);
        Ok(buf)
    }

    pub fn inverse(&self, input: &[Complex64]) -> Result<Vec<Complex64>> {
        crate::error::check_len(self.len, input.len())?;
        let mut buf = input.to_vec();
        self.inverse_in_place(&mut buf);
        Ok(buf)
    }
}

/// Lifts a real vector into the complex domain with zero imaginary part.
pub fn complexify(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

pub fn real_part(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|v| v.re).collect()
}

pub fn magnitudes(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|v| v.norm()).collect()
}

/// Unnormalized forward DFT of a complex vector.
pub fn dft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    FourierPlan::new(buf.len()).forward_in_place(&mut buf);
    buf
}

/// Unnormalized forward DFT of a real vector.
pub fn dft_real(x: &[f64]) -> Vec<Complex64> {
    dft(&complexify(x))
}

/// Inverse DFT, including the `1/n` factor.
pub fn idft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    FourierPlan::new(buf.len()).inverse_in_place(&mut buf);
    buf
}

/// DFT of `x` zero-padded to `len` samples.
pub fn dft_padded(x: &[f64], len: usize) -> Result<Vec<Complex64>> {
    if len < x.len() {
        return Err(Error::InvalidParameter(format!(
            "padded length {len} is shorter than the signal length {}",
            x.len()
        )));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (slot, &v) in buf.iter_mut().zip(x) {
        slot.re = v;
    }
    FourierPlan::new(len).forward_in_place(&mut buf);
    Ok(buf)
}

/// Direct O(n^2) evaluation of the forward DFT. Reference path for
/// cross-checking the fast transform on small lengths.
pub fn dft_naive(input: &[Complex64]) -> Vec<Complex64> {
    naive(input, -1.0, 1.0)
}

/// Direct O(n^2) evaluation of the inverse DFT (with `1/n`).
pub fn idft_naive(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len().max(1) as f64;
    naive(input, 1.0, 1.0 / n)
}

fn naive(input: &[Complex64], sign: f64, scale: f64) -> Vec<Complex64> {
    let n = input.len();
    (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &v) in input.iter().enumerate() {
                // reduce j*t mod n first so the angle stays small
                let k = (j * t) % n;
                let angle = sign * 2.0 * PI * k as f64 / n as f64;
                acc += v * Complex64::from_polar(1.0, angle);
            }
            acc * scale
        })
        .collect()
}

pub fn norm_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum()
}
