//! Sign-pattern recovery judged modulo the magnitude-preserving symmetries of
//! real signals: circular shifts, time reversal `x[i] -> x[-i mod n]`, and a
//! global sign flip. The orbit of a length-`n` vector has `4n` members.

use crate::error::{check_len, Result};

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// `shift_s(x)[i] = x[(i - s) mod n]`
pub fn circular_shift(x: &[f64], s: usize) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| x[(i + n - s % n) % n]).collect()
}

/// `reverse(x)[i] = x[(-i) mod n]`
pub fn reversal(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| x[(n - i) % n]).collect()
}

/// All `4n` members `sigma * shift_s(x)` and `sigma * shift_s(reverse(x))`.
pub fn invariance_orbit(x: &[f64]) -> Vec<Vec<f64>> {
    let reversed = reversal(x);
    let mut orbit = Vec::with_capacity(4 * x.len());
    for base in [x, reversed.as_slice()] {
        for s in 0..x.len() {
            let shifted = circular_shift(base, s);
            orbit.push(shifted.iter().map(|v| -v).collect());
            orbit.push(shifted);
        }
    }
    orbit
}

/// True iff some orbit member of `x_hat` has exactly the sign pattern of `x0`
/// (with `sign(0) = 0`).
pub fn recovery_metric(x_hat: &[f64], x0: &[f64]) -> Result<bool> {
    check_len(x0.len(), x_hat.len())?;
    let n = x0.len();
    let target: Vec<i8> = x0.iter().map(|&v| sign(v)).collect();
    let source: Vec<i8> = x_hat.iter().map(|&v| sign(v)).collect();

    for reversed in [false, true] {
        for s in 0..n {
            for flip in [1i8, -1] {
                let matches = (0..n).all(|i| {
                    let j = (i + n - s) % n;
                    let j = if reversed { (n - j) % n } else { j };
                    flip * source[j] == target[i]
                });
                if matches {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let x0 = [3.0, 0.0, -4.0, 0.0];
        assert!(recovery_metric(&x0, &x0).unwrap());
        assert!(recovery_metric(&[-3.0, 0.0, 4.0, 0.0], &x0).unwrap());
        assert!(!recovery_metric(&[3.0, 0.0, 4.0, 0.0], &x0).unwrap());
        assert!(recovery_metric(&[1.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn shifted_and_reversed_copies_count() {
        let x0 = [3.5, -3.1, 0.0, 0.0, 0.0, 0.0];
        assert!(recovery_metric(&circular_shift(&x0, 4), &x0).unwrap());
        assert!(recovery_metric(&reversal(&x0), &x0).unwrap());
    }

    #[test]
    fn orbit_size_and_members() {
        let x = [1.0, 2.0, 3.0];
        let orbit = invariance_orbit(&x);
        assert_eq!(orbit.len(), 12);
        assert!(orbit.contains(&vec![1.0, 2.0, 3.0]));
        assert!(orbit.contains(&vec![-1.0, -2.0, -3.0]));
        assert!(orbit.contains(&vec![3.0, 1.0, 2.0]));
        assert!(orbit.contains(&vec![1.0, 3.0, 2.0]));
    }
}
