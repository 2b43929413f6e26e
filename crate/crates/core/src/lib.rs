//! Sparse phase retrieval from Fourier magnitudes.
//!
//! The crate recovers a real signal `x0` from measurements `c ~ |dft(x0)|`
//! by alternating between the magnitude torus `Z_c = { z : |dft(z)| = c }`
//! and a proximal step on a prior `g`:
//!
//! ```text
//! x^{k+1} = prox_g(Re P_{Z_c}(x^k))
//! ```
//!
//! * [`spectral`]: DFT with an unnormalized forward / `1/n` inverse convention.
//! * [`priors`]: regularizers with exact proximity operators.
//! * [`geometry`]: projection onto `Z_c`, objectives, majorizer, smooth split reformulation.
//! * [`solvers`]: alternating minimization, its inertial variant, and a squared-magnitude baseline.
//! * [`harness`]: seeded recovery experiments and their CSV/JSON outputs.
//! * [`verify`]: numerical self-checks of the structural identities.
//! * [`report`]: SVG charts of aggregate tables.
//! * [`cli`]: the `phaseprox` command-line front end.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod priors;
pub mod report;
pub mod solvers;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
