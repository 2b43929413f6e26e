//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use phaseprox::priors::{OrthoBasis, PriorSpec, Support};
use rand::{Rng, RngExt};

/// Lattice spacing of the prox oracle.
pub const STEP: f64 = 0.01;

/// Lattice points `-half_width, ..., half_width` with spacing `STEP`.
pub fn lattice(half_width: f64) -> Vec<f64> {
    let m = (half_width / STEP).round() as i64;
    (-m..=m).map(|i| i as f64 * STEP).collect()
}

/// Orthonormal DCT-II matrix, rows are basis vectors (computed from the formula).
pub fn dct_matrix(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let scale = if k == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            };
            (0..n)
                .map(|i| scale * (std::f64::consts::PI * (i as f64 + 0.5) * k as f64 / n as f64).cos())
                .collect()
        })
        .collect()
}

/// Builds the library basis whose columns are the rows of `rows`.
pub fn basis_from_rows(rows: &[Vec<f64>]) -> OrthoBasis {
    let n = rows.len();
    let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    OrthoBasis::from_columns(n, n, data).expect("orthonormal")
}

pub fn apply(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `argmin_y 1/2 (v - y)^2 + weight |y|` over the lattice.
fn best_on_lattice(v: f64, weight: f64, grid: &[f64]) -> (f64, f64) {
    grid.iter()
        .map(|&y| (0.5 * (v - y).powi(2) + weight * y.abs(), y))
        .fold(
            (f64::INFINITY, 0.0),
            |best, cand| if cand.0 < best.0 { cand } else { best },
        )
}

/// Every lattice minimizer of `1/2 ||v - y||^2 + g(y)` that cannot be told
/// apart from the best one at lattice resolution.
///
/// The objective is separable once the set of free coordinates is fixed, so
/// each coordinate is minimized on its own lattice and the sparsity kinds
/// enumerate all admissible supports. The basis kind is minimized over
/// coefficients `a = D^T y`, where its kinks lie on the lattice; candidates
/// are then returned in coefficient space.
pub fn lattice_prox(prior: &PriorSpec, v: &[f64], basis_rows: Option<&[Vec<f64>]>) -> Vec<Vec<f64>> {
    let n = v.len();
    let all = Support::full(n);
    let (target, weight, allowed, max_nnz) = match prior {
        PriorSpec::None => (v.to_vec(), 0.0, all, n),
        PriorSpec::L1 { lambda } => (v.to_vec(), *lambda, all, n),
        PriorSpec::L0TopK { k } => (v.to_vec(), 0.0, all, *k),
        PriorSpec::SupportOnly { support } => (v.to_vec(), 0.0, support.clone(), n),
        PriorSpec::L1WithSupport { lambda, support } => (v.to_vec(), *lambda, support.clone(), n),
        PriorSpec::L0WithSupport { k, support } => (v.to_vec(), 0.0, support.clone(), *k),
        PriorSpec::BasisL1 { lambda, .. } => {
            let rows = basis_rows.expect("basis kinds need the oracle's own matrix");
            (apply(rows, v), *lambda, all, n)
        }
    };
    let grid = lattice(target.iter().fold(0.0f64, |m, x| m.max(x.abs())) + 1.0);

    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    for mask in 0u32..(1 << n) {
        let free: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if free.len() > max_nnz || free.iter().any(|&i| !allowed.contains(i)) {
            continue;
        }
        let mut y = vec![0.0; n];
        let mut value = 0.0;
        for i in 0..n {
            if free.contains(&i) {
                let (f, yi) = best_on_lattice(target[i], weight, &grid);
                value += f;
                y[i] = yi;
            } else {
                value += 0.5 * target[i].powi(2);
            }
        }
        scored.push((value, y));
    }
    let best = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    // rounding to the lattice moves each coordinate's value by at most STEP^2 / 8
    let slack = n as f64 * STEP * STEP / 8.0 + 1e-12;
    scored
        .into_iter()
        .filter(|s| s.0 <= best + slack)
        .map(|s| s.1)
        .collect()
}

/// Sup-norm distance from `x` to the closest oracle candidate.
pub fn distance_to_candidates(x: &[f64], candidates: &[Vec<f64>]) -> f64 {
    candidates
        .iter()
        .map(|c| c.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// A random prior of the given kind name for length `n`; basis kinds use the DCT.
pub fn random_prior<R: Rng + ?Sized>(rng: &mut R, kind: &str, n: usize) -> PriorSpec {
    let lambda = rng.random_range(0.05..1.0);
    let k = rng.random_range(1..=n);
    let support = Support::new(n, (0..n).filter(|_| rng.random_bool(0.7))).unwrap();
    match kind {
        "none" => PriorSpec::None,
        "l1" => PriorSpec::l1(lambda).unwrap(),
        "l0_topk" => PriorSpec::l0_topk(k).unwrap(),
        "support_only" => PriorSpec::support_only(support),
        "l1_with_support" => PriorSpec::l1_with_support(lambda, support).unwrap(),
        "l0_with_support" => PriorSpec::l0_with_support(k, support).unwrap(),
        "basis_l1" => PriorSpec::basis_l1(lambda, basis_from_rows(&dct_matrix(n))).unwrap(),
        other => panic!("unknown kind {other}"),
    }
}

/// The oracle's verdict for one input: sup-norm gap between `prox(v)` and the
/// nearest lattice minimizer, measured where the lattice lives.
pub fn prox_oracle_gap(prior: &PriorSpec, v: &[f64]) -> f64 {
    let p = prior.prox(v).unwrap();
    match prior {
        PriorSpec::BasisL1 { .. } => {
            let rows = dct_matrix(v.len());
            let candidates = lattice_prox(prior, v, Some(&rows));
            distance_to_candidates(&apply(&rows, &p), &candidates)
        }
        _ => distance_to_candidates(&p, &lattice_prox(prior, v, None)),
    }
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
