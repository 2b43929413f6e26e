//! Regularizers with exact proximity operators.
//!
//! Every prior `g` exposes `prox(v) = argmin_y 1/2 ||v - y||^2 + g(y)` and the
//! value `g(v)`. Indices are zero-based throughout: the support set
//! `{1, ..., n/2}` of the usual one-based notation is `0..n/2` here.
//!
//! The sparsity priors use the hard constraint `||x||_0 <= K` (the prox is
//! hard thresholding). The penalty form `||x||_0` is not implemented.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Tolerance for the orthonormality test `||D^T D - I||_inf`.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorKind {
    None,
    L1,
    L0TopK,
    SupportOnly,
    L1WithSupport,
    L0WithSupport,
    BasisL1,
}

impl PriorKind {
    pub const ALL: [PriorKind; 7] = [
        PriorKind::None,
        PriorKind::L1,
        PriorKind::L0TopK,
        PriorKind::SupportOnly,
        PriorKind::L1WithSupport,
        PriorKind::L0WithSupport,
        PriorKind::BasisL1,
    ];

    pub fn is_convex(self) -> bool {
        !matches!(self, PriorKind::L0TopK | PriorKind::L0WithSupport)
    }

    pub fn name(self) -> &'static str {
        match self {
            PriorKind::None => "none",
            PriorKind::L1 => "l1",
            PriorKind::L0TopK => "l0_topk",
            PriorKind::SupportOnly => "support_only",
            PriorKind::L1WithSupport => "l1_with_support",
            PriorKind::L0WithSupport => "l0_with_support",
            PriorKind::BasisL1 => "basis_l1",
        }
    }
}

impl fmt::Display for PriorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PriorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown prior kind `{s}`")))
    }
}

/// An index set `J` inside `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SupportRepr", into = "SupportRepr")]
pub struct Support {
    len: usize,
    mask: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct SupportRepr {
    len: usize,
    indices: Vec<usize>,
}

impl TryFrom<SupportRepr> for Support {
    type Error = Error;

    fn try_from(r: SupportRepr) -> Result<Self> {
        Support::new(r.len, r.indices)
    }
}

impl From<Support> for SupportRepr {
    fn from(s: Support) -> Self {
        SupportRepr {
            len: s.len,
            indices: s.indices().collect(),
        }
    }
}

impl Support {
    pub fn new(len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; len];
        for i in indices {
            if i >= len {
                return Err(Error::InvalidParameter(format!(
                    "support index {i} out of range for length {len}"
                )));
            }
            mask[i] = true;
        }
        Ok(Support { len, mask })
    }

    /// The leading half `0..len/2`, the support rule of the recovery experiments.
    pub fn leading_half(len: usize) -> Self {
        Support::new(len, 0..len / 2).expect("indices in range")
    }

    pub fn full(len: usize) -> Self {
        Support::new(len, 0..len).expect("indices in range")
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    fn restrict(&self, v: &mut [f64]) {
        for (x, &keep) in v.iter_mut().zip(&self.mask) {
            if !keep {
                *x = 0.0;
            }
        }
    }

    fn violated_by(&self, v: &[f64]) -> bool {
        v.iter().zip(&self.mask).any(|(&x, &keep)| !keep && x != 0.0)
    }
}

/// An `n x n'` real matrix with orthonormal columns, stored column-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub struct OrthoBasis {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<BasisRepr> for OrthoBasis {
    type Error = Error;

    fn try_from(r: BasisRepr) -> Result<Self> {
        OrthoBasis::from_columns(r.rows, r.cols, r.data)
    }
}

impl From<OrthoBasis> for BasisRepr {
    fn from(b: OrthoBasis) -> Self {
        BasisRepr {
            rows: b.rows,
            cols: b.cols,
            data: b.data,
        }
    }
}

impl OrthoBasis {
    /// Builds a basis from column-major data, rejecting it unless
    /// `||D^T D - I||_inf <= 1e-10`.
    pub fn from_columns(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if cols > rows {
            return Err(Error::InvalidParameter(format!(
                "{cols} orthonormal columns cannot fit in dimension {rows}"
            )));
        }
        let basis = OrthoBasis { rows, cols, data };
        let defect = basis.orthonormality_defect();
        if defect.is_nan() || defect > ORTHONORMAL_TOL {
            return Err(Error::InvalidParameter(format!(
                "basis columns are not orthonormal (||D^T D - I||_inf = {defect:.3e})"
            )));
        }
        Ok(basis)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        OrthoBasis { rows: n, cols: n, data }
    }

    /// Orthonormal DCT-II synthesis basis; column `k` is the `k`-th cosine atom.
    pub fn dct(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for k in 0..n {
            let scale = if k == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            };
            for t in 0..n {
                let angle = std::f64::consts::PI * (t as f64 + 0.5) * k as f64 / n as f64;
                data[k * n + t] = scale * angle.cos();
            }
        }
        OrthoBasis { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn column(&self, k: usize) -> &[f64] {
        &self.data[k * self.rows..(k + 1) * self.rows]
    }

    /// `D^T v`
    pub fn analyze(&self, v: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|k| self.column(k).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `D a`
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (k, &a) in coeffs.iter().enumerate() {
            for (o, d) in out.iter_mut().zip(self.column(k)) {
                *o += a * d;
            }
        }
        out
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.cols {
            for b in 0..self.cols {
                let dot: f64 = self.column(a).iter().zip(self.column(b)).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// A regularizer `g` together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSpec {
    /// `g = 0`
    None,
    /// `g = lambda ||x||_1`
    L1 {
        lambda: f64,
    },
    /// Indicator of `{x : ||x||_0 <= k}`.
    L0TopK {
        k: usize,
    },
    /// Indicator of vectors supported on `J`.
    SupportOnly {
        support: Support,
    },
    L1WithSupport {
        lambda: f64,
        support: Support,
    },
    L0WithSupport {
        k: usize,
        support: Support,
    },
    /// `g(x) = lambda ||D^T x||_1` for a basis `D` with orthonormal columns.
    BasisL1 {
        lambda: f64,
        basis: OrthoBasis,
    },
}

impl PriorSpec {
    pub fn l1(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(PriorSpec::L1 { lambda })
    }

    pub fn l0_topk(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(PriorSpec::L0TopK { k })
    }

    pub fn support_only(support: Support) -> Self {
        PriorSpec::SupportOnly { support }
    }

    pub fn l1_with_support(lambda: f64, support: Support) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(PriorSpec::L1WithSupport { lambda, support })
    }

    pub fn l0_with_support(k: usize, support: Support) -> Result<Self> {
        check_k(k)?;
        Ok(PriorSpec::L0WithSupport { k, support })
    }

    pub fn basis_l1(lambda: f64, basis: OrthoBasis) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(PriorSpec::BasisL1 { lambda, basis })
    }

    /// Re-checks the parameter invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            PriorSpec::None | PriorSpec::SupportOnly { .. } => Ok(()),
            PriorSpec::L1 { lambda } | PriorSpec::L1WithSupport { lambda, .. } | PriorSpec::BasisL1 { lambda, .. } => {
                check_lambda(*lambda)
            }
            PriorSpec::L0TopK { k } | PriorSpec::L0WithSupport { k, .. } => check_k(*k),
        }
    }

    pub fn kind(&self) -> PriorKind {
        match self {
            PriorSpec::None => PriorKind::None,
            PriorSpec::L1 { .. } => PriorKind::L1,
            PriorSpec::L0TopK { .. } => PriorKind::L0TopK,
            PriorSpec::SupportOnly { .. } => PriorKind::SupportOnly,
            PriorSpec::L1WithSupport { .. } => PriorKind::L1WithSupport,
            PriorSpec::L0WithSupport { .. } => PriorKind::L0WithSupport,
            PriorSpec::BasisL1 { .. } => PriorKind::BasisL1,
        }
    }

    pub fn is_convex(&self) -> bool {
        self.kind().is_convex()
    }

    /// The ℓ1 weight, when the prior has one.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            PriorSpec::L1 { lambda } | PriorSpec::L1WithSupport { lambda, .. } | PriorSpec::BasisL1 { lambda, .. } => {
                Some(*lambda)
            }
            _ => None,
        }
    }

    /// The prior `t g`. Indicator kinds are unchanged; ℓ1 weights are multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Result<PriorSpec> {
        let mut out = self.clone();
        match &mut out {
            PriorSpec::L1 { lambda } | PriorSpec::L1WithSupport { lambda, .. } | PriorSpec::BasisL1 { lambda, .. } => {
                *lambda *= t;
                check_lambda(*lambda)?;
            }
            _ => {}
        }
        Ok(out)
    }

    /// The signal length this prior is tied to, if any.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            PriorSpec::SupportOnly { support }
            | PriorSpec::L1WithSupport { support, .. }
            | PriorSpec::L0WithSupport { support, .. } => Some(support.len()),
            PriorSpec::BasisL1 { basis, .. } => Some(basis.rows()),
            _ => None,
        }
    }

    pub fn check_dimension(&self, len: usize) -> Result<()> {
        match self.dimension() {
            Some(d) => check_len(d, len),
            None => Ok(()),
        }
    }

    /// Proximity operator. For the nonconvex kinds this returns the
    /// lowest-index selection of the multivalued hard threshold.
    pub fn prox(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = v.to_vec();
        self.prox_in_place(&mut out)?;
        Ok(out)
    }

    pub fn prox_in_place(&self, v: &mut [f64]) -> Result<()> {
        self.check_dimension(v.len())?;
        match self {
            PriorSpec::None => {}
            PriorSpec::L1 { lambda } => soft_threshold_in_place(v, *lambda),
            PriorSpec::L0TopK { k } => hard_threshold_in_place(v, *k),
            PriorSpec::SupportOnly { support } => support.restrict(v),
            PriorSpec::L1WithSupport { lambda, support } => {
                support.restrict(v);
                soft_threshold_in_place(v, *lambda);
            }
            PriorSpec::L0WithSupport { k, support } => {
                support.restrict(v);
                hard_threshold_in_place(v, *k);
            }
            PriorSpec::BasisL1 { lambda, basis } => {
                let coeffs = basis.analyze(v);
                let mut shrunk = coeffs.clone();
                soft_threshold_in_place(&mut shrunk, *lambda);
                let delta: Vec<f64> = shrunk.iter().zip(&coeffs).map(|(s, c)| s - c).collect();
                for (x, d) in v.iter_mut().zip(basis.synthesize(&delta)) {
                    *x += d;
                }
            }
        }
        Ok(())
    }

    /// `g(v)`, with `+inf` for violated indicator constraints.
    pub fn evaluate(&self, v: &[f64]) -> Result<f64> {
        self.check_dimension(v.len())?;
        let value = match self {
            PriorSpec::None => 0.0,
            PriorSpec::L1 { lambda } => lambda * l1_norm(v),
            PriorSpec::L0TopK { k } => sparsity_indicator(v, *k),
            PriorSpec::SupportOnly { support } => support_indicator(support, v),
            PriorSpec::L1WithSupport { lambda, support } => support_indicator(support, v) + lambda * l1_norm(v),
            PriorSpec::L0WithSupport { k, support } => support_indicator(support, v) + sparsity_indicator(v, *k),
            PriorSpec::BasisL1 { lambda, basis } => lambda * l1_norm(&basis.analyze(v)),
        };
        Ok(value)
    }

    /// Fails with [`Error::NonconvexPrior`] for the hard-threshold kinds.
    pub fn require_convex(&self) -> Result<()> {
        if self.is_convex() {
            Ok(())
        } else {
            Err(Error::NonconvexPrior(self.kind()))
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "lambda must be a finite nonnegative number, got {lambda}"
        )))
    }
}

fn check_k(k: usize) -> Result<()> {
    if k >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("sparsity level K must be at least 1".into()))
    }
}

fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn support_indicator(support: &Support, v: &[f64]) -> f64 {
    if support.violated_by(v) {
        f64::INFINITY
    } else {
        0.0
    }
}

fn sparsity_indicator(v: &[f64], k: usize) -> f64 {
    if v.iter().filter(|&&x| x != 0.0).count() > k {
        f64::INFINITY
    } else {
        0.0
    }
}

/// `T_alpha(x)_i = sgn(x_i) max(|x_i| - alpha, 0)`
pub fn soft_threshold(v: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    soft_threshold_in_place(&mut out, alpha);
    out
}

fn soft_threshold_in_place(v: &mut [f64], alpha: f64) {
    for x in v.iter_mut() {
        let shrunk = x.abs() - alpha;
        *x = if shrunk > 0.0 { x.signum() * shrunk } else { 0.0 };
    }
}

fn hard_threshold_in_place(v: &mut [f64], k: usize) {
    if k >= v.len() {
        return;
    }
    let keep = select_topk(v, k);
    let mut mask = vec![false; v.len()];
    for i in keep {
        mask[i] = true;
    }
    for (x, keep) in v.iter_mut().zip(mask) {
        if !keep {
            *x = 0.0;
        }
    }
}

fn select_topk(v: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    // stable sort keeps lower indices first among equal magnitudes
    order.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Indices of the `k` largest-magnitude entries of `v`, ascending.
/// Ties are resolved in favour of the lowest index.
pub fn tie_break_topk(v: &[f64], k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > v.len() {
        return Err(Error::InvalidParameter(format!(
            "K = {k} is out of range for a vector of length {}",
            v.len()
        )));
    }
    Ok(select_topk(v, k))
}
