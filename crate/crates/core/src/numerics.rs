//! Dense linear-algebra primitives with an explicit rank policy.
//!
//! Every rank statement in this crate goes through [`numerical_rank`]: the rank
//! is the number of singular values strictly above a tolerance, which defaults
//! to `max(rows, cols) * eps * sigma_max`. An absolute tolerance can be passed
//! per call, or set process-wide with [`set_tolerance_override`].

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

// Bit pattern of the override; 0 means "no override".
static TOLERANCE_OVERRIDE: AtomicU64 = AtomicU64::new(0);

/// Sets (or clears with `None`) a process-wide absolute rank tolerance that
/// replaces the relative default wherever no explicit tolerance is given.
pub fn set_tolerance_override(tol: Option<f64>) {
    let bits = match tol {
        Some(t) if t.is_finite() && t > 0.0 => t.to_bits(),
        _ => 0,
    };
    TOLERANCE_OVERRIDE.store(bits, Ordering::Relaxed);
}

pub fn tolerance_override() -> Option<f64> {
    match TOLERANCE_OVERRIDE.load(Ordering::Relaxed) {
        0 => None,
        bits => Some(f64::from_bits(bits)),
    }
}

/// Default relative tolerance `max(rows, cols) * eps * sigma_max`, unless a
/// process-wide override is active.
pub fn default_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    tolerance_override().unwrap_or_else(|| rows.max(cols) as f64 * f64::EPSILON * sigma_max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    pub tolerance_used: f64,
    /// `sigma_rank / sigma_(rank+1)`; infinite when nothing nonzero was
    /// discarded, zero when the rank is zero but some sigma is nonzero.
    pub gap_ratio: f64,
}

impl RankReport {
    pub fn smallest_retained(&self) -> Option<f64> {
        self.rank.checked_sub(1).map(|i| self.singular_values[i])
    }

    /// The `k`-th largest singular value (1-based), zero if out of range.
    pub fn sigma(&self, k: usize) -> f64 {
        k.checked_sub(1)
            .and_then(|i| self.singular_values.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// Singular values in nonincreasing order.
///
/// # Panics
///
/// Panics if `m` contains a non-finite entry.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    assert!(
        m.iter().all(|x| x.is_finite()),
        "matrix has non-finite entries"
    );
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv = to_faer(m)
        .singular_values()
        .or_else(|_| to_faer(&m.transpose()).singular_values())
        .unwrap_or_else(|_| svd(m).sigma);
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn to_faer(m: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full singular value decomposition `m = U diag(sigma) V^T`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x rows`.
    pub u: Matrix,
    /// Nonincreasing, length `min(rows, cols)`.
    pub sigma: Vec<f64>,
    /// `cols x cols`.
    pub v: Matrix,
}

/// `(U, sigma, V)` unsorted, or `None` if the iteration does not converge.
fn faer_svd(m: &Matrix) -> Option<(Matrix, Vec<f64>, Matrix)> {
    let f = to_faer(m).svd().ok()?;
    let s = f.S().column_vector();
    let sigma = (0..s.nrows()).map(|i| s[i]).collect();
    Some((from_faer(f.U()), sigma, from_faer(f.V())))
}

/// Full SVD.
///
/// Delegated to faer, whose results stay accurate on rows of very different
/// scale where nalgebra's bidiagonal iteration can return factors that do not
/// reproduce the input. On the rare matrices where faer's iteration does not
/// converge, the transpose and then a slightly rescaled copy are tried; the
/// singular vectors are unaffected and the scale is divided out of `sigma`.
///
/// # Panics
///
/// Panics if `m` contains a non-finite entry.
pub fn svd(m: &Matrix) -> Svd {
    assert!(
        m.iter().all(|x| x.is_finite()),
        "matrix has non-finite entries"
    );
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Svd {
            u: Matrix::identity(rows, rows),
            sigma: Vec::new(),
            v: Matrix::identity(cols, cols),
        };
    }
    const NUDGE: f64 = 1.0 + 1.0 / 1048576.0;
    let (u, s, v) = faer_svd(m)
        .or_else(|| faer_svd(&m.transpose()).map(|(u, s, v)| (v, s, u)))
        .or_else(|| {
            faer_svd(&(m * NUDGE))
                .map(|(u, s, v)| (u, s.into_iter().map(|x| x / NUDGE).collect(), v))
        })
        .expect("SVD iteration converges");
    let k = rows.min(cols);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let perm = |j: usize| if j < k { order[j] } else { j };
    Svd {
        u: Matrix::from_fn(rows, rows, |i, j| u[(i, perm(j))]),
        sigma: order.iter().map(|&i| s[i]).collect(),
        v: Matrix::from_fn(cols, cols, |i, j| v[(i, perm(j))]),
    }
}

/// Minimum-norm least-squares solution of `a x = b`, discarding singular
/// values at or below `tol` (default as in [`numerical_rank`]).
pub fn lstsq(a: &Matrix, b: &Vector, tol: Option<f64>) -> Vector {
    assert_eq!(a.nrows(), b.len(), "right-hand side length differs");
    let d = svd(a);
    let sigma_max = d.sigma.first().copied().unwrap_or(0.0);
    let tol = tol.unwrap_or_else(|| default_tolerance(a.nrows(), a.ncols(), sigma_max));
    let mut x = Vector::zeros(a.ncols());
    for (i, &s) in d.sigma.iter().enumerate().take_while(|&(_, &s)| s > tol) {
        let coeff = d.u.column(i).dot(b) / s;
        x += d.v.column(i) * coeff;
    }
    x
}

/// Numerical rank of `m` with optional absolute tolerance.
///
/// # Panics
///
/// Panics if `m` contains a non-finite entry.
pub fn numerical_rank(m: &Matrix, tol: Option<f64>) -> RankReport {
    let sv = singular_values(m);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tolerance_used = tol.unwrap_or_else(|| default_tolerance(m.nrows(), m.ncols(), sigma_max));
    let rank = sv.iter().take_while(|&&s| s > tolerance_used).count();
    let gap_ratio = match sv.get(rank) {
        None => f64::INFINITY,
        Some(0.0) => f64::INFINITY,
        Some(&next) => match rank {
            0 => 0.0,
            r => sv[r - 1] / next,
        },
    };
    RankReport {
        rank,
        singular_values: sv,
        tolerance_used,
        gap_ratio,
    }
}

pub fn rank(m: &Matrix) -> usize {
    numerical_rank(m, None).rank
}

/// Orthonormal basis of the numerical null space of `m`, as columns.
pub fn kernel_basis(m: &Matrix, tol: Option<f64>) -> Matrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Matrix::zeros(0, 0);
    }
    if rows == 0 {
        return Matrix::identity(cols, cols);
    }
    let report = numerical_rank(m, tol);
    svd(m)
        .v
        .columns(report.rank, cols - report.rank)
        .into_owned()
}

/// Orthonormal basis of the numerical column space of `m`.
pub fn range_basis(m: &Matrix, tol: Option<f64>) -> Matrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Matrix::zeros(rows, 0);
    }
    let report = numerical_rank(m, tol);
    svd(m).u.columns(0, report.rank).into_owned()
}

/// Cosines of the principal angles between two subspaces given by
/// orthonormal bases, in nonincreasing order.
pub fn principal_cosines(a: &Matrix, b: &Matrix) -> Vec<f64> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return Vec::new();
    }
    singular_values(&(a.transpose() * b))
}

/// Dimension of the intersection of two subspaces (orthonormal bases),
/// counting principal angles whose cosine is within `angle_tol` of one.
pub fn intersection_dim(a: &Matrix, b: &Matrix, angle_tol: f64) -> usize {
    principal_cosines(a, b)
        .into_iter()
        .filter(|&c| c > 1.0 - angle_tol)
        .count()
}

/// Spectral-norm distance between the orthogonal projectors onto two
/// subspaces given by orthonormal bases of the same ambient dimension.
pub fn subspace_distance(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.nrows(), b.nrows(), "ambient dimensions differ");
    let pa = a * a.transpose();
    let pb = b * b.transpose();
    let diff = pa - pb;
    singular_values(&diff).first().copied().unwrap_or(0.0)
}

pub fn hstack(blocks: &[&Matrix]) -> Matrix {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, c0), b.shape()).copy_from(*b);
        c0 += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&Matrix]) -> Matrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((r0, 0), b.shape()).copy_from(*b);
        r0 += b.nrows();
    }
    out
}

pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Largest absolute entry, zero for an empty matrix.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Spectral norm.
pub fn norm2(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}
