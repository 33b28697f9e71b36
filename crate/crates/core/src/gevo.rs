//! Fusion-optimal dimension reduction via a generalized eigenvalue problem.
//!
//! For the Kalman fuser the reduction minimizing `trace(P)` spans the
//! dominant generalized eigenvectors of `(R1^2, R1 + R2)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, SpdFactor};
use crate::tracks::ReductionMap;

/// Solution of `Q z = lambda S z` with eigenvalues ascending and
/// `S`-orthonormal eigenvectors (`z_k^T S z_l = delta_kl`).
#[derive(Debug, Clone, PartialEq)]
pub struct GevoSolution {
    pub eigenvalues: Vec<f64>,
    /// Eigenvector `k` is column `k`.
    pub eigenvectors: DMatrix<f64>,
}

/// Generalized symmetric-definite eigenproblem, solved by reducing to
/// `L^-1 Q L^-T w = lambda w` with `S = L L^T`.
pub fn gen_eig_spd(q: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<GevoSolution> {
    linalg::check_square(q, "gen_eig_spd Q")?;
    if q.nrows() != s.nrows() {
        return Err(Error::DimensionMismatch {
            context: "gen_eig_spd Q vs S",
            expected: q.nrows(),
            actual: s.nrows(),
        });
    }
    linalg::check_finite(q, "gen_eig_spd Q")?;
    linalg::check_spd(s, "gen_eig_spd S")?;
    let factor = SpdFactor::new(s)?;
    let l = factor.l();
    let l_inv_q = l
        .solve_lower_triangular(q)
        .ok_or_else(|| Error::EigenSolver("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&l_inv_q.transpose())
        .ok_or_else(|| Error::EigenSolver("singular Cholesky factor".into()))?;
    let (eigenvalues, w) = linalg::sym_eigen_sorted(&c);
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenSolver("non-finite eigenvalue".into()));
    }
    let eigenvectors = l
        .transpose()
        .solve_upper_triangular(&w)
        .ok_or_else(|| Error::EigenSolver("singular Cholesky factor".into()))?;
    Ok(GevoSolution {
        eigenvalues,
        eigenvectors,
    })
}

/// Reduction to `m` dimensions minimizing the trace of the Kalman-fused
/// covariance when agent 1 (covariance `r1`) fuses agent 2's (`r2`)
/// reduced estimate.
///
/// The dominant `m` eigenvectors are orthonormalized by QR, then rotated so
/// that `Psi R2 Psi^T` is diagonal. Each row is signed so its first
/// significant entry is positive.
pub fn fusion_optimal_reduction(
    r1: &DMatrix<f64>,
    r2: &DMatrix<f64>,
    m: usize,
) -> Result<ReductionMap> {
    let n = r1.nrows();
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!(
            "reduced dimension m = {m} must satisfy 1 <= m < n = {n}"
        )));
    }
    linalg::check_spd(r1, "fusion_optimal_reduction R1")?;
    linalg::check_spd(r2, "fusion_optimal_reduction R2")?;
    if r2.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "fusion_optimal_reduction R1 vs R2",
            expected: n,
            actual: r2.nrows(),
        });
    }
    let q = r1 * r1;
    let s = r1 + r2;
    let sol = gen_eig_spd(&q, &s)?;

    let dominant = sol.eigenvectors.columns(n - m, m).into_owned();
    let v = dominant.qr().q();
    let reduced_r2 = v.transpose() * r2 * &v;
    let (_, u) = linalg::sym_eigen_sorted(&reduced_r2);
    let mut psi = u.transpose() * v.transpose();
    linalg::canonical_row_signs(&mut psi, 1e-12);
    ReductionMap::new(psi)
}

/// Rayleigh ratio `(psi Q psi^T) / (psi S psi^T)` for a single row.
pub fn rayleigh_ratio(row: &DMatrix<f64>, q: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    let num = (row * q * row.transpose())[(0, 0)];
    let den = (row * s * row.transpose())[(0, 0)];
    num / den
}
