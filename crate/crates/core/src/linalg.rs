//! Small dense linear-algebra helpers shared by the estimation and
//! optimization modules.
//!
//! Everything here works on `nalgebra` dynamic matrices. SPD inverses and
//! solves go through a Cholesky factor; a factor whose diagonal spread
//! implies a condition number above [`MAX_CONDITION`] is rejected instead of
//! regularized.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest accepted condition number for SPD solves.
pub const MAX_CONDITION: f64 = 1e12;

/// Tolerance on `max |A - A^T|` for a matrix to count as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

pub fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// `(A + A^T) / 2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn check_square(a: &DMatrix<f64>, context: &'static str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.nrows(),
            actual: a.ncols(),
        });
    }
    Ok(())
}

pub fn check_finite(a: &DMatrix<f64>, context: &'static str) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}

/// Cholesky factor of a symmetric positive definite matrix, with a
/// condition-number guard.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactor {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        check_square(a, "SPD factorization")?;
        check_finite(a, "SPD factorization")?;
        let chol = a.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
        if !(lo > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        // (max l_ii / min l_ii)^2 is a lower bound on cond(A).
        let cond = (hi / lo).powi(2);
        if cond > MAX_CONDITION {
            return Err(Error::IllConditioned(cond));
        }
        Ok(Self { chol })
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    /// Symmetrized inverse.
    pub fn inverse(&self) -> DMatrix<f64> {
        symmetrize(&self.chol.inverse())
    }

    /// Lower-triangular factor `L` with `A = L L^T`.
    pub fn l(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `x^T A^{-1} x`.
    pub fn quad_inv(&self, x: &DVector<f64>) -> f64 {
        let l = self.chol.l_dirty();
        let w = l
            .solve_lower_triangular(x)
            .expect("Cholesky factor has a positive diagonal");
        w.norm_squared()
    }
}

/// Validates that `a` is symmetric (within [`SYMMETRY_TOL`]) and positive
/// definite.
pub fn check_spd(a: &DMatrix<f64>, context: &'static str) -> Result<()> {
    check_square(a, context)?;
    check_finite(a, context)?;
    let asym = max_asymmetry(a);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    a.clone()
        .cholesky()
        .map(|_| ())
        .ok_or(Error::NotPositiveDefinite)
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted
/// ascending. Columns of the returned matrix are the matching eigenvectors.
pub fn sym_eigen_sorted(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(symmetrize(a));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(a))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Flips the sign of each row so that its first entry with magnitude above
/// `tol` is positive.
pub fn canonical_row_signs(a: &mut DMatrix<f64>, tol: f64) {
    for mut row in a.row_iter_mut() {
        if let Some(first) = row.iter().copied().find(|x| x.abs() > tol) {
            if first < 0.0 {
                row.neg_mut();
            }
        }
    }
}

/// Principal-angle sines between the row spaces of two matrices with
/// orthonormal rows; returns the largest one.
pub fn max_principal_angle_sine(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let m = a * b.transpose();
    let svd = m.svd(false, false);
    let smallest_cos = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .min(1.0);
    (1.0 - smallest_cos * smallest_cos).max(0.0).sqrt()
}
