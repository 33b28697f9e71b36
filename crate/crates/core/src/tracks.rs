//! Track estimates, dimension-reducing maps and the Kalman fuser.
//!
//! Labels are 0-based in this crate. Files written by the CLI convert to
//! 1-based labels at the boundary.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, SpdFactor};

/// Mean and covariance of one agent's estimate of one target.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    label: usize,
}

impl Estimate {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, label: usize) -> Result<Self> {
        if mean.len() != cov.nrows() {
            return Err(Error::DimensionMismatch {
                context: "estimate mean vs covariance",
                expected: cov.nrows(),
                actual: mean.len(),
            });
        }
        if mean.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("estimate mean"));
        }
        linalg::check_spd(&cov, "estimate covariance")?;
        Ok(Self { mean, cov, label })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Which agent holds a [`TrackSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    One,
    Two,
}

/// All tracks of one agent, labeled `0..N` in order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSet {
    estimates: Vec<Estimate>,
    agent: Agent,
}

impl TrackSet {
    pub fn new(estimates: Vec<Estimate>, agent: Agent) -> Result<Self> {
        if let Some(first) = estimates.first() {
            let n = first.dim();
            for (k, e) in estimates.iter().enumerate() {
                if e.dim() != n {
                    return Err(Error::DimensionMismatch {
                        context: "track set state dimension",
                        expected: n,
                        actual: e.dim(),
                    });
                }
                if e.label() != k {
                    return Err(Error::InvalidArgument(format!(
                        "track {k} carries label {}; labels must be 0..N in order",
                        e.label()
                    )));
                }
            }
        }
        Ok(Self { estimates, agent })
    }

    /// Builds a set from parallel lists of means and covariances, labeling
    /// them in order.
    pub fn from_parts(
        means: Vec<DVector<f64>>,
        covs: Vec<DMatrix<f64>>,
        agent: Agent,
    ) -> Result<Self> {
        if means.len() != covs.len() {
            return Err(Error::DimensionMismatch {
                context: "track set means vs covariances",
                expected: means.len(),
                actual: covs.len(),
            });
        }
        let estimates = means
            .into_iter()
            .zip(covs)
            .enumerate()
            .map(|(k, (y, r))| Estimate::new(y, r, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(estimates, agent)
    }

    pub fn estimates(&self) -> &[Estimate] {
        &self.estimates
    }

    pub fn agent(&self) -> Agent {
        self.agent
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    /// State dimension, or 0 for an empty set.
    pub fn dim(&self) -> usize {
        self.estimates.first().map_or(0, Estimate::dim)
    }
}

impl std::ops::Index<usize> for TrackSet {
    type Output = Estimate;

    fn index(&self, i: usize) -> &Estimate {
        &self.estimates[i]
    }
}

/// Relative singular-value threshold below which a map counts as rank
/// deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Full-rank `m x n` matrix compressing an `n`-dimensional estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMap {
    psi: DMatrix<f64>,
}

impl ReductionMap {
    /// A proper reduction, `m < n`.
    pub fn new(psi: DMatrix<f64>) -> Result<Self> {
        if psi.nrows() >= psi.ncols() {
            return Err(Error::InvalidArgument(format!(
                "reduction map must have fewer rows than columns, got {}x{}",
                psi.nrows(),
                psi.ncols()
            )));
        }
        Self::with_full_rank(psi)
    }

    /// Like [`ReductionMap::new`] but also accepts square maps. Used when
    /// comparing reduced computations against their full-dimension
    /// counterparts.
    pub fn with_full_rank(psi: DMatrix<f64>) -> Result<Self> {
        if psi.nrows() == 0 || psi.nrows() > psi.ncols() {
            return Err(Error::InvalidArgument(format!(
                "reduction map shape {}x{} is not allowed",
                psi.nrows(),
                psi.ncols()
            )));
        }
        linalg::check_finite(&psi, "reduction map")?;
        let sv = psi.clone().svd(false, false).singular_values;
        let hi = sv.iter().copied().fold(0.0f64, f64::max);
        let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if !(hi > 0.0) || lo <= RANK_TOL * hi {
            let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
            return Err(Error::RankDeficient(ratio));
        }
        Ok(Self { psi })
    }

    /// Single-row map from a (non-zero) vector.
    pub fn from_row(row: &DVector<f64>) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(1, row.len(), row.as_slice()))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            psi: DMatrix::identity(n, n),
        }
    }

    pub fn psi(&self) -> &DMatrix<f64> {
        &self.psi
    }

    /// Reduced dimension `m`.
    pub fn rows(&self) -> usize {
        self.psi.nrows()
    }

    /// Full dimension `n`.
    pub fn cols(&self) -> usize {
        self.psi.ncols()
    }

    /// `Psi A Psi^T`, symmetrized.
    pub fn congruence(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        linalg::symmetrize(&(&self.psi * a * self.psi.transpose()))
    }
}

/// The estimate agent 2 actually transmits: `(Psi y, Psi R Psi^T)` plus the
/// map itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedEstimate {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    map: ReductionMap,
    label: usize,
}

impl ReducedEstimate {
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn map(&self) -> &ReductionMap {
        &self.map
    }

    pub fn label(&self) -> usize {
        self.label
    }
}

/// Result of the Kalman fuser.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedEstimate {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

pub fn reduce_estimate(e: &Estimate, map: &ReductionMap) -> Result<ReducedEstimate> {
    if map.cols() != e.dim() {
        return Err(Error::DimensionMismatch {
            context: "reduction map columns vs estimate dimension",
            expected: e.dim(),
            actual: map.cols(),
        });
    }
    let mean = map.psi() * e.mean();
    let cov = map.congruence(e.cov());
    Ok(ReducedEstimate {
        mean,
        cov,
        map: map.clone(),
        label: e.label(),
    })
}

/// MSE-optimal fusion of a full local estimate with an uncorrelated
/// dimension-reduced one:
/// `P = (R1^-1 + Psi^T R_psi^-1 Psi)^-1`, `x = P (R1^-1 y1 + Psi^T R_psi^-1 y_psi)`.
pub fn kalman_fuse(local: &Estimate, reduced: &ReducedEstimate) -> Result<FusedEstimate> {
    let psi = reduced.map().psi();
    if psi.ncols() != local.dim() {
        return Err(Error::DimensionMismatch {
            context: "local estimate vs reduction map columns",
            expected: local.dim(),
            actual: psi.ncols(),
        });
    }
    let local_factor = SpdFactor::new(local.cov())?;
    let reduced_factor = SpdFactor::new(reduced.cov())?;

    let r1_inv = local_factor.inverse();
    let rpsi_inv_psi = reduced_factor.solve_mat(psi);
    let info = linalg::symmetrize(&(&r1_inv + psi.transpose() * &rpsi_inv_psi));
    let info_vec =
        &r1_inv * local.mean() + psi.transpose() * reduced_factor.solve_vec(reduced.mean());

    let info_factor = SpdFactor::new(&info)?;
    let cov = info_factor.inverse();
    let mean = &cov * info_vec;
    Ok(FusedEstimate { mean, cov })
}

/// `trace(P)`.
pub fn fusion_loss(f: &FusedEstimate) -> f64 {
    f.cov.trace()
}
