//! Ground-truth scenarios and noisy realizations of both agents' tracks.
//!
//! States are ordered `(px, py, vx, vy, ax, ay)`: the first two components
//! are the spatial ones affected by [`scale_spatial`].

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SpdFactor};
use crate::tracks::{Agent, TrackSet};

/// Number of leading state components that are spatial positions.
pub const SPATIAL_DIMS: usize = 2;

/// Target layout of the default ten-target scenario.
pub const DEFAULT_POSITIONS: [[f64; 2]; 10] = [
    [0.0, 0.0],
    [1.0, 10.0],
    [5.0, 5.0],
    [6.0, 12.0],
    [9.0, 8.0],
    [11.0, 4.0],
    [3.0, -1.0],
    [8.0, -1.0],
    [-2.0, 8.0],
    [-3.0, 3.0],
];

/// Ground truth plus the fixed covariances of both agents.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    targets: Vec<DVector<f64>>,
    cov1: Vec<DMatrix<f64>>,
    cov2: Vec<DMatrix<f64>>,
    m: usize,
}

impl Scenario {
    pub fn new(
        targets: Vec<DVector<f64>>,
        cov1: Vec<DMatrix<f64>>,
        cov2: Vec<DMatrix<f64>>,
        m: usize,
    ) -> Result<Self> {
        let count = targets.len();
        if count == 0 {
            return Err(Error::Scenario("scenario has no targets".into()));
        }
        if cov1.len() != count || cov2.len() != count {
            return Err(Error::Scenario(format!(
                "{count} targets but {} / {} covariances",
                cov1.len(),
                cov2.len()
            )));
        }
        let n = targets[0].len();
        if m == 0 || m > n {
            return Err(Error::Scenario(format!(
                "reduced dimension {m} invalid for n = {n}"
            )));
        }
        for (k, x) in targets.iter().enumerate() {
            if x.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "target state dimension",
                    expected: n,
                    actual: x.len(),
                });
            }
            for y in &targets[..k] {
                if x == y {
                    return Err(Error::Scenario(format!(
                        "target {} duplicates an earlier one",
                        k + 1
                    )));
                }
            }
        }
        for r in cov1.iter().chain(&cov2) {
            if r.nrows() != n {
                return Err(Error::DimensionMismatch {
                    context: "scenario covariance dimension",
                    expected: n,
                    actual: r.nrows(),
                });
            }
            linalg::check_spd(r, "scenario covariance")?;
        }
        Ok(Self {
            targets,
            cov1,
            cov2,
            m,
        })
    }

    pub fn targets(&self) -> &[DVector<f64>] {
        &self.targets
    }

    pub fn cov1(&self) -> &[DMatrix<f64>] {
        &self.cov1
    }

    pub fn cov2(&self) -> &[DMatrix<f64>] {
        &self.cov2
    }

    /// Number of targets `N`.
    pub fn num_targets(&self) -> usize {
        self.targets.len()
    }

    /// State dimension `n`.
    pub fn dim(&self) -> usize {
        self.targets[0].len()
    }

    /// Reduced dimension `m`.
    pub fn reduced_dim(&self) -> usize {
        self.m
    }
}

/// Recipe for [`generate_scenario`].
///
/// Each covariance is `R = D (G G^T / n + 0.1 I) D` with `G` an `n x n`
/// matrix of independent standard normals drawn from a ChaCha20 stream
/// seeded with `cov_seed`, and `D` a diagonal of per-component standard
/// deviations: `position_std` for `(px, py)`, `velocity_std` for
/// `(vx, vy)`, `acceleration_std` for the rest. Draw order is target by
/// target, agent 1 before agent 2, `G` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSpec {
    pub positions: Vec<[f64; 2]>,
    pub n: usize,
    pub m: usize,
    pub cov_seed: u64,
    pub position_std: f64,
    pub velocity_std: f64,
    pub acceleration_std: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            positions: DEFAULT_POSITIONS.to_vec(),
            n: 6,
            m: 1,
            cov_seed: 2023,
            position_std: 0.2,
            velocity_std: 1.0,
            acceleration_std: 1.0,
        }
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> std::result::Result<(), (String, String)> {
        let field = |name: &str, msg: String| Err((name.to_string(), msg));
        if self.positions.is_empty() {
            return field(
                "positions",
                "at least one target position is required".into(),
            );
        }
        if self.n < SPATIAL_DIMS {
            return field(
                "n",
                format!("must be at least {SPATIAL_DIMS}, got {}", self.n),
            );
        }
        if self.m == 0 || self.m >= self.n {
            return field(
                "m",
                format!("must satisfy 1 <= m < n = {}, got {}", self.n, self.m),
            );
        }
        for (name, v) in [
            ("position_std", self.position_std),
            ("velocity_std", self.velocity_std),
            ("acceleration_std", self.acceleration_std),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return field(name, format!("must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }

    fn component_std(&self, k: usize) -> f64 {
        match k {
            0 | 1 => self.position_std,
            2 | 3 => self.velocity_std,
            _ => self.acceleration_std,
        }
    }
}

/// `G G^T / n + 0.1 I` congruence-scaled by `stds`.
pub fn random_covariance<R: Rng + ?Sized>(rng: &mut R, stds: &[f64]) -> DMatrix<f64> {
    let n = stds.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let core = &g * g.transpose() / n as f64 + DMatrix::identity(n, n) * 0.1;
    let d = DMatrix::from_diagonal(&DVector::from_row_slice(stds));
    linalg::symmetrize(&(&d * core * &d))
}

pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()
        .map_err(|(field, msg)| Error::Scenario(format!("{field}: {msg}")))?;
    let n = spec.n;
    let stds: Vec<f64> = (0..n).map(|k| spec.component_std(k)).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(spec.cov_seed);
    let mut targets = Vec::with_capacity(spec.positions.len());
    let mut cov1 = Vec::with_capacity(spec.positions.len());
    let mut cov2 = Vec::with_capacity(spec.positions.len());
    for p in &spec.positions {
        let mut x = DVector::zeros(n);
        x[0] = p[0];
        x[1] = p[1];
        targets.push(x);
        cov1.push(random_covariance(&mut rng, &stds));
        cov2.push(random_covariance(&mut rng, &stds));
    }
    Scenario::new(targets, cov1, cov2, spec.m)
}

/// Scales the variance of the spatial components by `c`:
/// `R <- D R D` with `D = diag(sqrt(c), sqrt(c), 1, ..., 1)`.
pub fn scale_spatial(s: &Scenario, c: f64) -> Result<Scenario> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "scaling factor must be positive, got {c}"
        )));
    }
    let n = s.dim();
    let d = DMatrix::from_diagonal(&DVector::from_fn(n, |k, _| {
        if k < SPATIAL_DIMS {
            c.sqrt()
        } else {
            1.0
        }
    }));
    let scale = |r: &DMatrix<f64>| linalg::symmetrize(&(&d * r * &d));
    Scenario::new(
        s.targets.clone(),
        s.cov1.iter().map(scale).collect(),
        s.cov2.iter().map(scale).collect(),
        s.m,
    )
}

/// Standard-normal draws behind one realization: one vector per track and
/// agent.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    pub agent1: Vec<DVector<f64>>,
    pub agent2: Vec<DVector<f64>>,
}

/// Draws, target by target, agent 1's vector then agent 2's.
pub fn draw_noise<R: Rng + ?Sized>(rng: &mut R, num_targets: usize, n: usize) -> NoiseDraw {
    let mut agent1 = Vec::with_capacity(num_targets);
    let mut agent2 = Vec::with_capacity(num_targets);
    for _ in 0..num_targets {
        agent1.push(DVector::from_fn(n, |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        }));
        agent2.push(DVector::from_fn(n, |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        }));
    }
    NoiseDraw { agent1, agent2 }
}

/// Cholesky factors of every covariance of a scenario.
#[derive(Debug, Clone)]
pub struct ScenarioFactors {
    l1: Vec<DMatrix<f64>>,
    l2: Vec<DMatrix<f64>>,
}

impl ScenarioFactors {
    pub fn new(s: &Scenario) -> Result<Self> {
        let chol = |r: &DMatrix<f64>| SpdFactor::new(r).map(|f| f.l());
        Ok(Self {
            l1: s.cov1.iter().map(chol).collect::<Result<_>>()?,
            l2: s.cov2.iter().map(chol).collect::<Result<_>>()?,
        })
    }
}

/// `y = x + L w` for both agents.
pub fn realize(
    s: &Scenario,
    factors: &ScenarioFactors,
    noise: &NoiseDraw,
) -> Result<(TrackSet, TrackSet)> {
    let count = s.num_targets();
    if noise.agent1.len() != count || noise.agent2.len() != count {
        return Err(Error::DimensionMismatch {
            context: "noise draw vs target count",
            expected: count,
            actual: noise.agent1.len().min(noise.agent2.len()),
        });
    }
    let y1 = (0..count)
        .map(|i| &s.targets[i] + &factors.l1[i] * &noise.agent1[i])
        .collect();
    let y2 = (0..count)
        .map(|i| &s.targets[i] + &factors.l2[i] * &noise.agent2[i])
        .collect();
    Ok((
        TrackSet::from_parts(y1, s.cov1.clone(), Agent::One)?,
        TrackSet::from_parts(y2, s.cov2.clone(), Agent::Two)?,
    ))
}

/// One noisy realization of both agents' track sets.
pub fn sample_realization<R: Rng + ?Sized>(
    s: &Scenario,
    rng: &mut R,
) -> Result<(TrackSet, TrackSet)> {
    let factors = ScenarioFactors::new(s)?;
    let noise = draw_noise(rng, s.num_targets(), s.dim());
    realize(s, &factors, &noise)
}
