//! Monte Carlo estimate of the incorrect assignment rate.
//!
//! Run `r` draws its noise from a ChaCha20 generator seeded with the sweep
//! seed and switched to stream `r`. The same standard-normal draws are
//! reused for every scaling factor and every method, so all methods see
//! identical realizations and curves over `c` share their randomness.

use std::fmt;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{
    build_full_matrix, build_reduced_matrix, count_incorrect, solve_lap, Assignment,
};
use crate::error::{Error, Result};
use crate::gevo::fusion_optimal_reduction;
use crate::maximin::{association_optimal_reduction, StepBounds, DEFAULT_K_MAX};
use crate::simulation::scenario::{draw_noise, realize, scale_spatial, Scenario, ScenarioFactors};
use crate::tracks::{reduce_estimate, ReductionMap, TrackSet};

/// How agent 2 prepares the tracks it sends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Full estimates, no reduction.
    Full,
    /// Fusion-optimal reductions (needs agent 1's covariances).
    FusionOpt,
    /// Association-quality-based reductions from agent 2's data only.
    AssocOpt,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Full, Method::FusionOpt, Method::AssocOpt];

    pub fn name(self) -> &'static str {
        match self {
            Method::Full => "full",
            Method::FusionOpt => "fusion-opt",
            Method::AssocOpt => "assoc-opt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters the reduced methods need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub m: usize,
    pub bounds: StepBounds,
    pub k_max: usize,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            m: 1,
            bounds: StepBounds::default(),
            k_max: DEFAULT_K_MAX,
        }
    }
}

/// Reduces every agent-2 track with its own map, builds the reduced
/// assignment matrix and solves it.
pub fn associate_reduced(
    s1: &TrackSet,
    s2: &TrackSet,
    maps: &[ReductionMap],
) -> Result<Assignment> {
    if maps.len() != s2.len() {
        return Err(Error::DimensionMismatch {
            context: "maps vs agent-2 tracks",
            expected: s2.len(),
            actual: maps.len(),
        });
    }
    let reduced = s2
        .estimates()
        .iter()
        .zip(maps)
        .map(|(e, map)| reduce_estimate(e, map))
        .collect::<Result<Vec<_>>>()?;
    solve_lap(&build_reduced_matrix(s1, &reduced)?)
}

/// Fusion-optimal map for every track, from both agents' covariances.
pub fn fusion_maps(s1: &TrackSet, s2: &TrackSet, m: usize) -> Result<Vec<ReductionMap>> {
    s1.estimates()
        .iter()
        .zip(s2.estimates())
        .map(|(a, b)| fusion_optimal_reduction(a.cov(), b.cov(), m))
        .collect()
}

/// Association-based map for every track, from agent 2's tracks only.
pub fn assoc_maps(s2: &TrackSet, params: &RunParams) -> Result<Vec<ReductionMap>> {
    if params.m != 1 {
        return Err(Error::InvalidArgument(format!(
            "association-based reduction supports m = 1 only, got {}",
            params.m
        )));
    }
    (0..s2.len())
        .map(|j| {
            association_optimal_reduction(s2, j, params.bounds, params.k_max).map(|(map, _)| map)
        })
        .collect()
}

/// Number of incorrectly associated tracks for one realization.
pub fn run_single(
    s1: &TrackSet,
    s2: &TrackSet,
    method: Method,
    params: &RunParams,
) -> Result<usize> {
    let assignment = match method {
        Method::Full => solve_lap(&build_full_matrix(s1, s2)?)?,
        Method::FusionOpt => associate_reduced(s1, s2, &fusion_maps(s1, s2, params.m)?)?,
        Method::AssocOpt => associate_reduced(s1, s2, &assoc_maps(s2, params)?)?,
    };
    Ok(count_incorrect(&assignment))
}

/// Sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub runs: usize,
    pub c_grid: Vec<f64>,
    pub seed: u64,
    pub bounds: StepBounds,
    pub k_max: usize,
    pub methods: Vec<Method>,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.c_grid.is_empty() {
            return Err(Error::InvalidArgument("c_grid must not be empty".into()));
        }
        if self.c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidArgument(
                "c_grid values must be positive".into(),
            ));
        }
        if self.c_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "c_grid must be strictly ascending".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one method is required".into(),
            ));
        }
        Ok(())
    }
}

/// Incorrect assignment rate for one method at one scaling factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub method: Method,
    pub c: f64,
    pub p_ic_mean: f64,
    pub p_ic_std: f64,
    pub runs: usize,
}

/// Sweep output, ordered method by method and ascending in `c`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct McResult {
    pub rows: Vec<McRow>,
}

impl McResult {
    pub fn curve(&self, method: Method) -> Vec<&McRow> {
        self.rows.iter().filter(|r| r.method == method).collect()
    }

    pub fn get(&self, method: Method, c: f64) -> Option<&McRow> {
        self.rows.iter().find(|r| r.method == method && r.c == c)
    }
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Generator for run `run` of a sweep seeded with `seed`.
pub fn run_rng(seed: u64, run: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

pub fn mc_sweep(cfg: &McConfig, scenario: &Scenario) -> Result<McResult> {
    cfg.validate()?;
    let count = scenario.num_targets();
    let n = scenario.dim();
    let params = RunParams {
        m: scenario.reduced_dim(),
        bounds: cfg.bounds,
        k_max: cfg.k_max,
    };

    // per_c[c][method] = incorrect counts in run order
    let mut per_c: Vec<Vec<Vec<usize>>> = Vec::with_capacity(cfg.c_grid.len());
    for &c in &cfg.c_grid {
        let scaled = scale_spatial(scenario, c)?;
        let factors = ScenarioFactors::new(&scaled)?;
        let counts: Vec<Vec<usize>> = (0..cfg.runs as u64)
            .into_par_iter()
            .map(|run| {
                let noise = draw_noise(&mut run_rng(cfg.seed, run), count, n);
                let (s1, s2) = realize(&scaled, &factors, &noise)?;
                cfg.methods
                    .iter()
                    .map(|&method| run_single(&s1, &s2, method, &params))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        per_c.push(counts);
    }

    let mut rows = Vec::with_capacity(cfg.methods.len() * cfg.c_grid.len());
    for (k, &method) in cfg.methods.iter().enumerate() {
        for (ci, &c) in cfg.c_grid.iter().enumerate() {
            let rates: Vec<f64> = per_c[ci]
                .iter()
                .map(|run| run[k] as f64 / count as f64)
                .collect();
            let (p_ic_mean, p_ic_std) = mean_std(&rates);
            rows.push(McRow {
                method,
                c,
                p_ic_mean,
                p_ic_std,
                runs: cfg.runs,
            });
        }
    }
    Ok(McResult { rows })
}

/// Spearman rank correlation with average ranks for ties. Returns NaN when
/// either input is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut k = 0;
        while k < idx.len() {
            let mut end = k;
            while end + 1 < idx.len() && v[idx[end + 1]] == v[idx[k]] {
                end += 1;
            }
            let avg = (k + end) as f64 / 2.0 + 1.0;
            for &i in &idx[k..=end] {
                r[i] = avg;
            }
            k = end + 1;
        }
        r
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let (mx, _) = mean_std(&rx);
    let (my, _) = mean_std(&ry);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
