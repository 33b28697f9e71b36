//! Small fixed-geometry experiments: the two-target motivating example, the
//! realization-randomness demo and the step-size comparison for the maximin
//! ascent.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::assignment::{build_reduced_matrix, solve_lap, Assignment, AssignmentMatrix};
use crate::error::Result;
use crate::gevo::fusion_optimal_reduction;
use crate::maximin::{maximin_reduction, OptimizerState, StepBounds, StepRule};
use crate::simulation::scenario::{random_covariance, sample_realization, Scenario};
use crate::tracks::{fusion_loss, kalman_fuse, reduce_estimate, Agent, ReductionMap, TrackSet};

fn diag2(a: f64, b: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![a, b]))
}

fn v2(a: f64, b: f64) -> DVector<f64> {
    DVector::from_vec(vec![a, b])
}

/// `Psi(alpha) = [cos alpha, sin alpha]` for `alpha` in degrees.
pub fn angle_map(alpha_deg: f64) -> Result<ReductionMap> {
    let a = alpha_deg.to_radians();
    ReductionMap::new(DMatrix::from_row_slice(1, 2, &[a.cos(), a.sin()]))
}

/// Two targets, two agents, `n = 2`. Agent 1 is uncertain mostly along
/// `y` (`R1 = diag(0.75, 2)`), agent 2 mostly along `x`
/// (`R2 = diag(2, 0.75)`); both tracks of an agent share the covariance.
/// The estimates sit so that at `alpha = 90` degrees agent 1's track 1
/// projects onto agent 2's track 2 and vice versa.
pub fn motivating_tracks() -> Result<(TrackSet, TrackSet)> {
    let r1 = diag2(0.75, 2.0);
    let r2 = diag2(2.0, 0.75);
    let s1 = TrackSet::from_parts(
        vec![v2(-0.5, -1.0), v2(3.5, 1.0)],
        vec![r1.clone(), r1],
        Agent::One,
    )?;
    let s2 = TrackSet::from_parts(
        vec![v2(0.0, 1.0), v2(4.0, -1.0)],
        vec![r2.clone(), r2],
        Agent::Two,
    )?;
    Ok((s1, s2))
}

/// Losses of the motivating example at one angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotivatingRow {
    pub alpha_deg: f64,
    /// Assignment cost of the correct pairing, `r11^2 + r22^2`.
    pub j0: f64,
    /// Assignment cost of the swapped pairing, `r12^2 + r21^2`.
    pub je: f64,
    /// `trace(P)` of the fused estimate (equal for both targets).
    pub trace_p: f64,
}

/// Evaluates both losses with the same `Psi(alpha)` for both tracks at
/// every angle of `grid` (degrees).
pub fn motivating_example(grid: &[f64]) -> Result<Vec<MotivatingRow>> {
    let (s1, s2) = motivating_tracks()?;
    grid.iter()
        .map(|&alpha_deg| {
            let map = angle_map(alpha_deg)?;
            let reduced = s2
                .estimates()
                .iter()
                .map(|e| reduce_estimate(e, &map))
                .collect::<Result<Vec<_>>>()?;
            let a = build_reduced_matrix(&s1, &reduced)?;
            let c = a.costs();
            let fused = kalman_fuse(&s1[0], &reduced[0])?;
            Ok(MotivatingRow {
                alpha_deg,
                j0: c[(0, 0)] + c[(1, 1)],
                je: c[(0, 1)] + c[(1, 0)],
                trace_p: fusion_loss(&fused),
            })
        })
        .collect()
}

/// `0, step, 2 step, ...` up to and including `180` degrees.
pub fn angle_grid(step_deg: f64) -> Vec<f64> {
    let count = (180.0 / step_deg).round() as usize;
    (0..=count).map(|k| k as f64 * step_deg).collect()
}

/// Two targets at `(0, 0)` and `(4, 1)`; agent 1 has `R1 = diag(1, 4)` and
/// agent 2 `R2 = diag(4, 1)` for both.
pub fn realization_scenario() -> Result<Scenario> {
    Scenario::new(
        vec![v2(0.0, 0.0), v2(4.0, 1.0)],
        vec![diag2(1.0, 4.0); 2],
        vec![diag2(4.0, 1.0); 2],
        1,
    )
}

/// Two hand-placed realizations of [`realization_scenario`]: the first is
/// associated correctly by the fusion-optimal reduction, the second is
/// swapped.
pub fn realization_fixtures() -> Result<[(TrackSet, TrackSet); 2]> {
    let s = realization_scenario()?;
    let make = |y1: [DVector<f64>; 2], y2: [DVector<f64>; 2]| -> Result<(TrackSet, TrackSet)> {
        Ok((
            TrackSet::from_parts(y1.to_vec(), s.cov1().to_vec(), Agent::One)?,
            TrackSet::from_parts(y2.to_vec(), s.cov2().to_vec(), Agent::Two)?,
        ))
    };
    Ok([
        make(
            [v2(-0.5, -0.5), v2(5.0, 1.25)],
            [v2(-1.0, 0.0), v2(4.25, 1.75)],
        )?,
        make(
            [v2(-0.25, 1.0), v2(4.75, 0.0)],
            [v2(-0.5, 0.25), v2(4.75, 0.75)],
        )?,
    ])
}

/// Default seeds for [`realization_demo`]: the first realization is
/// associated correctly, the second is not.
pub const DEMO_SEEDS: (u64, u64) = (1, 0);

/// Output of [`realization_demo`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationDemo {
    /// The shared fusion-optimal map.
    pub map: ReductionMap,
    pub matrices: [AssignmentMatrix; 2],
    pub assignments: [Assignment; 2],
}

/// Reduced assignment with the shared fusion-optimal map for a given pair
/// of track sets.
pub fn reduced_assignment(
    s1: &TrackSet,
    s2: &TrackSet,
    map: &ReductionMap,
) -> Result<(AssignmentMatrix, Assignment)> {
    let reduced = s2
        .estimates()
        .iter()
        .map(|e| reduce_estimate(e, map))
        .collect::<Result<Vec<_>>>()?;
    let a = build_reduced_matrix(s1, &reduced)?;
    let sol = solve_lap(&a)?;
    Ok((a, sol))
}

/// Two seeded noise realizations of [`realization_scenario`], reduced with
/// the same fusion-optimal map.
pub fn realization_demo(seeds: (u64, u64)) -> Result<RealizationDemo> {
    let s = realization_scenario()?;
    let map = fusion_optimal_reduction(&s.cov1()[0], &s.cov2()[0], 1)?;
    let run = |seed: u64| -> Result<(AssignmentMatrix, Assignment)> {
        let (s1, s2) = sample_realization(&s, &mut ChaCha20Rng::seed_from_u64(seed))?;
        reduced_assignment(&s1, &s2, &map)
    };
    let (a1, p1) = run(seeds.0)?;
    let (a2, p2) = run(seeds.1)?;
    Ok(RealizationDemo {
        map,
        matrices: [a1, a2],
        assignments: [p1, p2],
    })
}

/// Settings of the step-size comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceSpec {
    pub seed: u64,
    pub num_targets: usize,
    pub n: usize,
    /// Spread (standard deviation) of the random target states.
    pub spread: f64,
    pub alpha_low: f64,
    pub alpha_high: f64,
    pub k_max: usize,
}

/// Seed whose comparison is shipped as the reference example.
pub const TRACE_DEMO_SEED: u64 = 1;

impl Default for TraceSpec {
    fn default() -> Self {
        Self {
            seed: TRACE_DEMO_SEED,
            num_targets: 3,
            n: 4,
            spread: 2.0,
            alpha_low: crate::maximin::DEFAULT_ALPHA_LOW,
            alpha_high: crate::maximin::DEFAULT_ALPHA_HIGH,
            k_max: crate::maximin::DEFAULT_K_MAX,
        }
    }
}

/// Agent-2 tracks for the comparison: target states with i.i.d.
/// `N(0, spread^2)` components, covariances from [`random_covariance`] with
/// unit scales, and one noisy estimate per target. Everything comes from a
/// single ChaCha20 stream seeded with `spec.seed`.
pub fn trace_tracks(spec: &TraceSpec) -> Result<TrackSet> {
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let unit = vec![1.0; n];
    let mut means = Vec::with_capacity(spec.num_targets);
    let mut covs = Vec::with_capacity(spec.num_targets);
    for _ in 0..spec.num_targets {
        let x = DVector::from_fn(n, |_, _| spec.spread * rng.sample::<f64, _>(StandardNormal));
        let r = random_covariance(&mut rng, &unit);
        let l = crate::linalg::SpdFactor::new(&r)?.l();
        let w = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        means.push(x + l * w);
        covs.push(r);
    }
    TrackSet::from_parts(means, covs, Agent::Two)
}

/// Maximin traces for the last track with the adaptive step, a small fixed
/// step (`alpha_low`) and a large fixed step (`alpha_high`).
#[derive(Debug, Clone, PartialEq)]
pub struct StepComparison {
    pub adaptive: Vec<OptimizerState>,
    pub small: Vec<OptimizerState>,
    pub large: Vec<OptimizerState>,
}

impl StepComparison {
    pub fn variants(&self) -> [(&'static str, &[OptimizerState]); 3] {
        [
            ("adaptive", &self.adaptive),
            ("small", &self.small),
            ("large", &self.large),
        ]
    }

    /// Worst ratio at the final iterate of each variant.
    pub fn terminal_f_min(&self) -> [f64; 3] {
        self.variants()
            .map(|(_, t)| t.last().expect("non-empty trace").f_min())
    }
}

pub fn optimizer_trace(spec: &TraceSpec) -> Result<StepComparison> {
    let s2 = trace_tracks(spec)?;
    let j = s2.len().saturating_sub(1);
    let bounds = StepBounds::new(spec.alpha_low, spec.alpha_high)?;
    let run = |rule| maximin_reduction(&s2, j, rule, spec.k_max).map(|(_, t)| t);
    Ok(StepComparison {
        adaptive: run(StepRule::Adaptive(bounds))?,
        small: run(StepRule::Fixed(spec.alpha_low))?,
        large: run(StepRule::Fixed(spec.alpha_high))?,
    })
}
