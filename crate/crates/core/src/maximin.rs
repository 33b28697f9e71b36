//! Association-quality-based reduction for a single track (`m = 1`).
//!
//! Agent 2 picks the row `Psi_j` that maximizes the smallest predicted
//! separation ratio
//! `f_i(z) = (z^T Y_ij z) / (z^T S_ij z)`, `Y_ij = y_ij y_ij^T`,
//! over its other tracks `i != j`, using only its own estimates. The ascent
//! moves along the maximizer of the currently worst ratio with a step
//! chosen from the first-order model of every ratio.

use nalgebra::{DMatrix, DVector};

use crate::assignment::projected_md;
use crate::error::{Error, Result};
use crate::linalg::SpdFactor;
use crate::tracks::{ReductionMap, TrackSet};

/// Default lower step bound.
pub const DEFAULT_ALPHA_LOW: f64 = 1e-3;
/// Default upper step bound.
pub const DEFAULT_ALPHA_HIGH: f64 = 0.5;
/// Default iteration budget.
pub const DEFAULT_K_MAX: usize = 25;

/// One ratio `f_i` for a fixed track `j`.
#[derive(Debug, Clone)]
pub struct RatioObjective {
    y_hat: DVector<f64>,
    y_outer: DMatrix<f64>,
    s_hat: DMatrix<f64>,
    s_factor: SpdFactor,
    index_i: usize,
}

impl RatioObjective {
    /// `y_hat = y2(i) - y2(j)`, `s_hat = R2(i) + R2(j)`.
    pub fn new(y_hat: DVector<f64>, s_hat: DMatrix<f64>, index_i: usize) -> Result<Self> {
        if y_hat.len() != s_hat.nrows() {
            return Err(Error::DimensionMismatch {
                context: "ratio objective residual vs covariance",
                expected: s_hat.nrows(),
                actual: y_hat.len(),
            });
        }
        crate::linalg::check_spd(&s_hat, "ratio objective S_hat")?;
        let s_factor = SpdFactor::new(&s_hat)?;
        let y_outer = &y_hat * y_hat.transpose();
        Ok(Self {
            y_hat,
            y_outer,
            s_hat,
            s_factor,
            index_i,
        })
    }

    pub fn y_hat(&self) -> &DVector<f64> {
        &self.y_hat
    }

    pub fn y_outer(&self) -> &DMatrix<f64> {
        &self.y_outer
    }

    pub fn s_hat(&self) -> &DMatrix<f64> {
        &self.s_hat
    }

    /// The rival track `i` this ratio refers to.
    pub fn index_i(&self) -> usize {
        self.index_i
    }

    pub fn dim(&self) -> usize {
        self.y_hat.len()
    }

    fn value(&self, z: &DVector<f64>) -> f64 {
        let p = self.y_hat.dot(z);
        p * p / z.dot(&(&self.s_hat * z))
    }

    /// Directional derivative of `f` at `z` along `u`:
    /// `2 u^T (Y - f(z) S) z / (z^T S z)`.
    fn slope(&self, z: &DVector<f64>, u: &DVector<f64>) -> f64 {
        let sz = &self.s_hat * z;
        let zsz = z.dot(&sz);
        let f = self.y_hat.dot(z).powi(2) / zsz;
        let yz = &self.y_hat * self.y_hat.dot(z);
        2.0 * u.dot(&(yz - sz * f)) / zsz
    }
}

fn check_nonzero(z: &DVector<f64>) -> Result<()> {
    if z.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidArgument(
            "ratio evaluated at the zero vector".into(),
        ));
    }
    Ok(())
}

fn check_dim(obj: &RatioObjective, v: &DVector<f64>) -> Result<()> {
    if v.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            context: "ratio objective vs iterate",
            expected: obj.dim(),
            actual: v.len(),
        });
    }
    Ok(())
}

/// `f(z) = (z^T Y z) / (z^T S z)`.
pub fn ratio_eval(obj: &RatioObjective, z: &DVector<f64>) -> Result<f64> {
    check_dim(obj, z)?;
    check_nonzero(z)?;
    Ok(obj.value(z))
}

/// Maximizer of a single ratio. `Y` has rank one, so the only positive
/// generalized eigenvalue is `y^T S^-1 y` with eigenvector `S^-1 y`. The
/// returned vector has unit Euclidean norm and points along `S^-1 y`.
pub fn ratio_argmax(obj: &RatioObjective) -> (DVector<f64>, f64) {
    let w = obj.s_factor.solve_vec(&obj.y_hat);
    let lambda = obj.y_hat.dot(&w);
    let norm = w.norm();
    let u = if norm > 0.0 { w / norm } else { w };
    (u, lambda)
}

/// First-order model `f(z) + 2 alpha u^T (Y - f(z) S) z / (z^T S z)` of
/// `f(z + alpha u)`.
pub fn ratio_linearize(
    obj: &RatioObjective,
    z: &DVector<f64>,
    u: &DVector<f64>,
    alpha: f64,
) -> Result<f64> {
    check_dim(obj, z)?;
    check_dim(obj, u)?;
    check_nonzero(z)?;
    Ok(obj.value(z) + alpha * obj.slope(z, u))
}

/// Position (in `objs`) of the smallest ratio at `z`; ties go to the
/// earliest position.
pub fn worst_index(objs: &[RatioObjective], z: &DVector<f64>) -> Result<usize> {
    if objs.is_empty() {
        return Err(Error::InvalidArgument("no ratio objectives".into()));
    }
    for o in objs {
        check_dim(o, z)?;
    }
    check_nonzero(z)?;
    Ok(argmin(&values_at(objs, z)))
}

fn values_at(objs: &[RatioObjective], z: &DVector<f64>) -> Vec<f64> {
    objs.iter().map(|o| o.value(z)).collect()
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = k;
        }
    }
    best
}

/// Admissible step magnitudes `[alpha_low, alpha_high]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBounds {
    alpha_low: f64,
    alpha_high: f64,
}

impl StepBounds {
    pub fn new(alpha_low: f64, alpha_high: f64) -> Result<Self> {
        if !(alpha_low > 0.0 && alpha_high > alpha_low && alpha_high.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step bounds need 0 < alpha_low < alpha_high, got [{alpha_low}, {alpha_high}]"
            )));
        }
        Ok(Self {
            alpha_low,
            alpha_high,
        })
    }

    pub fn alpha_low(&self) -> f64 {
        self.alpha_low
    }

    pub fn alpha_high(&self) -> f64 {
        self.alpha_high
    }

    /// Clamps `|alpha|` into the bounds, keeping the sign.
    pub fn clamp(&self, alpha: f64) -> f64 {
        let sign = if alpha < 0.0 { -1.0 } else { 1.0 };
        sign * alpha.abs().clamp(self.alpha_low, self.alpha_high)
    }
}

impl Default for StepBounds {
    fn default() -> Self {
        Self {
            alpha_low: DEFAULT_ALPHA_LOW,
            alpha_high: DEFAULT_ALPHA_HIGH,
        }
    }
}

/// Picks a step from crossing-point candidates.
///
/// `ascent_slope` is the slope of the worst ratio along the search
/// direction; a candidate is admissible when `alpha * ascent_slope > 0`. The
/// admissible candidate of smallest magnitude wins. Without one, the step is
/// `alpha_high` in the ascent direction. The result is clamped to the bounds.
pub fn step_from_candidates(candidates: &[f64], ascent_slope: f64, bounds: StepBounds) -> f64 {
    let direction = if ascent_slope < 0.0 { -1.0 } else { 1.0 };
    let chosen = candidates
        .iter()
        .copied()
        .filter(|a| a.is_finite() && a * direction > 0.0)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(direction * bounds.alpha_high);
    bounds.clamp(chosen)
}

/// Adaptive step for the iterate `z` when `objs[i_min]` is the worst ratio.
///
/// Every other ratio's first-order model is intersected with the worst
/// ratio's model along the worst ratio's maximizer; the intersections are
/// the candidates for [`step_from_candidates`].
pub fn select_step(
    objs: &[RatioObjective],
    z: &DVector<f64>,
    i_min: usize,
    bounds: StepBounds,
) -> Result<f64> {
    if i_min >= objs.len() {
        return Err(Error::InvalidArgument(format!(
            "worst index {i_min} out of range for {} objectives",
            objs.len()
        )));
    }
    for o in objs {
        check_dim(o, z)?;
    }
    check_nonzero(z)?;
    let (u, _) = ratio_argmax(&objs[i_min]);
    Ok(adaptive_step(objs, z, &u, i_min, bounds))
}

fn adaptive_step(
    objs: &[RatioObjective],
    z: &DVector<f64>,
    u: &DVector<f64>,
    i_min: usize,
    bounds: StepBounds,
) -> f64 {
    let worst = &objs[i_min];
    let f_min = worst.value(z);
    let g_min = worst.slope(z, u);
    let candidates: Vec<f64> = objs
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i_min)
        .filter_map(|(_, o)| {
            let denom = o.slope(z, u) - g_min;
            (denom != 0.0).then(|| (f_min - o.value(z)) / denom)
        })
        .collect();
    step_from_candidates(&candidates, g_min, bounds)
}

fn ascent_sign(objs: &[RatioObjective], z: &DVector<f64>, u: &DVector<f64>, i_min: usize) -> f64 {
    if objs[i_min].slope(z, u) < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Snapshot of the maximin iteration after `k` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    /// Unit-norm iterate `z_k`.
    pub z: DVector<f64>,
    pub k: usize,
    /// `f_i(z_k)` for every rival track, in objective order.
    pub f_values: Vec<f64>,
    /// Position of the smallest entry of `f_values`.
    pub i_min: usize,
    /// Signed step taken at iterations `1..=k`.
    pub alpha_history: Vec<f64>,
    /// Worst ratio at the start of iterations `1..=k`, i.e. at
    /// `z_0, ..., z_{k-1}`.
    pub f_min_history: Vec<f64>,
}

impl OptimizerState {
    /// Worst ratio at the current iterate.
    pub fn f_min(&self) -> f64 {
        self.f_values[self.i_min]
    }
}

/// How the step length is chosen at every iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    Adaptive(StepBounds),
    /// Constant magnitude; the sign still follows the ascent direction of
    /// the worst ratio.
    Fixed(f64),
}

/// Ratios `f_i` for all `i != j` of agent 2's track set.
pub fn objectives_for(s2: &TrackSet, j: usize) -> Result<Vec<RatioObjective>> {
    if s2.len() < 2 {
        return Err(Error::InvalidArgument(
            "association-based reduction needs at least two tracks".into(),
        ));
    }
    if j >= s2.len() {
        return Err(Error::InvalidArgument(format!(
            "track index {j} out of range for {} tracks",
            s2.len()
        )));
    }
    (0..s2.len())
        .filter(|&i| i != j)
        .map(|i| {
            let y_hat = s2[i].mean() - s2[j].mean();
            let s_hat = s2[i].cov() + s2[j].cov();
            RatioObjective::new(y_hat, s_hat, i)
        })
        .collect()
}

/// `z_0 = sum_i u_i / lambda_i`, normalized.
pub fn initial_iterate(objs: &[RatioObjective]) -> Result<DVector<f64>> {
    let n = objs
        .first()
        .map(RatioObjective::dim)
        .ok_or_else(|| Error::InvalidArgument("no ratio objectives".into()))?;
    let mut z = DVector::zeros(n);
    for o in objs {
        let (u, lambda) = ratio_argmax(o);
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Scenario(format!(
                "agent-2 estimates of tracks {} and its partner coincide; \
                 the ratio maximizer is undefined",
                o.index_i()
            )));
        }
        z += u / lambda;
    }
    let norm = z.norm();
    if !(norm > 0.0) {
        return Err(Error::Scenario("initial iterate vanished".into()));
    }
    Ok(z / norm)
}

/// Runs `k_max` maximin iterations from `z0` using `step` to pick each
/// signed step. `step` receives the objectives, the current iterate, the
/// search direction and the position of the worst ratio.
///
/// The returned trace has `k_max + 1` states, the first one being `z0`.
pub fn maximin_iterate<F>(
    objs: &[RatioObjective],
    z0: DVector<f64>,
    k_max: usize,
    mut step: F,
) -> Result<Vec<OptimizerState>>
where
    F: FnMut(&[RatioObjective], &DVector<f64>, &DVector<f64>, usize) -> f64,
{
    if objs.is_empty() {
        return Err(Error::InvalidArgument("no ratio objectives".into()));
    }
    for o in objs {
        check_dim(o, &z0)?;
    }
    check_nonzero(&z0)?;
    let maximizers: Vec<DVector<f64>> = objs.iter().map(|o| ratio_argmax(o).0).collect();

    let z0 = z0.normalize();
    let f_values = values_at(objs, &z0);
    let mut state = OptimizerState {
        i_min: argmin(&f_values),
        z: z0,
        k: 0,
        f_values,
        alpha_history: Vec::with_capacity(k_max),
        f_min_history: Vec::with_capacity(k_max),
    };
    let mut trace = Vec::with_capacity(k_max + 1);
    trace.push(state.clone());

    for _ in 0..k_max {
        let i_min = state.i_min;
        let u = &maximizers[i_min];
        let alpha = step(objs, &state.z, u, i_min);
        let next = &state.z + u * alpha;
        let norm = next.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step {alpha} collapsed the iterate"
            )));
        }
        state.f_min_history.push(state.f_values[i_min]);
        state.alpha_history.push(alpha);
        state.z = next / norm;
        state.k += 1;
        state.f_values = values_at(objs, &state.z);
        state.i_min = argmin(&state.f_values);
        trace.push(state.clone());
    }
    Ok(trace)
}

/// Runs the maximin ascent for track `j` with the given step rule.
pub fn maximin_reduction(
    s2: &TrackSet,
    j: usize,
    rule: StepRule,
    k_max: usize,
) -> Result<(ReductionMap, Vec<OptimizerState>)> {
    if let StepRule::Fixed(alpha) = rule {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "fixed step must be positive, got {alpha}"
            )));
        }
    }
    let objs = objectives_for(s2, j)?;
    let z0 = initial_iterate(&objs)?;
    let trace = maximin_iterate(&objs, z0, k_max, |objs, z, u, i_min| match rule {
        StepRule::Adaptive(bounds) => adaptive_step(objs, z, u, i_min, bounds),
        StepRule::Fixed(alpha) => ascent_sign(objs, z, u, i_min) * alpha,
    })?;
    let last = trace.last().expect("trace holds the initial state");
    let map = ReductionMap::from_row(&last.z)?;
    Ok((map, trace))
}

/// Association-quality-based `Psi_j` with the adaptive step.
pub fn association_optimal_reduction(
    s2: &TrackSet,
    j: usize,
    bounds: StepBounds,
    k_max: usize,
) -> Result<(ReductionMap, Vec<OptimizerState>)> {
    maximin_reduction(s2, j, StepRule::Adaptive(bounds), k_max)
}

/// Same ascent with a constant step magnitude.
pub fn fixed_step_reduction(
    s2: &TrackSet,
    j: usize,
    alpha: f64,
    k_max: usize,
) -> Result<(ReductionMap, Vec<OptimizerState>)> {
    maximin_reduction(s2, j, StepRule::Fixed(alpha), k_max)
}

/// Predicted mean and variance of a reduced squared MD, which follows a
/// (noncentral) chi-squared law with `dof = m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPrediction {
    pub mean: f64,
    pub variance: f64,
    pub noncentrality: f64,
    pub dof: usize,
}

impl MomentPrediction {
    pub fn new(dof: usize, noncentrality: f64) -> Self {
        Self {
            mean: dof as f64 + noncentrality,
            variance: 2.0 * dof as f64 + 4.0 * noncentrality,
            noncentrality,
            dof,
        }
    }
}

/// `x_diff` is the true state difference `x(i) - x(j)` (zero when `i = j`)
/// and `s` the covariance of the residual.
pub fn predict_moments(
    x_diff: &DVector<f64>,
    s: &DMatrix<f64>,
    map: &ReductionMap,
) -> Result<MomentPrediction> {
    let nu = projected_md(x_diff, s, map)?;
    Ok(MomentPrediction::new(map.rows(), nu))
}
