//! Mahalanobis assignment costs and an exact linear assignment solver.
//!
//! Cost matrices are indexed `(i, j)` with rows `i` the agent-1 tracks and
//! columns `j` the agent-2 tracks. A solution stores, for every column `j`,
//! the row assigned to it, so the correct association is the identity.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::SpdFactor;
use crate::tracks::{Estimate, ReducedEstimate, ReductionMap, TrackSet};

/// Which construction produced an [`AssignmentMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Squared MDs between full estimates.
    Full,
    /// Squared MDs after agent 2 reduced its estimates.
    Reduced,
    /// Agent 2's own prediction of the reduced matrix, built from its tracks
    /// only.
    Approximated,
}

/// Square matrix of nonnegative assignment costs.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentMatrix {
    costs: DMatrix<f64>,
    kind: MatrixKind,
}

impl AssignmentMatrix {
    pub fn new(costs: DMatrix<f64>, kind: MatrixKind) -> Result<Self> {
        if costs.nrows() != costs.ncols() {
            return Err(Error::DimensionMismatch {
                context: "assignment matrix must be square",
                expected: costs.nrows(),
                actual: costs.ncols(),
            });
        }
        if costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("assignment matrix"));
        }
        if costs.iter().any(|&c| c < 0.0) {
            return Err(Error::InvalidArgument(
                "assignment costs must be nonnegative".into(),
            ));
        }
        Ok(Self { costs, kind })
    }

    pub fn from_rows(rows: &[Vec<f64>], kind: MatrixKind) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                context: "assignment matrix row length",
                expected: n,
                actual: bad.len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat), kind)
    }

    pub fn costs(&self) -> &DMatrix<f64> {
        &self.costs
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.costs.nrows()
    }

    /// Total cost of assigning row `perm[j]` to every column `j`.
    pub fn cost_of(&self, perm: &[usize]) -> f64 {
        perm.iter()
            .enumerate()
            .map(|(j, &i)| self.costs[(i, j)])
            .sum()
    }
}

/// A permutation solving the assignment problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `perm[j]` is the agent-1 track assigned to agent-2 track `j`.
    pub perm: Vec<usize>,
    pub cost: f64,
}

impl Assignment {
    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(j, &i)| i == j)
    }
}

/// Squared MD between two full estimates, `d^2 = (y1 - y2)^T (R1 + R2)^-1 (y1 - y2)`.
pub fn md_full(a: &Estimate, b: &Estimate) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "md_full estimate dimensions",
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let diff = a.mean() - b.mean();
    let s = a.cov() + b.cov();
    Ok(SpdFactor::new(&s)?.quad_inv(&diff))
}

/// Squared MD between a full local estimate and a received reduced one,
/// evaluated in the reduced space:
/// `(Psi y1 - y_psi)^T (Psi R1 Psi^T + R_psi)^-1 (Psi y1 - y_psi)`.
pub fn md_reduced(a: &Estimate, b: &ReducedEstimate) -> Result<f64> {
    let map = b.map();
    if map.cols() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: "md_reduced map columns vs estimate dimension",
            expected: a.dim(),
            actual: map.cols(),
        });
    }
    let diff = map.psi() * a.mean() - b.mean();
    let s = map.congruence(a.cov()) + b.cov();
    Ok(SpdFactor::new(&s)?.quad_inv(&diff))
}

/// `x^T Psi^T (Psi S Psi^T)^-1 Psi x`: the squared MD of a full-space
/// difference `x` with covariance `s` seen through `map`.
pub fn projected_md(x: &DVector<f64>, s: &DMatrix<f64>, map: &ReductionMap) -> Result<f64> {
    if x.len() != map.cols() || s.nrows() != map.cols() {
        return Err(Error::DimensionMismatch {
            context: "projected_md dimensions",
            expected: map.cols(),
            actual: x.len().max(s.nrows()),
        });
    }
    let px = map.psi() * x;
    Ok(SpdFactor::new(&map.congruence(s))?.quad_inv(&px))
}

fn check_sizes(expected: usize, actual: usize, context: &'static str) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}

pub fn build_full_matrix(s1: &TrackSet, s2: &TrackSet) -> Result<AssignmentMatrix> {
    check_sizes(s1.len(), s2.len(), "track counts")?;
    check_sizes(s1.dim(), s2.dim(), "track dimensions")?;
    let n = s1.len();
    let mut costs = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            costs[(i, j)] = md_full(&s1[i], &s2[j])?;
        }
    }
    AssignmentMatrix::new(costs, MatrixKind::Full)
}

/// Column `j` is evaluated with agent 2's map for track `j`.
pub fn build_reduced_matrix(
    s1: &TrackSet,
    reduced: &[ReducedEstimate],
) -> Result<AssignmentMatrix> {
    check_sizes(s1.len(), reduced.len(), "track counts")?;
    let n = s1.len();
    let mut costs = DMatrix::zeros(n, n);
    for (j, rj) in reduced.iter().enumerate() {
        for i in 0..n {
            costs[(i, j)] = md_reduced(&s1[i], rj)?;
        }
    }
    AssignmentMatrix::new(costs, MatrixKind::Reduced)
}

/// Agent 2's stand-in for the reduced matrix, with its own tracks playing
/// agent 1's part: `y_hat = y2(i) - y2(j)`, `S_hat = R2(i) + R2(j)`.
pub fn build_approx_matrix(s2: &TrackSet, maps: &[ReductionMap]) -> Result<AssignmentMatrix> {
    check_sizes(s2.len(), maps.len(), "track count vs maps")?;
    let n = s2.len();
    let mut costs = DMatrix::zeros(n, n);
    for (j, map) in maps.iter().enumerate() {
        for i in 0..n {
            if i == j {
                continue;
            }
            let y_hat = s2[i].mean() - s2[j].mean();
            let s_hat = s2[i].cov() + s2[j].cov();
            costs[(i, j)] = projected_md(&y_hat, &s_hat, map)?;
        }
    }
    AssignmentMatrix::new(costs, MatrixKind::Approximated)
}

/// Exact minimum-cost permutation. Among equal-cost optima the
/// lexicographically smallest `perm` is returned.
pub fn solve_lap(a: &AssignmentMatrix) -> Result<Assignment> {
    let perm = solve_lap_matrix(a.costs())?;
    let cost = a.cost_of(&perm);
    Ok(Assignment { perm, cost })
}

/// Solver on a raw square matrix of finite costs (sign unrestricted).
/// Returns `perm` with `perm[j]` the row chosen for column `j`.
pub fn solve_lap_matrix(costs: &DMatrix<f64>) -> Result<Vec<usize>> {
    if costs.nrows() != costs.ncols() {
        return Err(Error::DimensionMismatch {
            context: "assignment matrix must be square",
            expected: costs.nrows(),
            actual: costs.ncols(),
        });
    }
    if costs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("assignment matrix"));
    }
    let n = costs.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    // Columns act as the "workers" that each pick one row.
    let cost = |w: usize, t: usize| costs[(t, w)];
    let (task_of, u, v) = shortest_augmenting_path(n, cost);

    let scale = costs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let eps = 1e-12 * scale * n as f64;
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|w| {
            (0..n)
                .filter(|&t| cost(w, t) - u[w] - v[t] <= eps)
                .collect()
        })
        .collect();
    Ok(lexicographic_matching(&tight, task_of))
}

/// Dense O(n^3) shortest augmenting path method (Hungarian algorithm with
/// potentials). Returns the task assigned to every worker together with the
/// optimal dual potentials, so that `cost(w, t) - u[w] - v[t] >= 0` with
/// equality on the returned assignment.
fn shortest_augmenting_path(
    n: usize,
    cost: impl Fn(usize, usize) -> f64,
) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    // 1-based internally; index 0 is the virtual root.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for w in 1..=n {
        owner[0] = w;
        let mut t0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[t0] = true;
            let w0 = owner[t0];
            let mut delta = f64::INFINITY;
            let mut t1 = 0usize;
            for t in 1..=n {
                if used[t] {
                    continue;
                }
                let cur = cost(w0 - 1, t - 1) - u[w0] - v[t];
                if cur < minv[t] {
                    minv[t] = cur;
                    way[t] = t0;
                }
                if minv[t] < delta {
                    delta = minv[t];
                    t1 = t;
                }
            }
            for t in 0..=n {
                if used[t] {
                    u[owner[t]] += delta;
                    v[t] -= delta;
                } else {
                    minv[t] -= delta;
                }
            }
            t0 = t1;
            if owner[t0] == 0 {
                break;
            }
        }
        loop {
            let t1 = way[t0];
            owner[t0] = owner[t1];
            t0 = t1;
            if t0 == 0 {
                break;
            }
        }
    }

    let mut task_of = vec![0usize; n];
    for t in 1..=n {
        task_of[owner[t] - 1] = t - 1;
    }
    (task_of, u[1..].to_vec(), v[1..].to_vec())
}

/// Lexicographically smallest perfect matching of the tight-edge graph,
/// starting from a known perfect matching `task_of`.
fn lexicographic_matching(tight: &[Vec<usize>], mut task_of: Vec<usize>) -> Vec<usize> {
    let n = task_of.len();
    let mut worker_of = vec![0usize; n];
    for (w, &t) in task_of.iter().enumerate() {
        worker_of[t] = w;
    }
    let mut task_fixed = vec![false; n];

    for w in 0..n {
        for &t in &tight[w] {
            if task_fixed[t] {
                continue;
            }
            if t == task_of[w] {
                break;
            }
            // Give `t` to `w`, then re-seat t's previous owner on the task
            // that `w` releases via an alternating path.
            let freed = task_of[w];
            let displaced = worker_of[t];
            let saved = (task_of.clone(), worker_of.clone());
            task_of[w] = t;
            worker_of[t] = w;
            task_fixed[t] = true;
            let mut visited = vec![false; n];
            let ok = reseat(
                displaced,
                freed,
                tight,
                &task_fixed,
                &mut task_of,
                &mut worker_of,
                &mut visited,
            );
            task_fixed[t] = false;
            if ok {
                break;
            }
            (task_of, worker_of) = saved;
        }
        task_fixed[task_of[w]] = true;
    }
    task_of
}

/// Kuhn-style augmenting search: finds a tight edge for `w` leading (via
/// possibly displacing other unfixed workers) to the single free task
/// `free`.
fn reseat(
    w: usize,
    free: usize,
    tight: &[Vec<usize>],
    task_fixed: &[bool],
    task_of: &mut [usize],
    worker_of: &mut [usize],
    visited: &mut [bool],
) -> bool {
    for &t in &tight[w] {
        if task_fixed[t] || visited[t] {
            continue;
        }
        visited[t] = true;
        let next = worker_of[t];
        if t == free
            || (next != w && reseat(next, free, tight, task_fixed, task_of, worker_of, visited))
        {
            task_of[w] = t;
            worker_of[t] = w;
            return true;
        }
    }
    false
}

/// Number of agent-2 tracks not assigned to their own target.
pub fn count_incorrect(a: &Assignment) -> usize {
    a.perm.iter().enumerate().filter(|(j, &i)| i != *j).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(y: &[f64], r: &[f64], label: usize) -> Estimate {
        let n = y.len();
        Estimate::new(
            DVector::from_row_slice(y),
            DMatrix::from_row_slice(n, n, r),
            label,
        )
        .unwrap()
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == used.len() {
                out.push(cur.clone());
                return;
            }
            for k in 0..used.len() {
                if !used[k] {
                    used[k] = true;
                    cur.push(k);
                    rec(cur, used, out);
                    cur.pop();
                    used[k] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    #[test]
    fn md_full_examples() {
        let a = est(&[1.0, 2.0], &[1.0, 0.0, 0.0, 1.0], 0);
        assert_eq!(md_full(&a, &a).unwrap(), 0.0);
        let a = est(&[1.0, 0.0], &[0.5, 0.0, 0.0, 0.5], 0);
        let b = est(&[0.0, 0.0], &[0.5, 0.0, 0.0, 0.5], 0);
        assert!((md_full(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let a = est(&[2.0, 0.0], &[2.0, 0.0, 0.0, 0.5], 0);
        let b = est(&[0.0, 0.0], &[2.0, 0.0, 0.0, 0.5], 0);
        assert!((md_full(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn md_reduced_first_coordinate_only() {
        // y_bar = (3, 99), S = diag(9, 1) split between the two agents.
        let a = est(&[3.0, 99.0], &[4.0, 0.0, 0.0, 0.5], 0);
        let b = est(&[0.0, 0.0], &[5.0, 0.0, 0.0, 0.5], 0);
        let map = ReductionMap::new(DMatrix::from_row_slice(1, 2, &[1.0, 0.0])).unwrap();
        let rb = crate::tracks::reduce_estimate(&b, &map).unwrap();
        assert!((md_reduced(&a, &rb).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn md_reduced_vanishes_on_orthogonal_residual() {
        let a = est(&[0.0, 4.0], &[1.0, 0.0, 0.0, 1.0], 0);
        let b = est(&[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0], 0);
        let map = ReductionMap::new(DMatrix::from_row_slice(1, 2, &[1.0, 0.0])).unwrap();
        let rb = crate::tracks::reduce_estimate(&b, &map).unwrap();
        assert_eq!(md_reduced(&a, &rb).unwrap(), 0.0);
    }

    #[test]
    fn md_reduced_identity_equals_full() {
        let a = est(&[1.0, -2.0], &[2.0, 0.3, 0.3, 1.0], 0);
        let b = est(&[0.5, 1.0], &[1.0, -0.2, -0.2, 3.0], 0);
        let rb = crate::tracks::reduce_estimate(&b, &ReductionMap::identity(2)).unwrap();
        let full = md_full(&a, &b).unwrap();
        assert!((md_reduced(&a, &rb).unwrap() - full).abs() < 1e-12 * full.max(1.0));
    }

    #[test]
    fn fixture_realization_one_is_correct() {
        let a =
            AssignmentMatrix::from_rows(&[vec![0.05, 1.01], vec![0.31, 0.05]], MatrixKind::Reduced)
                .unwrap();
        let s = solve_lap(&a).unwrap();
        assert_eq!(s.perm, vec![0, 1]);
        assert!((s.cost - 0.10).abs() < 1e-12);
    }

    #[test]
    fn fixture_realization_two_swaps() {
        let a =
            AssignmentMatrix::from_rows(&[vec![0.11, 0.01], vec![0.01, 0.11]], MatrixKind::Reduced)
                .unwrap();
        let s = solve_lap(&a).unwrap();
        assert_eq!(s.perm, vec![1, 0]);
        assert!((s.cost - 0.02).abs() < 1e-12);
        assert_eq!(count_incorrect(&s), 2);
    }

    #[test]
    fn single_track() {
        let a = AssignmentMatrix::from_rows(&[vec![5.0]], MatrixKind::Full).unwrap();
        let s = solve_lap(&a).unwrap();
        assert_eq!(s.perm, vec![0]);
        assert_eq!(s.cost, 5.0);
    }

    #[test]
    fn rejects_non_finite_and_negative() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, f64::NAN, 1.0, 0.0]);
        assert!(matches!(
            AssignmentMatrix::new(m.clone(), MatrixKind::Full),
            Err(Error::NonFinite(_))
        ));
        assert!(solve_lap_matrix(&m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(AssignmentMatrix::new(m, MatrixKind::Full).is_err());
    }

    #[test]
    fn ties_resolve_to_smallest_permutation() {
        let zeros = AssignmentMatrix::new(DMatrix::zeros(4, 4), MatrixKind::Full).unwrap();
        assert_eq!(solve_lap(&zeros).unwrap().perm, vec![0, 1, 2, 3]);

        // Anti-diagonal optimum is unique; all-equal rows tie.
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let a = AssignmentMatrix::new(m, MatrixKind::Full).unwrap();
        assert_eq!(solve_lap(&a).unwrap().perm, vec![2, 1, 0]);
    }

    #[test]
    fn integer_ties_match_lexicographic_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6 {
            let perms = all_perms(n);
            for _ in 0..200 {
                let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(0..3) as f64);
                let a = AssignmentMatrix::new(m, MatrixKind::Full).unwrap();
                let mut best: Option<(f64, &Vec<usize>)> = None;
                for p in &perms {
                    let c = a.cost_of(p);
                    if best.is_none_or(|(b, _)| c < b) {
                        best = Some((c, p));
                    }
                }
                let (bc, bp) = best.unwrap();
                let s = solve_lap(&a).unwrap();
                assert_eq!(s.cost, bc);
                assert_eq!(&s.perm, bp);
            }
        }
    }

    #[test]
    fn count_incorrect_examples() {
        let id = Assignment {
            perm: (0..10).collect(),
            cost: 0.0,
        };
        assert_eq!(count_incorrect(&id), 0);
        let mut swap = id.clone();
        swap.perm.swap(3, 7);
        assert_eq!(count_incorrect(&swap), 2);
        let rev = Assignment {
            perm: (0..5).rev().collect(),
            cost: 0.0,
        };
        assert_eq!(count_incorrect(&rev), 4);
    }

    #[test]
    fn approx_matrix_zero_diagonal_and_orthogonal_entry() {
        let e0 = est(&[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0], 0);
        let e1 = est(&[3.0, 0.0], &[1.0, 0.0, 0.0, 2.0], 1);
        let s2 = TrackSet::new(vec![e0, e1], crate::tracks::Agent::Two).unwrap();
        let maps = vec![
            ReductionMap::new(DMatrix::from_row_slice(1, 2, &[1.0, 0.0])).unwrap(),
            ReductionMap::new(DMatrix::from_row_slice(1, 2, &[0.0, 1.0])).unwrap(),
        ];
        let a = build_approx_matrix(&s2, &maps).unwrap();
        assert_eq!(a.kind(), MatrixKind::Approximated);
        assert_eq!(a.costs()[(0, 0)], 0.0);
        assert_eq!(a.costs()[(1, 1)], 0.0);
        // Psi_2 is orthogonal to y2(1) - y2(2).
        assert_eq!(a.costs()[(0, 1)], 0.0);
        assert!((a.costs()[(1, 0)] - 9.0 / 2.0).abs() < 1e-12);
    }
}
