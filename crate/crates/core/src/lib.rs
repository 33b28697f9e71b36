//! Track-to-track association when one agent sends dimension-reduced
//! estimates.
//!
//! Agent 2 compresses each `n`-dimensional track with a full-rank `m x n`
//! map before sending it; agent 1 associates the received tracks with its
//! own by solving a linear assignment problem over squared Mahalanobis
//! distances and fuses them with the Kalman fuser.
//!
//! Two ways of choosing the maps are provided:
//!
//! - [`gevo::fusion_optimal_reduction`] minimizes the fused covariance trace
//!   and ignores association.
//! - [`maximin::association_optimal_reduction`] maximizes the worst-case
//!   predicted separation between a track and its rivals, using agent 2's
//!   data only.
//!
//! [`simulation`] contains the scenario generator, the Monte Carlo sweep
//! comparing both reductions against full-estimate association, and the
//! smaller demonstration experiments. [`io`] holds configuration parsing,
//! CSV output and the command runner behind the `t2ta` binary.

pub mod assignment;
pub mod error;
pub mod gevo;
pub mod io;
pub mod linalg;
pub mod maximin;
pub mod simulation;
pub mod tracks;

pub use assignment::{
    build_approx_matrix, build_full_matrix, build_reduced_matrix, count_incorrect, md_full,
    md_reduced, solve_lap, Assignment, AssignmentMatrix, MatrixKind,
};
pub use error::{Error, Result};
pub use gevo::{fusion_optimal_reduction, gen_eig_spd, GevoSolution};
pub use maximin::{
    association_optimal_reduction, fixed_step_reduction, predict_moments, MomentPrediction,
    OptimizerState, RatioObjective, StepBounds,
};
pub use tracks::{
    fusion_loss, kalman_fuse, reduce_estimate, Agent, Estimate, FusedEstimate, ReducedEstimate,
    ReductionMap, TrackSet,
};
