//! Scenarios, Monte Carlo evaluation and the demonstration experiments.

pub mod experiments;
pub mod montecarlo;
pub mod scenario;

pub use experiments::{
    motivating_example, optimizer_trace, realization_demo, MotivatingRow, RealizationDemo,
    StepComparison, TraceSpec,
};
pub use montecarlo::{mc_sweep, run_single, McConfig, McResult, McRow, Method, RunParams};
pub use scenario::{generate_scenario, sample_realization, scale_spatial, Scenario, ScenarioSpec};
