//! Finite-volume integration of the radial mass equation for α = 2.

mod experiments;
mod grid;
mod run;
mod scheme;

pub use experiments::{
    comparison_check, power_fit, truncation_scaling, ComparisonReport, PowerFit, TruncationRun, TruncationScaling,
    Violation,
};
pub use grid::SolverGrid;
pub use run::{
    moment_w, moment_w_state, rhs, run, step, BlowupEvent, Checkpoint, Controls, Sample, SimState, Trajectory, Trigger,
};
