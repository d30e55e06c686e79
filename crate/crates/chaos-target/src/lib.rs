//! Directing orbits of discrete chaotic maps via teaching-learning-based
//! optimization (TLBO).
//!
//! A chaotic trajectory is steered towards a target state by a short sequence
//! of bounded perturbations applied to the first state component. Finding that
//! sequence is a box-constrained minimization of the terminal distance to the
//! target, solved here with TLBO. The [`harness`] module runs seeded batches
//! of independent searches and aggregates the statistics (best/worst/mean/std,
//! success ratio, mean first-success generation, mean convergence curves).

pub mod harness;
pub mod maps;
pub mod problem;
pub mod seed;
pub mod tlbo;

pub use harness::{
    mean_curve, run_batch, sweep, sweep_grid, uncontrolled_baseline, BaselineRow, BatchStats,
    CurvePoint, HarnessError, SuccessMetrics, SweepRow,
};
pub use maps::{
    henon_fixed_point, henon_step, iterate_uncontrolled, ushio_step, ChaoticMap, MapError, State2,
};
pub use problem::{ControlSequence, ProblemError, TargetingProblem};
pub use tlbo::{optimize, Population, RunRecord, TlboConfig, TlboError};
