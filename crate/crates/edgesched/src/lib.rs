//! Delay and energy modeling for computation tasks on a device/edge/cloud
//! hierarchy, exact solvers for deadline-constrained energy minimization,
//! and an experiment harness comparing offloading policies.
//!
//! Running a task locally costs `cycles / f` seconds and device power over
//! that time; offloading ships the input over a Shannon-capacity uplink and
//! charges transmit power while uploading plus idle power while waiting.
//! Each task also carries a per-layer accuracy and a user requirement
//! (deadline, accuracy floor); the proposed scheduling policy minimizes
//! mean device energy subject to both, while local-only, cloud-only, and
//! random baselines force their executor choice.
//!
//! - [`model`] — domain types, validation, and per-task cost combination
//! - [`cost`] — the per-layer delay/energy primitives
//! - [`scheduler`] — the four policies, greedy/branch-and-bound/brute-force
//!   solvers
//! - [`workload`] — seeded uniform batch generation and stock scenarios
//! - [`scenario`] — JSON scenario documents
//! - [`harness`] — policy comparison and CSV parameter sweeps
//!
//! The `examples/` directory holds one runnable program per capability
//! (`cargo run --example compare_policies`, …); the `edgesched` binary
//! exposes the same harness as `compare` and `sweep` subcommands.

// Validations use negated comparisons (`!(x >= 0.0)`) so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost;
pub mod harness;
pub mod model;
pub mod scenario;
pub mod scheduler;
pub mod workload;

pub use cost::{CostBreakdown, CostError, LayerCosts};
pub use model::{
    achieved_accuracy, combine_delay, combine_energy, Assignment, Layer, Link, LocalPower,
    ModelError, Node, NodeId, Requirement, Scenario, Schedule, SystemParams, Task, TaskId,
    BITS_PER_MB,
};
pub use scheduler::{
    feasible_executors, run_policy, solve_bnb, solve_bruteforce, solve_greedy, Policy, SolveError,
    SolveReport, SolveStatus,
};
pub use workload::{
    default_scenario, default_scenario_analytic, generate_tasks, Distribution, WorkloadSpec,
};
