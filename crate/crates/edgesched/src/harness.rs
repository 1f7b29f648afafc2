//! Experiment harness: single-batch policy comparisons and parameter
//! sweeps with CSV output.
//!
//! A sweep runs `axis value x repetition x policy` cells. Each
//! `(axis value, repetition)` pair generates one workload with seed
//! `base_seed + repetition`, shared by every policy at that cell, so rows
//! are comparable within a cell and byte-identical across runs. Cells are
//! independent and run on a small worker pool (`EDGESCHED_WORKERS`
//! overrides the size); rows are buffered and written in `(axis,
//! repetition, policy)` order regardless of completion order.

use std::fmt::{self, Write as _};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{ModelError, NodeId, Requirement, Scenario, Task, BITS_PER_MB};
use crate::scenario::{load_scenario, ScenarioError, WorkloadSpecFile};
use crate::scheduler::{run_policy, solve_bruteforce, Policy, SolveError, SolveReport, SolveStatus};
use crate::workload::{default_scenario, generate_tasks, WorkloadSpec};

/// Decorrelates the random policy's layer draws from the workload draws
/// that share the row seed.
const POLICY_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    ConfigParse(String),
    #[error("cannot read config {path}: {source}")]
    ConfigRead { path: String, source: io::Error },
    #[error(transparent)]
    ScenarioLoad(#[from] ScenarioError),
    #[error("cannot write {path}: {source}")]
    OutputWrite { path: String, source: io::Error },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Policy selector as written in configs and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    LocalOnly,
    CloudOnly,
    Random,
    EdgeBasedMultiLayer,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::LocalOnly,
        PolicyKind::CloudOnly,
        PolicyKind::Random,
        PolicyKind::EdgeBasedMultiLayer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::LocalOnly => "local_only",
            PolicyKind::CloudOnly => "cloud_only",
            PolicyKind::Random => "random",
            PolicyKind::EdgeBasedMultiLayer => "edge_multi_layer",
        }
    }

    pub fn parse(token: &str) -> Result<Self, HarnessError> {
        match token.trim() {
            "local_only" => Ok(PolicyKind::LocalOnly),
            "cloud_only" => Ok(PolicyKind::CloudOnly),
            "random" => Ok(PolicyKind::Random),
            "edge_multi_layer" => Ok(PolicyKind::EdgeBasedMultiLayer),
            other => Err(HarnessError::ConfigParse(format!(
                "unknown policy {other:?}; expected local_only, cloud_only, random, edge_multi_layer"
            ))),
        }
    }

    /// Comma-separated list as given to `--policies`.
    pub fn parse_list(list: &str) -> Result<Vec<Self>, HarnessError> {
        let kinds = list
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(Self::parse)
            .collect::<Result<Vec<_>, _>>()?;
        if kinds.is_empty() {
            return Err(HarnessError::ConfigParse("empty policy list".to_owned()));
        }
        Ok(kinds)
    }

    /// Concrete policy for one sweep cell; the random policy draws from a
    /// salted copy of the row seed.
    pub fn to_policy(self, row_seed: u64) -> Policy {
        match self {
            PolicyKind::LocalOnly => Policy::LocalOnly,
            PolicyKind::CloudOnly => Policy::CloudOnly,
            PolicyKind::Random => Policy::Random {
                seed: row_seed ^ POLICY_SEED_SALT,
            },
            PolicyKind::EdgeBasedMultiLayer => Policy::EdgeBasedMultiLayer,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// The swept parameter and its grid.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Batch size q.
    TaskCount(Vec<usize>),
    /// Deadline in seconds, uniform across the batch.
    Deadline(Vec<f64>),
    /// Input size in MB, identical for every task at the grid point.
    DataSize(Vec<f64>),
    /// CPU cycles in gigacycles, identical for every task at the grid point.
    Cycles(Vec<f64>),
    /// Extension: concurrency limit on one named node. Makes the solver's
    /// search capacity-coupled, so keep batches small.
    NodeCapacity { node: NodeId, limits: Vec<usize> },
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SweepAxis::TaskCount(v) => v.iter().map(|&q| q as f64).collect(),
            SweepAxis::NodeCapacity { limits, .. } => limits.iter().map(|&c| c as f64).collect(),
            SweepAxis::Deadline(v) | SweepAxis::DataSize(v) | SweepAxis::Cycles(v) => v.clone(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SweepAxis::TaskCount(_) => "task_count",
            SweepAxis::Deadline(_) => "deadline_s",
            SweepAxis::DataSize(_) => "data_size_mb",
            SweepAxis::Cycles(_) => "cycles_gigacycles",
            SweepAxis::NodeCapacity { .. } => "node_capacity",
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let values = self.values();
        if values.is_empty() {
            return Err(HarnessError::ConfigParse("axis values are empty".to_owned()));
        }
        if !values.windows(2).all(|w| w[0] < w[1]) {
            return Err(HarnessError::ConfigParse(
                "axis values must be strictly increasing".to_owned(),
            ));
        }
        match self {
            SweepAxis::TaskCount(qs) if qs.contains(&0) => Err(
                HarnessError::ConfigParse("task counts must be positive".to_owned()),
            ),
            SweepAxis::Deadline(ds) if ds.iter().any(|&d| d <= 0.0) => Err(
                HarnessError::ConfigParse("deadlines must be positive".to_owned()),
            ),
            SweepAxis::DataSize(ss) if ss.iter().any(|&s| s < 0.0) => Err(
                HarnessError::ConfigParse("data sizes must be non-negative".to_owned()),
            ),
            SweepAxis::Cycles(ws) if ws.iter().any(|&w| w < 0.0) => Err(
                HarnessError::ConfigParse("cycle counts must be non-negative".to_owned()),
            ),
            SweepAxis::NodeCapacity { limits, .. } if limits.contains(&0) => Err(
                HarnessError::ConfigParse("capacity limits must be positive".to_owned()),
            ),
            _ => Ok(()),
        }
    }

    /// Workload for one grid point: the axis overrides its dimension, the
    /// row seed drives generation.
    fn apply(&self, base: &WorkloadSpec, value_idx: usize, seed: u64) -> WorkloadSpec {
        let mut spec = base.clone();
        spec.seed = seed;
        match self {
            SweepAxis::TaskCount(qs) => spec.count = qs[value_idx],
            SweepAxis::Deadline(ds) => spec.deadline = ds[value_idx],
            SweepAxis::DataSize(ss) => {
                let bits = ss[value_idx] * BITS_PER_MB;
                spec.size_range = (bits, bits);
            }
            SweepAxis::Cycles(ws) => {
                let cycles = ws[value_idx] * 1.0e9;
                spec.cycles_range = (cycles, cycles);
            }
            SweepAxis::NodeCapacity { .. } => {}
        }
        spec
    }

    /// Scenario for one grid point; only the capacity axis edits it.
    fn scenario_at(&self, base: &Scenario, value_idx: usize) -> Result<Scenario, HarnessError> {
        match self {
            SweepAxis::NodeCapacity { node, limits } => {
                let mut nodes = base.nodes().to_vec();
                let target = nodes.iter_mut().find(|n| &n.id == node).ok_or_else(|| {
                    HarnessError::ConfigParse(format!("capacity axis node {node} not in scenario"))
                })?;
                target.capacity = Some(limits[value_idx]);
                Ok(Scenario::new(nodes, base.links().to_vec(), *base.system())?)
            }
            _ => Ok(base.clone()),
        }
    }
}

/// A fully resolved sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    /// Workloads per grid point; seeds run `base_seed .. base_seed + repetitions`.
    pub repetitions: usize,
    pub policies: Vec<PolicyKind>,
    pub scenario_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub base_seed: u64,
    pub workload: WorkloadSpec,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.axis.validate()?;
        if self.repetitions == 0 {
            return Err(HarnessError::ConfigParse(
                "repetitions must be at least 1".to_owned(),
            ));
        }
        if self.policies.is_empty() {
            return Err(HarnessError::ConfigParse("no policies selected".to_owned()));
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfigFile {
    axis: AxisFile,
    #[serde(default)]
    repetitions: Option<usize>,
    #[serde(default)]
    policies: Option<Vec<String>>,
    #[serde(default)]
    scenario: Option<PathBuf>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    base_seed: Option<u64>,
    #[serde(default)]
    workload: Option<WorkloadSpecFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisFile {
    kind: String,
    values: Vec<f64>,
    /// Target for the node_capacity axis.
    #[serde(default)]
    node: Option<String>,
}

fn integer_values(kind: &str, values: &[f64]) -> Result<Vec<usize>, HarnessError> {
    values
        .iter()
        .map(|&v| {
            if v.fract() == 0.0 && v >= 1.0 {
                Ok(v as usize)
            } else {
                Err(HarnessError::ConfigParse(format!(
                    "{kind} value {v} is not a positive integer"
                )))
            }
        })
        .collect()
}

/// Read a sweep config document.
pub fn load_sweep_config(path: &Path) -> Result<SweepConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::ConfigRead {
        path: path.display().to_string(),
        source,
    })?;
    let file: SweepConfigFile = serde_json::from_str(&text)
        .map_err(|e| HarnessError::ConfigParse(format!("{}: {e}", path.display())))?;
    let axis = match file.axis.kind.as_str() {
        "task_count" => SweepAxis::TaskCount(integer_values("task_count", &file.axis.values)?),
        "deadline_s" => SweepAxis::Deadline(file.axis.values),
        "data_size_mb" => SweepAxis::DataSize(file.axis.values),
        "cycles_gigacycles" => SweepAxis::Cycles(file.axis.values),
        "node_capacity" => SweepAxis::NodeCapacity {
            node: NodeId::new(file.axis.node.ok_or_else(|| {
                HarnessError::ConfigParse(
                    "node_capacity axis needs a \"node\" field".to_owned(),
                )
            })?),
            limits: integer_values("node_capacity", &file.axis.values)?,
        },
        other => {
            return Err(HarnessError::ConfigParse(format!(
                "unknown axis kind {other:?}; expected task_count, deadline_s, data_size_mb, \
                 cycles_gigacycles, node_capacity"
            )))
        }
    };
    let policies = match file.policies {
        Some(tokens) => tokens
            .iter()
            .map(|t| PolicyKind::parse(t))
            .collect::<Result<Vec<_>, _>>()?,
        None => PolicyKind::ALL.to_vec(),
    };
    let workload = file.workload.unwrap_or_default().resolve(0)?;
    let config = SweepConfig {
        axis,
        repetitions: file.repetitions.unwrap_or(1),
        policies,
        scenario_path: file.scenario,
        output_path: file.output,
        base_seed: file.base_seed.unwrap_or(0),
        workload,
    };
    config.validate()?;
    Ok(config)
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub repetition: usize,
    pub policy: PolicyKind,
    pub mean_delay_s: f64,
    pub mean_energy_j: f64,
    pub feasible_fraction: f64,
    pub solver_nodes: u64,
}

/// Per-(axis value, policy) aggregation over repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub axis_value: f64,
    pub policy: PolicyKind,
    pub repetitions: usize,
    pub mean_delay_s: f64,
    pub mean_energy_j: f64,
    pub feasible_fraction: f64,
    pub solver_nodes: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
}

impl SweepOutcome {
    pub fn rows_csv(&self) -> String {
        let mut out = String::from(
            "axis_value,repetition,policy,mean_delay_s,mean_energy_J,feasible_fraction,solver_nodes\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.axis_value,
                r.repetition,
                r.policy,
                r.mean_delay_s,
                r.mean_energy_j,
                r.feasible_fraction,
                r.solver_nodes
            )
            .expect("writing to String cannot fail");
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "axis_value,policy,repetitions,mean_delay_s,mean_energy_J,feasible_fraction,solver_nodes\n",
        );
        for r in &self.summary {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.axis_value,
                r.policy,
                r.repetitions,
                r.mean_delay_s,
                r.mean_energy_j,
                r.feasible_fraction,
                r.solver_nodes
            )
            .expect("writing to String cannot fail");
        }
        out
    }

    /// True when not a single row has a single task meeting its constraints.
    pub fn all_infeasible(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.feasible_fraction == 0.0)
    }

    /// Rows of one policy in axis order, means over repetitions.
    pub fn summary_for(&self, policy: PolicyKind) -> Vec<&SummaryRow> {
        self.summary.iter().filter(|r| r.policy == policy).collect()
    }
}

/// Execute a sweep against an already-loaded scenario; no file I/O.
pub fn execute_sweep(
    config: &SweepConfig,
    scenario: &Scenario,
) -> Result<SweepOutcome, HarnessError> {
    config.validate()?;
    let values = config.axis.values();
    let scenarios = (0..values.len())
        .map(|i| config.axis.scenario_at(scenario, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut jobs = Vec::with_capacity(values.len() * config.repetitions);
    for value_idx in 0..values.len() {
        for rep in 0..config.repetitions {
            let seed = config.base_seed + rep as u64;
            jobs.push((value_idx, rep, config.axis.apply(&config.workload, value_idx, seed)));
        }
    }

    let cell = |job: &(usize, usize, WorkloadSpec)| -> Result<Vec<SweepRow>, HarnessError> {
        let (value_idx, rep, spec) = job;
        let scenario = &scenarios[*value_idx];
        let batch = generate_tasks(spec)?;
        let (tasks, reqs): (Vec<_>, Vec<_>) = batch.into_iter().unzip();
        let mut rows = Vec::with_capacity(config.policies.len());
        for &kind in &config.policies {
            let report = run_policy(&kind.to_policy(spec.seed), &tasks, &reqs, scenario)?;
            rows.push(SweepRow {
                axis_value: values[*value_idx],
                repetition: *rep,
                policy: kind,
                mean_delay_s: report.schedule.mean_delay(),
                mean_energy_j: report.schedule.mean_energy,
                feasible_fraction: report.schedule.feasible_fraction(&tasks, &reqs)?,
                solver_nodes: report.nodes_explored,
            });
        }
        Ok(rows)
    };

    let results = parallel_map(&jobs, worker_count(), cell);
    let mut rows = Vec::with_capacity(jobs.len() * config.policies.len());
    for result in results {
        rows.extend(result?);
    }

    let summary = summarize(&rows, &values, config.repetitions, &config.policies);
    Ok(SweepOutcome { rows, summary })
}

fn summarize(
    rows: &[SweepRow],
    values: &[f64],
    repetitions: usize,
    policies: &[PolicyKind],
) -> Vec<SummaryRow> {
    let mut summary = Vec::with_capacity(values.len() * policies.len());
    for (value_idx, &axis_value) in values.iter().enumerate() {
        for (policy_idx, &policy) in policies.iter().enumerate() {
            let mut delay = 0.0;
            let mut energy = 0.0;
            let mut feasible = 0.0;
            let mut nodes = 0.0;
            for rep in 0..repetitions {
                let row = &rows[(value_idx * repetitions + rep) * policies.len() + policy_idx];
                debug_assert_eq!(row.policy, policy);
                delay += row.mean_delay_s;
                energy += row.mean_energy_j;
                feasible += row.feasible_fraction;
                nodes += row.solver_nodes as f64;
            }
            let n = repetitions as f64;
            summary.push(SummaryRow {
                axis_value,
                policy,
                repetitions,
                mean_delay_s: delay / n,
                mean_energy_j: energy / n,
                feasible_fraction: feasible / n,
                solver_nodes: nodes / n,
            });
        }
    }
    summary
}

/// Run a sweep end to end: resolve the scenario, execute, write the row CSV
/// and its `.summary.csv` companion. Returns the outcome and both paths.
pub fn run_sweep(config: &SweepConfig) -> Result<(SweepOutcome, PathBuf, PathBuf), HarnessError> {
    let scenario = match &config.scenario_path {
        Some(path) => load_scenario(path)?.scenario,
        None => default_scenario(),
    };
    let out_path = config.output_path.clone().ok_or_else(|| {
        HarnessError::ConfigParse("output path required (--out or config \"output\")".to_owned())
    })?;
    let outcome = execute_sweep(config, &scenario)?;
    let summary_path = summary_path_for(&out_path);
    write_file(&out_path, &outcome.rows_csv())?;
    write_file(&summary_path, &outcome.summary_csv())?;
    Ok((outcome, out_path, summary_path))
}

pub fn summary_path_for(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
    match name {
        Some(name) if name.to_ascii_lowercase().ends_with(".csv") => {
            path.with_file_name(format!("{}.summary.csv", &name[..name.len() - 4]))
        }
        _ => {
            let mut s = path.as_os_str().to_owned();
            s.push(".summary.csv");
            PathBuf::from(s)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::OutputWrite {
        path: path.display().to_string(),
        source,
    })
}

// ---------------------------------------------------------------------------
// Single-batch comparison
// ---------------------------------------------------------------------------

/// One line of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub label: String,
    pub mean_delay_s: f64,
    pub mean_energy_j: f64,
    pub feasible_fraction: f64,
    pub status: String,
    pub solver_nodes: u64,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub task_count: usize,
    pub seed: u64,
    pub rows: Vec<CompareRow>,
    /// Brute-force cross-check, present under `--verify`.
    pub oracle: Option<CompareRow>,
}

impl CompareReport {
    pub fn all_infeasible(&self) -> bool {
        self.task_count > 0 && self.rows.iter().all(|r| r.feasible_fraction == 0.0)
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q={} seed={}", self.task_count, self.seed)?;
        writeln!(
            f,
            "{:<18} {:>14} {:>15} {:>9} {:>22} {:>12}",
            "policy", "mean_delay_s", "mean_energy_J", "feasible", "status", "solver_nodes"
        )?;
        for row in self.rows.iter().chain(self.oracle.iter()) {
            writeln!(
                f,
                "{:<18} {:>14.6} {:>15.6} {:>9.3} {:>22} {:>12}",
                row.label,
                row.mean_delay_s,
                row.mean_energy_j,
                row.feasible_fraction,
                row.status,
                row.solver_nodes
            )?;
        }
        Ok(())
    }
}

fn status_label(status: &SolveStatus) -> String {
    match status {
        SolveStatus::Optimal => "optimal".to_owned(),
        SolveStatus::Infeasible => "infeasible".to_owned(),
        SolveStatus::PartiallyInfeasible(ids) => format!("partially_infeasible({})", ids.len()),
    }
}

fn compare_row(
    label: &str,
    report: &SolveReport,
    tasks: &[Task],
    reqs: &[Requirement],
) -> Result<CompareRow, HarnessError> {
    Ok(CompareRow {
        label: label.to_owned(),
        mean_delay_s: report.schedule.mean_delay(),
        mean_energy_j: report.schedule.mean_energy,
        feasible_fraction: report.schedule.feasible_fraction(tasks, reqs)?,
        status: status_label(&report.status),
        solver_nodes: report.nodes_explored,
    })
}

/// Compare policies on one batch of tasks.
pub fn compare_batch(
    tasks: &[Task],
    reqs: &[Requirement],
    scenario: &Scenario,
    policies: &[PolicyKind],
    seed: u64,
    verify: bool,
) -> Result<CompareReport, HarnessError> {
    let mut rows = Vec::with_capacity(policies.len());
    for &kind in policies {
        let report = run_policy(&kind.to_policy(seed), tasks, reqs, scenario)?;
        rows.push(compare_row(kind.name(), &report, tasks, reqs)?);
    }
    let oracle = if verify {
        let report = solve_bruteforce(tasks, reqs, scenario)?;
        Some(compare_row("bruteforce_oracle", &report, tasks, reqs)?)
    } else {
        None
    };
    Ok(CompareReport {
        task_count: tasks.len(),
        seed,
        rows,
        oracle,
    })
}

/// Run a comparison from a scenario file (or the stock scenario).
///
/// Embedded tasks win over workload generation; otherwise `q` tasks are
/// drawn (file workload section first, crate defaults as fallback).
pub fn run_compare(
    scenario_path: Option<&Path>,
    q: Option<usize>,
    seed: u64,
    policies: &[PolicyKind],
    verify: bool,
) -> Result<CompareReport, HarnessError> {
    let loaded = match scenario_path {
        Some(path) => load_scenario(path)?,
        None => crate::scenario::LoadedScenario {
            scenario: default_scenario(),
            tasks: vec![],
            workload: None,
        },
    };
    let (tasks, reqs): (Vec<_>, Vec<_>) = if loaded.tasks.is_empty() {
        let mut spec = loaded.workload.unwrap_or_default().resolve(seed)?;
        if let Some(q) = q {
            spec.count = q;
        }
        generate_tasks(&spec)?.into_iter().unzip()
    } else {
        loaded.tasks.into_iter().unzip()
    };
    compare_batch(&tasks, &reqs, &loaded.scenario, policies, seed, verify)
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

/// Worker count: `EDGESCHED_WORKERS` if set to a positive integer, else the
/// available parallelism.
pub fn worker_count() -> usize {
    std::env::var("EDGESCHED_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Apply `f` to every job on `workers` threads; results keep job order.
fn parallel_map<J, R, F>(jobs: &[J], workers: usize, f: F) -> Vec<R>
where
    J: Sync,
    R: Send,
    F: Fn(&J) -> R + Sync,
{
    if workers <= 1 || jobs.len() <= 1 {
        return jobs.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..workers.min(jobs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let r = f(&jobs[i]);
                results.lock().expect("result store poisoned")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .expect("result store poisoned")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Task;

    fn quick_config(axis: SweepAxis, reps: usize) -> SweepConfig {
        SweepConfig {
            axis,
            repetitions: reps,
            policies: PolicyKind::ALL.to_vec(),
            scenario_path: None,
            output_path: None,
            base_seed: 7,
            workload: WorkloadSpec {
                count: 12,
                ..WorkloadSpec::default()
            },
        }
    }

    #[test]
    fn rows_come_out_in_axis_rep_policy_order() {
        let config = quick_config(SweepAxis::Deadline(vec![1.0, 2.0]), 2);
        let outcome = execute_sweep(&config, &default_scenario()).unwrap();
        assert_eq!(outcome.rows.len(), 2 * 2 * 4);
        let key: Vec<_> = outcome
            .rows
            .iter()
            .map(|r| (r.axis_value.to_bits(), r.repetition, r.policy))
            .collect();
        let expected: Vec<_> = [1.0f64, 2.0]
            .iter()
            .flat_map(|&v| {
                (0..2).flat_map(move |rep| {
                    PolicyKind::ALL.iter().map(move |&p| (v.to_bits(), rep, p))
                })
            })
            .collect();
        assert_eq!(key, expected);
    }

    #[test]
    fn summary_means_match_rows() {
        let config = quick_config(SweepAxis::TaskCount(vec![5, 10]), 3);
        let outcome = execute_sweep(&config, &default_scenario()).unwrap();
        for s in &outcome.summary {
            let selected: Vec<_> = outcome
                .rows
                .iter()
                .filter(|r| r.axis_value == s.axis_value && r.policy == s.policy)
                .collect();
            assert_eq!(selected.len(), s.repetitions);
            let mean =
                selected.iter().map(|r| r.mean_energy_j).sum::<f64>() / selected.len() as f64;
            let rel = (mean - s.mean_energy_j).abs() / mean.abs().max(1e-300);
            assert!(rel <= 1e-12);
        }
    }

    #[test]
    fn identical_configs_render_identical_csv() {
        let config = quick_config(SweepAxis::Cycles(vec![0.5, 1.0, 2.0]), 2);
        let a = execute_sweep(&config, &default_scenario()).unwrap();
        let b = execute_sweep(&config, &default_scenario()).unwrap();
        assert_eq!(a.rows_csv(), b.rows_csv());
        assert_eq!(a.summary_csv(), b.summary_csv());
    }

    #[test]
    fn worker_pool_does_not_change_results() {
        let config = quick_config(SweepAxis::Deadline(vec![1.0, 2.0, 4.0]), 2);
        let scenario = default_scenario();
        let serial: Vec<Vec<SweepRow>> = {
            let values = config.axis.values();
            (0..values.len())
                .flat_map(|v| (0..config.repetitions).map(move |r| (v, r)))
                .map(|(v, r)| {
                    let spec = config.axis.apply(&config.workload, v, config.base_seed + r as u64);
                    let batch = generate_tasks(&spec).unwrap();
                    let (tasks, reqs): (Vec<_>, Vec<_>) = batch.into_iter().unzip();
                    config
                        .policies
                        .iter()
                        .map(|&kind| {
                            let report =
                                run_policy(&kind.to_policy(spec.seed), &tasks, &reqs, &scenario)
                                    .unwrap();
                            SweepRow {
                                axis_value: values[v],
                                repetition: r,
                                policy: kind,
                                mean_delay_s: report.schedule.mean_delay(),
                                mean_energy_j: report.schedule.mean_energy,
                                feasible_fraction: report
                                    .schedule
                                    .feasible_fraction(&tasks, &reqs)
                                    .unwrap(),
                                solver_nodes: report.nodes_explored,
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let outcome = execute_sweep(&config, &scenario).unwrap();
        let flat: Vec<SweepRow> = serial.into_iter().flatten().collect();
        assert_eq!(outcome.rows, flat);
    }

    #[test]
    fn zero_work_tasks_compare_to_zero() {
        let scenario = default_scenario();
        let tasks = vec![Task::with_uniform_accuracy("t0", 0.0, 0.0, 0.0, 1.0).unwrap()];
        let reqs = vec![Requirement::new(0.0, 1.0).unwrap()];
        let report =
            compare_batch(&tasks, &reqs, &scenario, &PolicyKind::ALL, 42, false).unwrap();
        for row in &report.rows {
            assert_eq!(row.mean_delay_s, 0.0);
            assert_eq!(row.mean_energy_j, 0.0);
        }
    }

    #[test]
    fn verify_appends_matching_oracle_row() {
        let scenario = default_scenario();
        let batch = generate_tasks(&WorkloadSpec {
            count: 6,
            seed: 9,
            ..WorkloadSpec::default()
        })
        .unwrap();
        let (tasks, reqs): (Vec<_>, Vec<_>) = batch.into_iter().unzip();
        let report = compare_batch(&tasks, &reqs, &scenario, &PolicyKind::ALL, 9, true).unwrap();
        let oracle = report.oracle.as_ref().unwrap();
        let proposed = report
            .rows
            .iter()
            .find(|r| r.label == "edge_multi_layer")
            .unwrap();
        assert_eq!(oracle.mean_energy_j, proposed.mean_energy_j);
        assert_eq!(oracle.mean_delay_s, proposed.mean_delay_s);
    }

    #[test]
    fn proposed_at_most_baselines_in_rows() {
        let config = quick_config(SweepAxis::TaskCount(vec![20, 40]), 2);
        let outcome = execute_sweep(&config, &default_scenario()).unwrap();
        for chunk in outcome.rows.chunks(4) {
            let proposed = chunk
                .iter()
                .find(|r| r.policy == PolicyKind::EdgeBasedMultiLayer)
                .unwrap();
            if chunk.iter().all(|r| r.feasible_fraction == 1.0) {
                for baseline in chunk.iter().filter(|r| r.policy != proposed.policy) {
                    assert!(proposed.mean_energy_j <= baseline.mean_energy_j);
                }
            }
        }
    }

    #[test]
    fn capacity_axis_relaxes_energy_as_limits_grow() {
        // Small batch that wants the cloud; widening the cloud's limit can
        // only lower the optimal energy.
        let config = SweepConfig {
            axis: SweepAxis::NodeCapacity {
                node: NodeId::new("cloud0"),
                limits: vec![1, 2, 4, 8],
            },
            repetitions: 2,
            policies: vec![PolicyKind::EdgeBasedMultiLayer],
            scenario_path: None,
            output_path: None,
            base_seed: 21,
            workload: WorkloadSpec {
                count: 8,
                cycles_range: (2.0e9, 8.0e9),
                size_range: (0.2 * BITS_PER_MB, 1.0 * BITS_PER_MB),
                ..WorkloadSpec::default()
            },
        };
        let outcome = execute_sweep(&config, &default_scenario()).unwrap();
        let summary = outcome.summary_for(PolicyKind::EdgeBasedMultiLayer);
        for pair in summary.windows(2) {
            assert!(pair[1].mean_energy_j <= pair[0].mean_energy_j);
        }
        // The tightest limit forces spills, so the search does real work.
        assert!(summary[0].solver_nodes > 1.0);
        assert!(summary[0].mean_energy_j > summary.last().unwrap().mean_energy_j);

        // Unknown target node is a config error.
        let bad = SweepConfig {
            axis: SweepAxis::NodeCapacity {
                node: NodeId::new("nonexistent"),
                limits: vec![1, 2],
            },
            ..config
        };
        assert!(matches!(
            execute_sweep(&bad, &default_scenario()),
            Err(HarnessError::ConfigParse(_))
        ));
    }

    #[test]
    fn zero_cycles_limit_leaves_only_transmission_cost() {
        let config = SweepConfig {
            axis: SweepAxis::Cycles(vec![0.0001, 0.001]),
            repetitions: 1,
            policies: vec![PolicyKind::LocalOnly, PolicyKind::CloudOnly],
            scenario_path: None,
            output_path: None,
            base_seed: 1,
            workload: WorkloadSpec {
                count: 30,
                ..WorkloadSpec::default()
            },
        };
        let outcome = execute_sweep(&config, &default_scenario()).unwrap();
        let local = outcome.summary_for(PolicyKind::LocalOnly);
        let cloud = outcome.summary_for(PolicyKind::CloudOnly);
        // Local cost vanishes with the work; cloud cost is pinned by the
        // upload and barely moves across the two near-zero points.
        assert!(local[0].mean_energy_j < 1e-3);
        assert!(local[1].mean_energy_j < 1e-3);
        assert!(cloud[0].mean_energy_j > 1.0);
        let rel = (cloud[1].mean_energy_j - cloud[0].mean_energy_j).abs()
            / cloud[0].mean_energy_j;
        assert!(rel < 1e-3);
    }

    #[test]
    fn summary_path_naming() {
        assert_eq!(
            summary_path_for(Path::new("out/run.csv")),
            PathBuf::from("out/run.summary.csv")
        );
        assert_eq!(
            summary_path_for(Path::new("rows")),
            PathBuf::from("rows.summary.csv")
        );
    }

    #[test]
    fn axis_validation_catches_misuse() {
        assert!(SweepAxis::Deadline(vec![]).validate().is_err());
        assert!(SweepAxis::Deadline(vec![2.0, 1.0]).validate().is_err());
        assert!(SweepAxis::Deadline(vec![1.0, 1.0]).validate().is_err());
        assert!(SweepAxis::TaskCount(vec![0, 5]).validate().is_err());
        assert!(SweepAxis::Cycles(vec![0.1, 5.0]).validate().is_ok());
    }

    #[test]
    fn policy_tokens_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(PolicyKind::parse(kind.name()).unwrap(), kind);
        }
        assert!(PolicyKind::parse("everything_everywhere").is_err());
        let kinds = PolicyKind::parse_list("local_only, edge_multi_layer").unwrap();
        assert_eq!(kinds, vec![PolicyKind::LocalOnly, PolicyKind::EdgeBasedMultiLayer]);
    }
}
