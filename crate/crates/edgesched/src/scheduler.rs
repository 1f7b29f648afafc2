//! Offloading policies and exact solvers for the delay-constrained
//! energy-minimization problem.
//!
//! Three baseline policies force an executor choice (all-local, all-cloud,
//! seeded-random layer); the proposed policy minimizes mean device energy
//! subject to per-task deadlines and accuracy floors. Without node
//! capacities the objective separates per task, so a greedy per-task
//! argmin is exactly optimal; [`solve_bnb`] keeps branch-and-bound as the
//! general method and handles the capacity-coupled case, and
//! [`solve_bruteforce`] is the enumeration oracle both are checked against.
//!
//! Tasks with an empty feasible set are assigned their minimum-delay
//! executor (ties: energy, then node id), their costs accrue, and they are
//! reported through [`SolveStatus`]; no solver drops a task or raises an
//! error for infeasibility. All solvers share one cost table and evaluate
//! final schedules through [`Schedule::evaluate`], so equal assignment
//! vectors always produce bit-identical objectives.

use rand::Rng;
use rand::SeedableRng;
use rand_pcg::Pcg64;
use thiserror::Error;

use crate::model::{
    Assignment, Layer, ModelError, Node, NodeId, Requirement, Scenario, Schedule, Task, TaskId,
};

/// Hard cap on the brute-force search space, as `|executors|^q`.
pub const BRUTE_FORCE_LIMIT: f64 = 1.0e7;

/// Errors from policy execution and solving.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("scenario has no {0} node")]
    NoNodeOfLayer(Layer),
    #[error("search space too large: {nodes} executors over {tasks} tasks")]
    SearchSpaceTooLarge { nodes: usize, tasks: usize },
    #[error("greedy solver requires a scenario without node capacities")]
    CapacityConfigured,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A task offloading policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Execute every task on the device itself.
    LocalOnly,
    /// Offload every task to a cloud node (least-loaded, ties by node id).
    CloudOnly,
    /// Draw a layer uniformly per task from the declared seed and use the
    /// first node of that layer.
    Random { seed: u64 },
    /// Solve the energy-minimization problem across all three layers.
    EdgeBasedMultiLayer,
}

impl Policy {
    /// Stable token used in CSV output and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            Policy::LocalOnly => "local_only",
            Policy::CloudOnly => "cloud_only",
            Policy::Random { .. } => "random",
            Policy::EdgeBasedMultiLayer => "edge_multi_layer",
        }
    }
}

/// Outcome classification of a solve or policy run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    /// Every task meets its deadline and accuracy floor.
    Optimal,
    /// Every task violates a constraint (or capacities admit no schedule).
    Infeasible,
    /// The listed tasks violate a constraint; the rest are fine.
    PartiallyInfeasible(Vec<TaskId>),
}

/// A schedule plus solve diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub schedule: Schedule,
    /// Mean device energy in joules, the minimization objective.
    pub objective: f64,
    /// Search nodes expanded (branch and bound) or complete vectors
    /// evaluated (brute force); zero for the forced policies and greedy.
    pub nodes_explored: u64,
    pub status: SolveStatus,
}

/// Every node on which `task` meets both its deadline and its accuracy
/// floor, in scenario declaration order. An empty result marks the task as
/// individually infeasible; remote nodes without an inbound link are never
/// feasible.
pub fn feasible_executors(
    task: &Task,
    requirement: &Requirement,
    scenario: &Scenario,
) -> Result<Vec<NodeId>, ModelError> {
    let costs = TaskCosts::build(task, requirement, scenario)?;
    Ok(costs
        .feasible
        .iter()
        .map(|&c| scenario.nodes()[costs.candidates[c].node_idx].id.clone())
        .collect())
}

/// Run one policy over a task batch.
///
/// Baselines accrue the cost of every task even when the forced executor
/// violates a constraint; violations surface in the report status.
pub fn run_policy(
    policy: &Policy,
    tasks: &[Task],
    requirements: &[Requirement],
    scenario: &Scenario,
) -> Result<SolveReport, SolveError> {
    check_instance(tasks, requirements)?;
    let assignments = match policy {
        Policy::LocalOnly => {
            let device = scenario.primary_local();
            tasks
                .iter()
                .map(|t| Assignment::new(t.id.clone(), device))
                .collect()
        }
        Policy::CloudOnly => {
            let mut clouds: Vec<&Node> = scenario.nodes_of_layer(Layer::Cloud).collect();
            if clouds.is_empty() {
                return Err(SolveError::NoNodeOfLayer(Layer::Cloud));
            }
            clouds.sort_by(|a, b| a.id.cmp(&b.id));
            let mut load = vec![0usize; clouds.len()];
            tasks
                .iter()
                .map(|t| {
                    let pick = (0..clouds.len())
                        .min_by_key(|&i| (load[i], i))
                        .expect("non-empty cloud list");
                    load[pick] += 1;
                    Assignment::new(t.id.clone(), clouds[pick])
                })
                .collect()
        }
        Policy::Random { seed } => {
            let mut rng = Pcg64::seed_from_u64(*seed);
            let mut assignments = Vec::with_capacity(tasks.len());
            for task in tasks {
                let layer = Layer::ALL[rng.gen_range(0..Layer::ALL.len())];
                let node = scenario
                    .first_of_layer(layer)
                    .ok_or(SolveError::NoNodeOfLayer(layer))?;
                assignments.push(Assignment::new(task.id.clone(), node));
            }
            assignments
        }
        Policy::EdgeBasedMultiLayer => return solve_bnb(tasks, requirements, scenario),
    };
    let schedule = Schedule::evaluate(tasks, requirements, assignments, scenario)?;
    make_report(schedule, 0, tasks, requirements)
}

/// Exhaustively enumerate assignment vectors and return the feasible one
/// with minimal mean energy (ties: lexicographically first in node
/// declaration order). The oracle for the other solvers.
pub fn solve_bruteforce(
    tasks: &[Task],
    requirements: &[Requirement],
    scenario: &Scenario,
) -> Result<SolveReport, SolveError> {
    check_instance(tasks, requirements)?;
    let n = scenario.nodes().len();
    let q = tasks.len();
    if (n as f64).powi(q as i32) > BRUTE_FORCE_LIMIT {
        return Err(SolveError::SearchSpaceTooLarge { nodes: n, tasks: q });
    }
    if q == 0 {
        let schedule = Schedule::evaluate(tasks, requirements, vec![], scenario)?;
        return make_report(schedule, 0, tasks, requirements);
    }
    let instance = Instance::build(tasks, requirements, scenario)?;
    let check_capacity = scenario.has_capacities();

    // Odometer over each task's lexicographic candidate list, task 0 most
    // significant; first strict improvement wins, so ties resolve to the
    // lexicographically smallest vector.
    let mut counters = vec![0usize; q];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evaluated: u64 = 0;
    'outer: loop {
        evaluated += 1;
        let picks: Vec<usize> = (0..q)
            .map(|t| instance.per_task[t].lex_order[counters[t]])
            .collect();
        if !check_capacity || instance.respects_capacities(&picks) {
            let total = instance.total_energy(&picks);
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, picks));
            }
        }
        for t in (0..q).rev() {
            counters[t] += 1;
            if counters[t] < instance.per_task[t].lex_order.len() {
                continue 'outer;
            }
            counters[t] = 0;
        }
        break;
    }

    match best {
        Some((_, picks)) => {
            let schedule = instance.schedule_from(&picks)?;
            make_report(schedule, evaluated, tasks, requirements)
        }
        None => instance.capacity_infeasible_report(evaluated),
    }
}

/// Pick, independently for each task, the feasible executor with minimal
/// energy (ties: lower delay, then node id). Exactly optimal when no node
/// capacities couple the tasks; rejected otherwise.
pub fn solve_greedy(
    tasks: &[Task],
    requirements: &[Requirement],
    scenario: &Scenario,
) -> Result<SolveReport, SolveError> {
    check_instance(tasks, requirements)?;
    if scenario.has_capacities() {
        return Err(SolveError::CapacityConfigured);
    }
    let instance = Instance::build(tasks, requirements, scenario)?;
    let picks: Vec<usize> = instance.per_task.iter().map(|tc| tc.search_order[0]).collect();
    let schedule = instance.schedule_from(&picks)?;
    make_report(schedule, 0, tasks, requirements)
}

/// Depth-first branch and bound over per-task executor choices.
///
/// Tasks branch in descending-cycles order; children are tried cheapest
/// first. The bound at a partial node is the task-order sum of fixed
/// energies plus each unfixed task's minimal feasible energy ignoring
/// capacities, which never exceeds the value of any completion (capacities
/// only remove options), so pruning at `bound >= incumbent` is exact. The
/// incumbent starts from [`solve_greedy`] when no capacities are set, and
/// from the all-local schedule when that schedule is itself feasible.
pub fn solve_bnb(
    tasks: &[Task],
    requirements: &[Requirement],
    scenario: &Scenario,
) -> Result<SolveReport, SolveError> {
    check_instance(tasks, requirements)?;
    let q = tasks.len();
    if q == 0 {
        let schedule = Schedule::evaluate(tasks, requirements, vec![], scenario)?;
        return make_report(schedule, 0, tasks, requirements);
    }
    let instance = Instance::build(tasks, requirements, scenario)?;
    let capacitated = scenario.has_capacities();

    let mut incumbent: Option<(f64, Vec<usize>)> = None;
    if !capacitated {
        let picks: Vec<usize> = instance.per_task.iter().map(|tc| tc.search_order[0]).collect();
        let total = instance.total_energy(&picks);
        incumbent = Some((total, picks));
    } else if let Some(picks) = instance.all_local_picks() {
        // Usable as an upper bound only when it breaks nothing.
        if instance.respects_capacities(&picks) && instance.all_feasible(&picks) {
            let total = instance.total_energy(&picks);
            incumbent = Some((total, picks));
        }
    }

    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&a, &b| {
        tasks[b]
            .cycles
            .total_cmp(&tasks[a].cycles)
            .then(a.cmp(&b))
    });

    let mut search = BnbSearch {
        instance: &instance,
        order: &order,
        capacitated,
        usage: vec![0usize; scenario.nodes().len()],
        fixed: vec![None; q],
        incumbent,
        nodes_explored: 0,
    };
    search.dfs(0);
    let BnbSearch {
        incumbent,
        nodes_explored,
        ..
    } = search;

    match incumbent {
        Some((_, picks)) => {
            let schedule = instance.schedule_from(&picks)?;
            make_report(schedule, nodes_explored, tasks, requirements)
        }
        None => instance.capacity_infeasible_report(nodes_explored),
    }
}

// ---------------------------------------------------------------------------
// Shared cost table
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Candidate {
    node_idx: usize,
    delay: f64,
    energy: f64,
    feasible: bool,
}

#[derive(Debug, Clone)]
struct TaskCosts {
    /// Executors reachable by this task (local nodes, plus linked remote
    /// nodes), in scenario declaration order.
    candidates: Vec<Candidate>,
    /// Positions into `candidates` that satisfy both constraints.
    feasible: Vec<usize>,
    /// Candidate positions searched by greedy and branch-and-bound: the
    /// feasible set sorted by (energy, delay, node id), or the fallback
    /// minimum-delay executor when nothing is feasible.
    search_order: Vec<usize>,
    /// Candidate positions in declaration order for brute-force
    /// enumeration; same fallback rule.
    lex_order: Vec<usize>,
    /// Energy of the cheapest option in `search_order`; the bound term.
    bound_energy: f64,
}

impl TaskCosts {
    fn build(
        task: &Task,
        requirement: &Requirement,
        scenario: &Scenario,
    ) -> Result<Self, ModelError> {
        let mut candidates = Vec::new();
        for (node_idx, node) in scenario.nodes().iter().enumerate() {
            if node.layer != Layer::Local && scenario.link_to(&node.id).is_none() {
                continue;
            }
            let assignment = Assignment::new(task.id.clone(), node);
            let costs = crate::model::layer_costs(task, &assignment, scenario)?;
            let accuracy = crate::model::achieved_accuracy(task, &assignment)?;
            let feasible =
                costs.delay <= requirement.deadline && accuracy >= requirement.accuracy_floor;
            candidates.push(Candidate {
                node_idx,
                delay: costs.delay,
                energy: costs.energy,
                feasible,
            });
        }
        debug_assert!(!candidates.is_empty(), "a local node is always reachable");
        let feasible: Vec<usize> = (0..candidates.len())
            .filter(|&c| candidates[c].feasible)
            .collect();
        let (search_order, lex_order) = if feasible.is_empty() {
            let fallback = (0..candidates.len())
                .min_by(|&a, &b| {
                    let (ca, cb) = (&candidates[a], &candidates[b]);
                    ca.delay
                        .total_cmp(&cb.delay)
                        .then(ca.energy.total_cmp(&cb.energy))
                        .then_with(|| {
                            scenario.nodes()[ca.node_idx]
                                .id
                                .cmp(&scenario.nodes()[cb.node_idx].id)
                        })
                })
                .expect("non-empty candidates");
            (vec![fallback], vec![fallback])
        } else {
            let mut by_energy = feasible.clone();
            by_energy.sort_by(|&a, &b| {
                let (ca, cb) = (&candidates[a], &candidates[b]);
                ca.energy
                    .total_cmp(&cb.energy)
                    .then(ca.delay.total_cmp(&cb.delay))
                    .then_with(|| {
                        scenario.nodes()[ca.node_idx]
                            .id
                            .cmp(&scenario.nodes()[cb.node_idx].id)
                    })
            });
            (by_energy, feasible.clone())
        };
        let bound_energy = candidates[search_order[0]].energy;
        Ok(Self {
            candidates,
            feasible,
            search_order,
            lex_order,
            bound_energy,
        })
    }

}

struct Instance<'a> {
    tasks: &'a [Task],
    requirements: &'a [Requirement],
    scenario: &'a Scenario,
    per_task: Vec<TaskCosts>,
}

impl<'a> Instance<'a> {
    fn build(
        tasks: &'a [Task],
        requirements: &'a [Requirement],
        scenario: &'a Scenario,
    ) -> Result<Self, ModelError> {
        let per_task = tasks
            .iter()
            .zip(requirements)
            .map(|(t, r)| TaskCosts::build(t, r, scenario))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            tasks,
            requirements,
            scenario,
            per_task,
        })
    }

    /// Task-order energy sum of one candidate pick per task. This is the
    /// same left-to-right fold [`Schedule::evaluate`] performs, so equal
    /// picks give bit-identical totals.
    fn total_energy(&self, picks: &[usize]) -> f64 {
        picks
            .iter()
            .zip(&self.per_task)
            .fold(0.0, |acc, (&c, tc)| acc + tc.candidates[c].energy)
    }

    fn respects_capacities(&self, picks: &[usize]) -> bool {
        let mut usage = vec![0usize; self.scenario.nodes().len()];
        for (&c, tc) in picks.iter().zip(&self.per_task) {
            usage[tc.candidates[c].node_idx] += 1;
        }
        self.scenario
            .nodes()
            .iter()
            .enumerate()
            .all(|(i, n)| n.capacity.is_none_or(|cap| usage[i] <= cap))
    }

    fn all_feasible(&self, picks: &[usize]) -> bool {
        picks
            .iter()
            .zip(&self.per_task)
            .all(|(&c, tc)| tc.candidates[c].feasible)
    }

    /// Candidate picks for the all-local schedule, if the device is a
    /// candidate for every task (it always is).
    fn all_local_picks(&self) -> Option<Vec<usize>> {
        let device_idx = self
            .scenario
            .nodes()
            .iter()
            .position(|n| n.layer == Layer::Local)?;
        self.per_task
            .iter()
            .map(|tc| tc.candidates.iter().position(|c| c.node_idx == device_idx))
            .collect()
    }

    fn schedule_from(&self, picks: &[usize]) -> Result<Schedule, ModelError> {
        let assignments = picks
            .iter()
            .zip(self.tasks)
            .zip(&self.per_task)
            .map(|((&c, task), tc)| {
                Assignment::new(
                    task.id.clone(),
                    &self.scenario.nodes()[tc.candidates[c].node_idx],
                )
            })
            .collect();
        Schedule::evaluate(self.tasks, self.requirements, assignments, self.scenario)
    }

    /// Report for the capacity-infeasible case: per-task best picks ignoring
    /// capacities, costs accrued, status forced to Infeasible.
    fn capacity_infeasible_report(&self, nodes_explored: u64) -> Result<SolveReport, SolveError> {
        let picks: Vec<usize> = self.per_task.iter().map(|tc| tc.search_order[0]).collect();
        let schedule = self.schedule_from(&picks)?;
        let objective = schedule.mean_energy;
        Ok(SolveReport {
            schedule,
            objective,
            nodes_explored,
            status: SolveStatus::Infeasible,
        })
    }
}

// ---------------------------------------------------------------------------
// Branch and bound search
// ---------------------------------------------------------------------------

struct BnbSearch<'a> {
    instance: &'a Instance<'a>,
    order: &'a [usize],
    capacitated: bool,
    usage: Vec<usize>,
    /// Chosen candidate per task index (not branching position).
    fixed: Vec<Option<usize>>,
    /// Best complete pick vector and its task-order energy total.
    incumbent: Option<(f64, Vec<usize>)>,
    nodes_explored: u64,
}

impl BnbSearch<'_> {
    /// Task-order sum: fixed energies where decided, per-task minima
    /// elsewhere. Never exceeds the total of any completion of this node.
    fn bound(&self) -> f64 {
        self.fixed
            .iter()
            .zip(&self.instance.per_task)
            .fold(0.0, |acc, (fixed, tc)| {
                acc + match fixed {
                    Some(c) => tc.candidates[*c].energy,
                    None => tc.bound_energy,
                }
            })
    }

    fn dfs(&mut self, pos: usize) {
        self.nodes_explored += 1;
        let bound = self.bound();
        if let Some((best, _)) = &self.incumbent {
            if bound >= *best {
                return;
            }
        }
        if pos == self.order.len() {
            let picks: Vec<usize> = self.fixed.iter().map(|c| c.unwrap()).collect();
            self.incumbent = Some((bound, picks));
            return;
        }
        let task = self.order[pos];
        for i in 0..self.instance.per_task[task].search_order.len() {
            let cand = self.instance.per_task[task].search_order[i];
            let node_idx = self.instance.per_task[task].candidates[cand].node_idx;
            if self.capacitated {
                let cap = self.instance.scenario.nodes()[node_idx].capacity;
                if cap.is_some_and(|cap| self.usage[node_idx] + 1 > cap) {
                    continue; // fathomed: executor already full
                }
            }
            self.usage[node_idx] += 1;
            self.fixed[task] = Some(cand);
            self.dfs(pos + 1);
            self.fixed[task] = None;
            self.usage[node_idx] -= 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

fn check_instance(tasks: &[Task], requirements: &[Requirement]) -> Result<(), SolveError> {
    if tasks.len() != requirements.len() {
        return Err(SolveError::Model(ModelError::InstanceMismatch(format!(
            "{} tasks but {} requirements",
            tasks.len(),
            requirements.len()
        ))));
    }
    Ok(())
}

fn make_report(
    schedule: Schedule,
    nodes_explored: u64,
    tasks: &[Task],
    requirements: &[Requirement],
) -> Result<SolveReport, SolveError> {
    let violations = schedule.violations(tasks, requirements)?;
    let status = if violations.is_empty() {
        SolveStatus::Optimal
    } else if violations.len() == tasks.len() {
        SolveStatus::Infeasible
    } else {
        SolveStatus::PartiallyInfeasible(violations)
    };
    let objective = schedule.mean_energy;
    Ok(SolveReport {
        schedule,
        objective,
        nodes_explored,
        status,
    })
}
