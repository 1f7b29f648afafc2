//! Domain types for the device/edge/cloud offloading model and the
//! indicator-weighted combination of per-layer costs into per-task delay
//! and energy.
//!
//! An [`Assignment`] stores exactly one executor per task, so the three
//! layer-selection indicators always sum to one by construction; there is
//! no encodable state in which a task runs on two layers at once.
//! [`combine_delay`] and [`combine_energy`] evaluate the indicator-weighted
//! cost of the chosen executor, and [`Schedule::evaluate`] rolls per-task
//! costs up into batch totals. All types are immutable values after
//! construction and every operation here is a pure function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{self, CostError, LayerCosts};

/// Bits per megabyte for every MB-denominated configuration field.
pub const BITS_PER_MB: f64 = 8.0e6;

/// Errors from model construction and cost combination.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid task {id}: {reason}")]
    InvalidTask { id: TaskId, reason: String },
    #[error("invalid requirement: {0}")]
    InvalidRequirement(String),
    #[error("invalid node {id}: {reason}")]
    InvalidNode { id: NodeId, reason: String },
    #[error("invalid link {from} -> {to}: {reason}")]
    InvalidLink {
        from: NodeId,
        to: NodeId,
        reason: String,
    },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unknown executor {0}")]
    UnknownExecutor(NodeId),
    #[error("no link configured to {0}")]
    MissingLink(NodeId),
    #[error("task {task} has no accuracy entry for layer {layer}")]
    MissingAccuracyEntry { task: TaskId, layer: Layer },
    #[error("schedule does not match instance: {0}")]
    InstanceMismatch(String),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// Execution layer of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Local,
    Edge,
    Cloud,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Local, Layer::Edge, Layer::Cloud];

    pub fn name(self) -> &'static str {
        match self {
            Layer::Local => "local",
            Layer::Edge => "edge",
            Layer::Cloud => "cloud",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

macro_rules! id_type {
    ($name:ident) => {
        #[derive(
            Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

id_type!(NodeId);
id_type!(TaskId);

/// One unit of work: required CPU cycles, input and output sizes in bits,
/// and the recognition accuracy achievable at each layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: TaskId,
    /// CPU cycles required to complete the task.
    pub cycles: f64,
    /// Input data shipped uplink when offloading, in bits.
    pub input_size: f64,
    /// Result data returned to the device, in bits. Only consumed through
    /// the scenario-wide constant feedback time.
    pub output_size: f64,
    /// Accuracy achieved when the task runs at each layer, each in [0, 1].
    pub accuracy_by_layer: BTreeMap<Layer, f64>,
}

impl Task {
    pub fn new(
        id: impl Into<TaskId>,
        cycles: f64,
        input_size: f64,
        output_size: f64,
        accuracy_by_layer: BTreeMap<Layer, f64>,
    ) -> Result<Self, ModelError> {
        let task = Self {
            id: id.into(),
            cycles,
            input_size,
            output_size,
            accuracy_by_layer,
        };
        task.validate()?;
        Ok(task)
    }

    /// Convenience constructor giving every layer the same accuracy.
    pub fn with_uniform_accuracy(
        id: impl Into<TaskId>,
        cycles: f64,
        input_size: f64,
        output_size: f64,
        accuracy: f64,
    ) -> Result<Self, ModelError> {
        let map = Layer::ALL.iter().map(|&l| (l, accuracy)).collect();
        Self::new(id, cycles, input_size, output_size, map)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |reason: &str| ModelError::InvalidTask {
            id: self.id.clone(),
            reason: reason.to_owned(),
        };
        if !(self.cycles >= 0.0) {
            return Err(fail("cycles must be non-negative"));
        }
        if !(self.input_size >= 0.0) {
            return Err(fail("input_size must be non-negative"));
        }
        if !(self.output_size >= 0.0) {
            return Err(fail("output_size must be non-negative"));
        }
        for (layer, acc) in &self.accuracy_by_layer {
            if !(0.0..=1.0).contains(acc) {
                return Err(fail(&format!("accuracy at {layer} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Accuracy the task achieves when executed at `layer`.
    pub fn accuracy_at(&self, layer: Layer) -> Result<f64, ModelError> {
        self.accuracy_by_layer
            .get(&layer)
            .copied()
            .ok_or(ModelError::MissingAccuracyEntry {
                task: self.id.clone(),
                layer,
            })
    }
}

/// Per-task user demand: an accuracy floor and a deadline in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Requirement {
    pub accuracy_floor: f64,
    pub deadline: f64,
}

impl Requirement {
    pub fn new(accuracy_floor: f64, deadline: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&accuracy_floor) {
            return Err(ModelError::InvalidRequirement(format!(
                "accuracy_floor {accuracy_floor} must lie in [0, 1]"
            )));
        }
        if !(deadline > 0.0) {
            return Err(ModelError::InvalidRequirement(format!(
                "deadline {deadline} must be positive"
            )));
        }
        Ok(Self {
            accuracy_floor,
            deadline,
        })
    }
}

/// How a local device's execution power is modeled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalPower {
    /// Measured execution power in watts; energy is `P·(cycles/f)`.
    Measured { power: f64 },
    /// CPU power model `P = κ·f^γ`; energy is `κ·f^(γ−1)·cycles`.
    Analytic { kappa: f64, gamma: f64 },
}

/// An execution location: a local device, edge server, or cloud server.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub layer: Layer,
    /// CPU frequency in Hz.
    pub frequency: f64,
    /// Power parameters; present exactly for local nodes.
    pub local_power: Option<LocalPower>,
    /// Optional maximum number of tasks this node may run in one batch.
    pub capacity: Option<usize>,
}

impl Node {
    pub fn local(
        id: impl Into<NodeId>,
        frequency: f64,
        power: LocalPower,
    ) -> Result<Self, ModelError> {
        let node = Self {
            id: id.into(),
            layer: Layer::Local,
            frequency,
            local_power: Some(power),
            capacity: None,
        };
        node.validate()?;
        Ok(node)
    }

    pub fn remote(id: impl Into<NodeId>, layer: Layer, frequency: f64) -> Result<Self, ModelError> {
        let node = Self {
            id: id.into(),
            layer,
            frequency,
            local_power: None,
            capacity: None,
        };
        node.validate()?;
        Ok(node)
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = Some(capacity);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |reason: String| ModelError::InvalidNode {
            id: self.id.clone(),
            reason,
        };
        if !(self.frequency > 0.0) {
            return Err(fail(format!("frequency {} must be positive", self.frequency)));
        }
        match (self.layer, &self.local_power) {
            (Layer::Local, None) => {
                return Err(fail("local node needs power parameters".to_owned()))
            }
            (Layer::Local, Some(LocalPower::Measured { power })) => {
                if !(*power > 0.0) {
                    return Err(fail(format!("measured power {power} must be positive")));
                }
            }
            (Layer::Local, Some(LocalPower::Analytic { kappa, gamma })) => {
                if !(*kappa > 0.0) {
                    return Err(fail(format!("kappa {kappa} must be positive")));
                }
                if !(2.0..=3.0).contains(gamma) {
                    return Err(fail(format!("gamma {gamma} must lie in [2, 3]")));
                }
            }
            (_, Some(_)) => {
                return Err(fail("power parameters only apply to local nodes".to_owned()))
            }
            (_, None) => {}
        }
        if let Some(0) = self.capacity {
            return Err(fail("capacity must be at least 1 when set".to_owned()));
        }
        Ok(())
    }
}

/// A device-to-server wireless channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub from_node: NodeId,
    pub to_node: NodeId,
    /// System bandwidth in Hz.
    pub bandwidth: f64,
    /// Channel power gain, dimensionless.
    pub gain: f64,
    /// Receiver noise power in W.
    pub noise: f64,
    /// Device transmit power in W.
    pub tx_power: f64,
    /// Device idle power while waiting for the result, in W.
    pub idle_power: f64,
    /// Optional fixed propagation term added to delay, in seconds.
    pub extra_rtt: f64,
}

impl Link {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        from: impl Into<NodeId>,
        to: impl Into<NodeId>,
        bandwidth: f64,
        gain: f64,
        noise: f64,
        tx_power: f64,
        idle_power: f64,
    ) -> Result<Self, ModelError> {
        let link = Self {
            from_node: from.into(),
            to_node: to.into(),
            bandwidth,
            gain,
            noise,
            tx_power,
            idle_power,
            extra_rtt: 0.0,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn with_extra_rtt(mut self, extra_rtt: f64) -> Result<Self, ModelError> {
        self.extra_rtt = extra_rtt;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |reason: String| ModelError::InvalidLink {
            from: self.from_node.clone(),
            to: self.to_node.clone(),
            reason,
        };
        for (name, v) in [
            ("bandwidth", self.bandwidth),
            ("gain", self.gain),
            ("noise", self.noise),
            ("tx_power", self.tx_power),
            ("idle_power", self.idle_power),
        ] {
            if !(v > 0.0) {
                return Err(fail(format!("{name} {v} must be positive")));
            }
        }
        if !(self.extra_rtt >= 0.0) {
            return Err(fail(format!(
                "extra_rtt {} must be non-negative",
                self.extra_rtt
            )));
        }
        Ok(())
    }
}

/// Scenario-wide constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Constant feedback time charged to every remote execution, seconds.
    pub feedback_time: f64,
}

impl SystemParams {
    pub fn new(feedback_time: f64) -> Result<Self, ModelError> {
        if !(feedback_time >= 0.0) {
            return Err(ModelError::InvalidScenario(format!(
                "feedback_time {feedback_time} must be non-negative"
            )));
        }
        Ok(Self { feedback_time })
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self { feedback_time: 0.0 }
    }
}

/// The execution environment: nodes, links, and system constants.
///
/// Validated on construction: node ids are unique, at least one local node
/// exists, links run from a local node to a remote node, and no remote node
/// has more than one inbound link (tasks carry no origin device, so a second
/// inbound link would make offload costs ambiguous).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    nodes: Vec<Node>,
    links: Vec<Link>,
    system: SystemParams,
}

impl Scenario {
    pub fn new(
        nodes: Vec<Node>,
        links: Vec<Link>,
        system: SystemParams,
    ) -> Result<Self, ModelError> {
        let mut ids = BTreeSet::new();
        for node in &nodes {
            node.validate()?;
            if !ids.insert(node.id.clone()) {
                return Err(ModelError::InvalidScenario(format!(
                    "duplicate node id {}",
                    node.id
                )));
            }
        }
        if !nodes.iter().any(|n| n.layer == Layer::Local) {
            return Err(ModelError::InvalidScenario(
                "scenario needs at least one local node".to_owned(),
            ));
        }
        let mut linked = BTreeSet::new();
        for link in &links {
            link.validate()?;
            let from = nodes.iter().find(|n| n.id == link.from_node).ok_or_else(|| {
                ModelError::InvalidScenario(format!("link from unknown node {}", link.from_node))
            })?;
            let to = nodes.iter().find(|n| n.id == link.to_node).ok_or_else(|| {
                ModelError::InvalidScenario(format!("link to unknown node {}", link.to_node))
            })?;
            if from.layer != Layer::Local {
                return Err(ModelError::InvalidScenario(format!(
                    "link must start at a local node, {} is {}",
                    from.id, from.layer
                )));
            }
            if to.layer == Layer::Local {
                return Err(ModelError::InvalidScenario(format!(
                    "link must end at a remote node, {} is local",
                    to.id
                )));
            }
            if !linked.insert(link.to_node.clone()) {
                return Err(ModelError::InvalidScenario(format!(
                    "ambiguous link: {} already has an inbound link",
                    link.to_node
                )));
            }
        }
        Ok(Self {
            nodes,
            links,
            system,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn system(&self) -> &SystemParams {
        &self.system
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    /// The unique link ending at `server`, if configured.
    pub fn link_to(&self, server: &NodeId) -> Option<&Link> {
        self.links.iter().find(|l| &l.to_node == server)
    }

    /// The first local node in declaration order; the device whose battery
    /// the model tracks.
    pub fn primary_local(&self) -> &Node {
        self.nodes
            .iter()
            .find(|n| n.layer == Layer::Local)
            .expect("validated: at least one local node")
    }

    pub fn first_of_layer(&self, layer: Layer) -> Option<&Node> {
        self.nodes.iter().find(|n| n.layer == layer)
    }

    pub fn nodes_of_layer(&self, layer: Layer) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.layer == layer)
    }

    pub fn has_capacities(&self) -> bool {
        self.nodes.iter().any(|n| n.capacity.is_some())
    }
}

/// The executor choice for one task.
///
/// Construction from a [`Node`] fixes the executor's layer, which is what
/// makes the indicator triple exclusive by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub task_id: TaskId,
    pub executor: NodeId,
    layer: Layer,
}

impl Assignment {
    pub fn new(task_id: TaskId, executor: &Node) -> Self {
        Self {
            task_id,
            executor: executor.id.clone(),
            layer: executor.layer,
        }
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    /// The derived indicator triple `(p_loc, p_edge, p_cloud)`; exactly one
    /// entry is 1.
    pub fn indicators(&self) -> (u8, u8, u8) {
        match self.layer {
            Layer::Local => (1, 0, 0),
            Layer::Edge => (0, 1, 0),
            Layer::Cloud => (0, 0, 1),
        }
    }
}

fn resolve_executor<'s>(
    assignment: &Assignment,
    scenario: &'s Scenario,
) -> Result<&'s Node, ModelError> {
    let node = scenario
        .node(&assignment.executor)
        .ok_or_else(|| ModelError::UnknownExecutor(assignment.executor.clone()))?;
    if node.layer != assignment.layer {
        return Err(ModelError::UnknownExecutor(assignment.executor.clone()));
    }
    Ok(node)
}

/// Delay, energy, and breakdown of running `task` on its assigned executor.
///
/// This is the single evaluation path behind [`combine_delay`],
/// [`combine_energy`], and [`Schedule::evaluate`], so all of them agree
/// bit-for-bit on identical inputs.
pub fn layer_costs(
    task: &Task,
    assignment: &Assignment,
    scenario: &Scenario,
) -> Result<LayerCosts, ModelError> {
    let node = resolve_executor(assignment, scenario)?;
    match node.layer {
        Layer::Local => Ok(cost::local_costs(task, node)?),
        Layer::Edge | Layer::Cloud => {
            let link = scenario
                .link_to(&node.id)
                .ok_or_else(|| ModelError::MissingLink(node.id.clone()))?;
            Ok(cost::remote_delay(task, link, node, scenario.system())?)
        }
    }
}

/// Task duration under the assignment's indicator weights, in seconds.
pub fn combine_delay(
    task: &Task,
    assignment: &Assignment,
    scenario: &Scenario,
) -> Result<f64, ModelError> {
    Ok(layer_costs(task, assignment, scenario)?.delay)
}

/// Device energy under the assignment's indicator weights, in joules.
pub fn combine_energy(
    task: &Task,
    assignment: &Assignment,
    scenario: &Scenario,
) -> Result<f64, ModelError> {
    Ok(layer_costs(task, assignment, scenario)?.energy)
}

/// Accuracy the task achieves on its assigned executor's layer.
pub fn achieved_accuracy(task: &Task, assignment: &Assignment) -> Result<f64, ModelError> {
    task.accuracy_at(assignment.layer)
}

/// Whether an assignment meets its task's deadline and accuracy floor.
pub fn satisfies_requirement(
    task: &Task,
    requirement: &Requirement,
    assignment: &Assignment,
    scenario: &Scenario,
) -> Result<bool, ModelError> {
    let delay = combine_delay(task, assignment, scenario)?;
    let accuracy = achieved_accuracy(task, assignment)?;
    Ok(delay <= requirement.deadline && accuracy >= requirement.accuracy_floor)
}

/// A complete executor choice for a task batch with its evaluated costs.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub assignments: Vec<Assignment>,
    /// Task durations in seconds, aligned with the task order.
    pub per_task_delay: Vec<f64>,
    /// Device energies in joules, aligned with the task order.
    pub per_task_energy: Vec<f64>,
    pub total_energy: f64,
    /// `total_energy / q`; the optimization objective. Zero for empty batches.
    pub mean_energy: f64,
    /// True when every task meets its deadline and accuracy floor.
    pub feasible: bool,
}

impl Schedule {
    /// Evaluate `assignments` against the cost model, in task order.
    ///
    /// Every schedule in this crate is built through here: delays and
    /// energies come from [`layer_costs`], the total is a left-to-right sum
    /// over tasks, and the mean divides by the task count once at the end.
    pub fn evaluate(
        tasks: &[Task],
        requirements: &[Requirement],
        assignments: Vec<Assignment>,
        scenario: &Scenario,
    ) -> Result<Self, ModelError> {
        if tasks.len() != requirements.len() {
            return Err(ModelError::InstanceMismatch(format!(
                "{} tasks but {} requirements",
                tasks.len(),
                requirements.len()
            )));
        }
        if tasks.len() != assignments.len() {
            return Err(ModelError::InstanceMismatch(format!(
                "{} tasks but {} assignments",
                tasks.len(),
                assignments.len()
            )));
        }
        let mut per_task_delay = Vec::with_capacity(tasks.len());
        let mut per_task_energy = Vec::with_capacity(tasks.len());
        let mut total_energy = 0.0;
        let mut feasible = true;
        for ((task, requirement), assignment) in
            tasks.iter().zip(requirements).zip(&assignments)
        {
            if task.id != assignment.task_id {
                return Err(ModelError::InstanceMismatch(format!(
                    "assignment for {} paired with task {}",
                    assignment.task_id, task.id
                )));
            }
            let costs = layer_costs(task, assignment, scenario)?;
            let accuracy = achieved_accuracy(task, assignment)?;
            if costs.delay > requirement.deadline || accuracy < requirement.accuracy_floor {
                feasible = false;
            }
            per_task_delay.push(costs.delay);
            per_task_energy.push(costs.energy);
            total_energy += costs.energy;
        }
        let mean_energy = if tasks.is_empty() {
            0.0
        } else {
            total_energy / tasks.len() as f64
        };
        Ok(Self {
            assignments,
            per_task_delay,
            per_task_energy,
            total_energy,
            mean_energy,
            feasible,
        })
    }

    /// Ids of tasks whose assignment violates the deadline or accuracy
    /// constraint, in task order.
    pub fn violations(
        &self,
        tasks: &[Task],
        requirements: &[Requirement],
    ) -> Result<Vec<TaskId>, ModelError> {
        let mut out = Vec::new();
        for (i, (task, requirement)) in tasks.iter().zip(requirements).enumerate() {
            let accuracy = achieved_accuracy(task, &self.assignments[i])?;
            if self.per_task_delay[i] > requirement.deadline
                || accuracy < requirement.accuracy_floor
            {
                out.push(task.id.clone());
            }
        }
        Ok(out)
    }

    /// Mean task duration in seconds; zero for empty batches.
    pub fn mean_delay(&self) -> f64 {
        if self.per_task_delay.is_empty() {
            0.0
        } else {
            self.per_task_delay.iter().sum::<f64>() / self.per_task_delay.len() as f64
        }
    }

    /// Fraction of tasks meeting both constraints; one for empty batches.
    pub fn feasible_fraction(
        &self,
        tasks: &[Task],
        requirements: &[Requirement],
    ) -> Result<f64, ModelError> {
        if tasks.is_empty() {
            return Ok(1.0);
        }
        let violations = self.violations(tasks, requirements)?.len();
        Ok((tasks.len() - violations) as f64 / tasks.len() as f64)
    }
}
