//! JSON scenario files: nodes, links, optional fixed tasks with their
//! requirements, system constants, and an optional workload section.
//!
//! Units follow the domain types (Hz, W, bits, seconds). Fields quoted in
//! megabytes carry an explicit `_mb` suffix and convert at 1 MB = 8e6 bits;
//! a field may be given in bits or MB but not both. Unknown keys are
//! rejected so typos fail loudly.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Layer, Link, LocalPower, ModelError, Node, Requirement, Scenario, SystemParams, Task,
    BITS_PER_MB,
};
use crate::workload::{Distribution, WorkloadSpec};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("cannot parse {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid scenario file: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A parsed scenario file: the validated environment, any embedded fixed
/// tasks paired with their requirements, and any workload section.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub tasks: Vec<(Task, Requirement)>,
    pub workload: Option<WorkloadSpecFile>,
}

/// On-disk document shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub nodes: Vec<NodeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<LinkSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<TaskSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub requirements: Vec<RequirementSpec>,
    #[serde(default)]
    pub system_params: SystemParamsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workload: Option<WorkloadSpecFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: String,
    pub layer: Layer,
    pub frequency_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PowerSpec {
    Measured { measured_w: f64 },
    Analytic { kappa: f64, gamma: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub from_node: String,
    pub to_node: String,
    pub bandwidth_hz: f64,
    pub gain: f64,
    pub noise_w: f64,
    pub tx_power_w: f64,
    pub idle_power_w: f64,
    #[serde(default)]
    pub extra_rtt_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub id: String,
    pub cycles: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_size_bits: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_size_mb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_size_bits: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_size_mb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_by_layer: Option<BTreeMap<Layer, f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementSpec {
    #[serde(default)]
    pub accuracy_floor: f64,
    pub deadline_s: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParamsSpec {
    #[serde(default)]
    pub feedback_time_s: f64,
}

/// Workload overrides; anything omitted falls back to the crate defaults
/// (100 tasks, 0.1–10 gigacycles, 10–110 MB, 100 s deadline).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles_range_gigacycles: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_range_bits: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_range_mb: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_size_bits: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_size_mb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_by_layer: Option<BTreeMap<Layer, f64>>,
}

impl WorkloadSpecFile {
    /// Apply the overrides on top of [`WorkloadSpec::default`] with the
    /// given seed.
    pub fn resolve(&self, seed: u64) -> Result<WorkloadSpec, ScenarioError> {
        let mut spec = WorkloadSpec {
            seed,
            ..WorkloadSpec::default()
        };
        if let Some(count) = self.count {
            spec.count = count;
        }
        if let Some(range) = pick_range(
            "cycles_range",
            self.cycles_range,
            "cycles_range_gigacycles",
            self.cycles_range_gigacycles,
            1.0e9,
        )? {
            spec.cycles_range = range;
        }
        if let Some(range) = pick_range(
            "size_range_bits",
            self.size_range_bits,
            "size_range_mb",
            self.size_range_mb,
            BITS_PER_MB,
        )? {
            spec.size_range = range;
        }
        if let Some(v) = pick_scalar(
            "output_size_bits",
            self.output_size_bits,
            "output_size_mb",
            self.output_size_mb,
            BITS_PER_MB,
        )? {
            spec.output_size = v;
        }
        if let Some(d) = self.deadline_s {
            spec.deadline = d;
        }
        if let Some(a) = self.accuracy_floor {
            spec.accuracy_floor = a;
        }
        if let Some(dist) = &self.distribution {
            spec.distribution = match dist.as_str() {
                "uniform" => Distribution::Uniform,
                other => {
                    return Err(ScenarioError::Schema(format!(
                        "unknown distribution {other:?}, expected \"uniform\""
                    )))
                }
            };
        }
        spec.accuracy_by_layer = self.accuracy_by_layer.clone();
        spec.validate()?;
        Ok(spec)
    }
}

fn pick_scalar(
    base_key: &str,
    base: Option<f64>,
    mb_key: &str,
    mb: Option<f64>,
    factor: f64,
) -> Result<Option<f64>, ScenarioError> {
    match (base, mb) {
        (Some(_), Some(_)) => Err(ScenarioError::Schema(format!(
            "give {base_key} or {mb_key}, not both"
        ))),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(v)) => Ok(Some(v * factor)),
        (None, None) => Ok(None),
    }
}

fn pick_range(
    base_key: &str,
    base: Option<[f64; 2]>,
    alt_key: &str,
    alt: Option<[f64; 2]>,
    factor: f64,
) -> Result<Option<(f64, f64)>, ScenarioError> {
    match (base, alt) {
        (Some(_), Some(_)) => Err(ScenarioError::Schema(format!(
            "give {base_key} or {alt_key}, not both"
        ))),
        (Some([lo, hi]), None) => Ok(Some((lo, hi))),
        (None, Some([lo, hi])) => Ok(Some((lo * factor, hi * factor))),
        (None, None) => Ok(None),
    }
}

impl ScenarioFile {
    pub fn into_loaded(self) -> Result<LoadedScenario, ScenarioError> {
        let nodes = self
            .nodes
            .into_iter()
            .map(|spec| {
                let power = spec.power.map(|p| match p {
                    PowerSpec::Measured { measured_w } => LocalPower::Measured { power: measured_w },
                    PowerSpec::Analytic { kappa, gamma } => LocalPower::Analytic { kappa, gamma },
                });
                let node = Node {
                    id: spec.id.into(),
                    layer: spec.layer,
                    frequency: spec.frequency_hz,
                    local_power: power,
                    capacity: spec.capacity,
                };
                node.validate().map(|()| node)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let links = self
            .links
            .into_iter()
            .map(|spec| {
                let link = Link {
                    from_node: spec.from_node.into(),
                    to_node: spec.to_node.into(),
                    bandwidth: spec.bandwidth_hz,
                    gain: spec.gain,
                    noise: spec.noise_w,
                    tx_power: spec.tx_power_w,
                    idle_power: spec.idle_power_w,
                    extra_rtt: spec.extra_rtt_s,
                };
                link.validate().map(|()| link)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let system = SystemParams::new(self.system_params.feedback_time_s)?;
        let scenario = Scenario::new(nodes, links, system)?;

        if !self.tasks.is_empty() && self.tasks.len() != self.requirements.len() {
            return Err(ScenarioError::Schema(format!(
                "{} tasks but {} requirements",
                self.tasks.len(),
                self.requirements.len()
            )));
        }
        let tasks = self
            .tasks
            .into_iter()
            .zip(self.requirements)
            .map(|(t, r)| {
                let input = pick_scalar(
                    "input_size_bits",
                    t.input_size_bits,
                    "input_size_mb",
                    t.input_size_mb,
                    BITS_PER_MB,
                )?
                .ok_or_else(|| {
                    ScenarioError::Schema(format!(
                        "task {}: input_size_bits or input_size_mb required",
                        t.id
                    ))
                })?;
                let output = pick_scalar(
                    "output_size_bits",
                    t.output_size_bits,
                    "output_size_mb",
                    t.output_size_mb,
                    BITS_PER_MB,
                )?
                .unwrap_or(0.0);
                let accuracy = t
                    .accuracy_by_layer
                    .unwrap_or_else(|| Layer::ALL.iter().map(|&l| (l, 1.0)).collect());
                let task = Task::new(t.id, t.cycles, input, output, accuracy)?;
                let requirement = Requirement::new(r.accuracy_floor, r.deadline_s)?;
                Ok((task, requirement))
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        Ok(LoadedScenario {
            scenario,
            tasks,
            workload: self.workload,
        })
    }

    /// Document form of an in-memory scenario, for writing files.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let nodes = scenario
            .nodes()
            .iter()
            .map(|n| NodeSpec {
                id: n.id.as_str().to_owned(),
                layer: n.layer,
                frequency_hz: n.frequency,
                power: n.local_power.map(|p| match p {
                    LocalPower::Measured { power } => PowerSpec::Measured { measured_w: power },
                    LocalPower::Analytic { kappa, gamma } => PowerSpec::Analytic { kappa, gamma },
                }),
                capacity: n.capacity,
            })
            .collect();
        let links = scenario
            .links()
            .iter()
            .map(|l| LinkSpec {
                from_node: l.from_node.as_str().to_owned(),
                to_node: l.to_node.as_str().to_owned(),
                bandwidth_hz: l.bandwidth,
                gain: l.gain,
                noise_w: l.noise,
                tx_power_w: l.tx_power,
                idle_power_w: l.idle_power,
                extra_rtt_s: l.extra_rtt,
            })
            .collect();
        Self {
            nodes,
            links,
            tasks: vec![],
            requirements: vec![],
            system_params: SystemParamsSpec {
                feedback_time_s: scenario.system().feedback_time,
            },
            workload: None,
        }
    }
}

/// Parse a scenario document from JSON text.
pub fn parse_scenario(text: &str) -> Result<LoadedScenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|source| ScenarioError::Json {
        path: "<inline>".to_owned(),
        source,
    })?;
    file.into_loaded()
}

/// Load and validate a scenario document from disk.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let file: ScenarioFile = serde_json::from_str(&text).map_err(|source| ScenarioError::Json {
        path: path.display().to_string(),
        source,
    })?;
    file.into_loaded()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeId;
    use crate::workload::default_scenario;

    const STOCK: &str = r#"{
        "system_params": { "feedback_time_s": 0.0 },
        "nodes": [
            { "id": "device0", "layer": "local", "frequency_hz": 2e9,
              "power": { "measured_w": 0.9 } },
            { "id": "edge0", "layer": "edge", "frequency_hz": 1e10 },
            { "id": "cloud0", "layer": "cloud", "frequency_hz": 1.5e10 }
        ],
        "links": [
            { "from_node": "device0", "to_node": "edge0", "bandwidth_hz": 1e6,
              "gain": 1e-5, "noise_w": 1e-9, "tx_power_w": 1.3, "idle_power_w": 0.3 },
            { "from_node": "device0", "to_node": "cloud0", "bandwidth_hz": 1e6,
              "gain": 1e-5, "noise_w": 1e-9, "tx_power_w": 1.3, "idle_power_w": 0.3 }
        ]
    }"#;

    #[test]
    fn stock_document_matches_default_scenario() {
        let loaded = parse_scenario(STOCK).unwrap();
        assert_eq!(loaded.scenario, default_scenario());
        assert!(loaded.tasks.is_empty());
    }

    #[test]
    fn round_trip_through_document_form() {
        let doc = ScenarioFile::from_scenario(&default_scenario());
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let loaded = parse_scenario(&json).unwrap();
        assert_eq!(loaded.scenario, default_scenario());
    }

    #[test]
    fn mb_suffixed_task_fields_convert() {
        let text = r#"{
            "nodes": [
                { "id": "d", "layer": "local", "frequency_hz": 2e9,
                  "power": { "measured_w": 0.9 } }
            ],
            "tasks": [
                { "id": "t0", "cycles": 1e9, "input_size_mb": 10.0 },
                { "id": "t1", "cycles": 1e9, "input_size_bits": 8e7,
                  "accuracy_by_layer": { "local": 0.7, "edge": 0.8, "cloud": 0.9 } }
            ],
            "requirements": [
                { "deadline_s": 2.0 },
                { "accuracy_floor": 0.8, "deadline_s": 3.0 }
            ]
        }"#;
        let loaded = parse_scenario(text).unwrap();
        assert_eq!(loaded.tasks.len(), 2);
        assert_eq!(loaded.tasks[0].0.input_size, 10.0 * BITS_PER_MB);
        assert_eq!(loaded.tasks[0].1.deadline, 2.0);
        assert_eq!(loaded.tasks[1].0.input_size, 8.0e7);
        assert_eq!(loaded.tasks[1].0.accuracy_by_layer[&Layer::Edge], 0.8);
        assert_eq!(loaded.tasks[1].1.accuracy_floor, 0.8);
    }

    #[test]
    fn both_unit_spellings_rejected() {
        let text = r#"{
            "nodes": [
                { "id": "d", "layer": "local", "frequency_hz": 2e9,
                  "power": { "measured_w": 0.9 } }
            ],
            "tasks": [
                { "id": "t0", "cycles": 1e9, "input_size_mb": 10.0, "input_size_bits": 8e7 }
            ],
            "requirements": [ { "deadline_s": 2.0 } ]
        }"#;
        assert!(matches!(
            parse_scenario(text),
            Err(ScenarioError::Schema(_))
        ));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{
            "nodes": [
                { "id": "d", "layer": "local", "frequency_hz": 2e9,
                  "power": { "measured_w": 0.9 }, "frequenzy": 1 }
            ]
        }"#;
        assert!(matches!(parse_scenario(text), Err(ScenarioError::Json { .. })));
    }

    #[test]
    fn analytic_power_spec_parses() {
        let text = r#"{
            "nodes": [
                { "id": "d", "layer": "local", "frequency_hz": 2e9,
                  "power": { "kappa": 1e-26, "gamma": 3.0 } }
            ]
        }"#;
        let loaded = parse_scenario(text).unwrap();
        let device = loaded.scenario.node(&NodeId::new("d")).unwrap();
        assert_eq!(
            device.local_power,
            Some(LocalPower::Analytic {
                kappa: 1.0e-26,
                gamma: 3.0
            })
        );
    }

    #[test]
    fn workload_section_resolves_with_defaults() {
        let text = r#"{
            "nodes": [
                { "id": "d", "layer": "local", "frequency_hz": 2e9,
                  "power": { "measured_w": 0.9 } }
            ],
            "workload": {
                "count": 7,
                "cycles_range_gigacycles": [0.1, 10.0],
                "size_range_mb": [10.0, 110.0],
                "deadline_s": 5.0
            }
        }"#;
        let loaded = parse_scenario(text).unwrap();
        let spec = loaded.workload.unwrap().resolve(42).unwrap();
        assert_eq!(spec.count, 7);
        assert_eq!(spec.cycles_range, (1.0e8, 1.0e10));
        assert_eq!(spec.size_range, (10.0 * BITS_PER_MB, 110.0 * BITS_PER_MB));
        assert_eq!(spec.deadline, 5.0);
        assert_eq!(spec.seed, 42);
    }

    #[test]
    fn mismatched_requirements_rejected() {
        let text = r#"{
            "nodes": [
                { "id": "d", "layer": "local", "frequency_hz": 2e9,
                  "power": { "measured_w": 0.9 } }
            ],
            "tasks": [ { "id": "t0", "cycles": 1e9, "input_size_bits": 1.0 } ]
        }"#;
        assert!(matches!(parse_scenario(text), Err(ScenarioError::Schema(_))));
    }
}
