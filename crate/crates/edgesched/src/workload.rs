//! Seeded task-batch generation and stock scenarios.
//!
//! Batches are drawn i.i.d. uniform from configured ranges with an explicit
//! seed, so a `(spec, seed)` pair always reproduces the same tasks. The
//! stock scenario is one device (2 GHz, 0.9 W execution power), one edge
//! server (10 GHz) and one cloud server (15 GHz) behind identical 1 MHz
//! links with gain 1e-5, noise 1e-9 W, 1.3 W transmit and 0.3 W idle power.

use std::collections::BTreeMap;

use rand::distributions::{Distribution as _, Uniform};
use rand::SeedableRng;
use rand_pcg::Pcg64;

use crate::model::{
    Layer, Link, LocalPower, ModelError, Node, Requirement, Scenario, SystemParams, Task, TaskId,
    BITS_PER_MB,
};

/// Sampling distribution for generated task parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
}

/// Parameters for one generated task batch.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    /// Number of tasks in the batch.
    pub count: usize,
    /// Closed range of CPU cycles per task.
    pub cycles_range: (f64, f64),
    /// Closed range of input sizes per task, in bits.
    pub size_range: (f64, f64),
    /// Output size shared by all tasks, in bits.
    pub output_size: f64,
    /// Deadline shared by all tasks, in seconds.
    pub deadline: f64,
    /// Accuracy floor shared by all tasks.
    pub accuracy_floor: f64,
    pub distribution: Distribution,
    pub seed: u64,
    /// Per-layer accuracy for generated tasks; `None` gives every layer 1.0,
    /// which keeps the accuracy constraint vacuous.
    pub accuracy_by_layer: Option<BTreeMap<Layer, f64>>,
}

impl Default for WorkloadSpec {
    /// 100 tasks, 0.1–10 gigacycles, 10–110 MB, a loose 100 s deadline, no
    /// accuracy demands, seed 0.
    fn default() -> Self {
        Self {
            count: 100,
            cycles_range: (1.0e8, 1.0e10),
            size_range: (10.0 * BITS_PER_MB, 110.0 * BITS_PER_MB),
            output_size: 0.0,
            deadline: 100.0,
            accuracy_floor: 0.0,
            distribution: Distribution::Uniform,
            seed: 0,
            accuracy_by_layer: None,
        }
    }
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |reason: String| ModelError::InvalidScenario(format!("workload: {reason}"));
        if self.count < 1 {
            return Err(fail("count must be at least 1".to_owned()));
        }
        for (name, (lo, hi)) in [
            ("cycles_range", self.cycles_range),
            ("size_range", self.size_range),
        ] {
            if !(lo >= 0.0 && hi >= lo) {
                return Err(fail(format!("{name} [{lo}, {hi}] must satisfy 0 <= min <= max")));
            }
        }
        if !(self.output_size >= 0.0) {
            return Err(fail("output_size must be non-negative".to_owned()));
        }
        if !(self.deadline > 0.0) {
            return Err(fail("deadline must be positive".to_owned()));
        }
        if !(0.0..=1.0).contains(&self.accuracy_floor) {
            return Err(fail("accuracy_floor must lie in [0, 1]".to_owned()));
        }
        if let Some(map) = &self.accuracy_by_layer {
            for (layer, acc) in map {
                if !(0.0..=1.0).contains(acc) {
                    return Err(fail(format!("accuracy at {layer} must lie in [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

/// Draw a task batch from `spec`; reproducible for a fixed seed.
///
/// Tasks are named `t0`, `t1`, ... in draw order; cycles are drawn before
/// size for each task.
pub fn generate_tasks(spec: &WorkloadSpec) -> Result<Vec<(Task, Requirement)>, ModelError> {
    spec.validate()?;
    let mut rng = Pcg64::seed_from_u64(spec.seed);
    let Distribution::Uniform = spec.distribution;
    let cycles_dist = Uniform::new_inclusive(spec.cycles_range.0, spec.cycles_range.1);
    let size_dist = Uniform::new_inclusive(spec.size_range.0, spec.size_range.1);
    let accuracy = spec
        .accuracy_by_layer
        .clone()
        .unwrap_or_else(|| Layer::ALL.iter().map(|&l| (l, 1.0)).collect());
    let requirement = Requirement::new(spec.accuracy_floor, spec.deadline)?;
    let mut out = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let cycles = cycles_dist.sample(&mut rng);
        let size = size_dist.sample(&mut rng);
        let task = Task::new(
            TaskId::new(format!("t{i}")),
            cycles,
            size,
            spec.output_size,
            accuracy.clone(),
        )?;
        out.push((task, requirement));
    }
    Ok(out)
}

/// The stock three-node scenario with measured device power.
pub fn default_scenario() -> Scenario {
    build_default(LocalPower::Measured { power: 0.9 })
}

/// The stock scenario with the analytic CPU power model (kappa 1e-26,
/// gamma 3) on the device instead of the measured 0.9 W.
pub fn default_scenario_analytic() -> Scenario {
    build_default(LocalPower::Analytic {
        kappa: 1.0e-26,
        gamma: 3.0,
    })
}

fn build_default(power: LocalPower) -> Scenario {
    let nodes = vec![
        Node::local("device0", 2.0e9, power).expect("valid node"),
        Node::remote("edge0", Layer::Edge, 1.0e10).expect("valid node"),
        Node::remote("cloud0", Layer::Cloud, 1.5e10).expect("valid node"),
    ];
    let links = vec![
        Link::new("device0", "edge0", 1.0e6, 1.0e-5, 1.0e-9, 1.3, 0.3).expect("valid link"),
        Link::new("device0", "cloud0", 1.0e6, 1.0e-5, 1.0e-9, 1.3, 0.3).expect("valid link"),
    ];
    Scenario::new(nodes, links, SystemParams::default()).expect("valid scenario")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::uplink_rate;
    use crate::model::NodeId;

    const RATE_REF: f64 = 13_666_334.975076675;

    #[test]
    fn default_scenario_shape() {
        let s = default_scenario();
        assert_eq!(s.nodes().len(), 3);
        assert_eq!(s.nodes_of_layer(Layer::Local).count(), 1);
        assert_eq!(s.nodes_of_layer(Layer::Edge).count(), 1);
        assert_eq!(s.nodes_of_layer(Layer::Cloud).count(), 1);
        for link in s.links() {
            let rel = (uplink_rate(link) - RATE_REF).abs() / RATE_REF;
            assert!(rel < 1e-12);
        }
    }

    #[test]
    fn analytic_variant_uses_model_parameters() {
        let s = default_scenario_analytic();
        let device = s.node(&NodeId::new("device0")).unwrap();
        assert_eq!(
            device.local_power,
            Some(LocalPower::Analytic {
                kappa: 1.0e-26,
                gamma: 3.0
            })
        );
    }

    #[test]
    fn same_seed_reproduces_batch() {
        let spec = WorkloadSpec {
            count: 50,
            seed: 7,
            ..WorkloadSpec::default()
        };
        let a = generate_tasks(&spec).unwrap();
        let b = generate_tasks(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let base = WorkloadSpec {
            count: 1000,
            ..WorkloadSpec::default()
        };
        let other = WorkloadSpec { seed: 1, ..base.clone() };
        let a = generate_tasks(&base).unwrap();
        let b = generate_tasks(&other).unwrap();
        assert!(a.iter().zip(&b).any(|((ta, _), (tb, _))| ta.cycles != tb.cycles));
    }

    #[test]
    fn degenerate_range_is_constant() {
        let spec = WorkloadSpec {
            count: 20,
            cycles_range: (3.0e9, 3.0e9),
            ..WorkloadSpec::default()
        };
        for (task, _) in generate_tasks(&spec).unwrap() {
            assert_eq!(task.cycles, 3.0e9);
        }
    }

    #[test]
    fn values_stay_inside_ranges() {
        let spec = WorkloadSpec {
            count: 2000,
            cycles_range: (2.0e8, 9.0e9),
            size_range: (1.0e6, 5.0e8),
            seed: 41,
            ..WorkloadSpec::default()
        };
        for (task, req) in generate_tasks(&spec).unwrap() {
            assert!(task.cycles >= 2.0e8 && task.cycles <= 9.0e9);
            assert!(task.input_size >= 1.0e6 && task.input_size <= 5.0e8);
            assert_eq!(req.deadline, spec.deadline);
        }
    }

    #[test]
    fn sample_mean_near_range_midpoint() {
        let spec = WorkloadSpec {
            count: 100_000,
            cycles_range: (1.0e8, 1.0e10),
            seed: 11,
            ..WorkloadSpec::default()
        };
        let tasks = generate_tasks(&spec).unwrap();
        let mean = tasks.iter().map(|(t, _)| t.cycles).sum::<f64>() / tasks.len() as f64;
        let midpoint = (1.0e8 + 1.0e10) / 2.0;
        assert!((mean - midpoint).abs() / midpoint < 0.01, "mean {mean}");
    }

    #[test]
    fn invalid_specs_rejected() {
        let no_tasks = WorkloadSpec {
            count: 0,
            ..WorkloadSpec::default()
        };
        assert!(generate_tasks(&no_tasks).is_err());
        let inverted = WorkloadSpec {
            cycles_range: (2.0, 1.0),
            ..WorkloadSpec::default()
        };
        assert!(generate_tasks(&inverted).is_err());
    }
}
