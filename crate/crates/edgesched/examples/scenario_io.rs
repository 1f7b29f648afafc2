//! Write the stock scenario as a JSON document, read it back, and run a
//! feasibility query against it.
//!
//! ```bash
//! cargo run --example scenario_io
//! ```

use edgesched::scenario::{parse_scenario, ScenarioFile};
use edgesched::scheduler::feasible_executors;
use edgesched::workload::default_scenario;
use edgesched::{Requirement, Task};

fn main() {
    let doc = ScenarioFile::from_scenario(&default_scenario());
    let json = serde_json::to_string_pretty(&doc).unwrap();
    println!("{json}\n");

    let loaded = parse_scenario(&json).unwrap();
    assert_eq!(loaded.scenario, default_scenario());
    println!("round-trip through the document form preserves the scenario");

    let task = Task::with_uniform_accuracy("probe", 1.0e9, 8.0e7, 0.0, 1.0).unwrap();
    for deadline in [0.4, 1.0, 10.0] {
        let req = Requirement::new(0.0, deadline).unwrap();
        let ids = feasible_executors(&task, &req, &loaded.scenario).unwrap();
        let names: Vec<&str> = ids.iter().map(|id| id.as_str()).collect();
        println!("deadline {deadline:>4} s -> feasible executors: {names:?}");
    }
}
