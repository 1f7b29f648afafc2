//! Node capacities couple the per-task choices: once the cheapest server
//! fills up, branch and bound must spill tasks to the next-best executor.
//!
//! ```bash
//! cargo run --example capacity_limits
//! ```

use edgesched::scheduler::solve_bnb;
use edgesched::workload::default_scenario;
use edgesched::{Requirement, Scenario, SystemParams, Task};

fn main() {
    let base = default_scenario();

    // Four identical tasks that are cheapest on the cloud (small upload,
    // heavy compute), with the cloud limited to two concurrent tasks.
    let mut nodes = base.nodes().to_vec();
    let cloud_idx = nodes.iter().position(|n| n.id.as_str() == "cloud0").unwrap();
    nodes[cloud_idx] = nodes[cloud_idx].clone().with_capacity(2);
    let capped = Scenario::new(nodes, base.links().to_vec(), SystemParams::default()).unwrap();

    let tasks: Vec<Task> = (0..4)
        .map(|i| Task::with_uniform_accuracy(format!("t{i}"), 5.0e9, 4.0e6, 0.0, 1.0).unwrap())
        .collect();
    let reqs = vec![Requirement::new(0.0, 60.0).unwrap(); 4];

    let unconstrained = solve_bnb(&tasks, &reqs, &base).unwrap();
    let constrained = solve_bnb(&tasks, &reqs, &capped).unwrap();

    println!("placements without capacity:");
    for a in &unconstrained.schedule.assignments {
        println!("  {} -> {}", a.task_id, a.executor);
    }
    println!("placements with cloud capacity 2:");
    for a in &constrained.schedule.assignments {
        println!("  {} -> {}", a.task_id, a.executor);
    }
    println!(
        "\nmean energy: {:.4} J unconstrained, {:.4} J with the cap \
         ({} search nodes vs {})",
        unconstrained.objective,
        constrained.objective,
        unconstrained.nodes_explored,
        constrained.nodes_explored
    );
    assert!(constrained.objective >= unconstrained.objective);
}
