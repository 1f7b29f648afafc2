//! Evaluate one task at each layer of the stock scenario and print the
//! delay/energy breakdown.
//!
//! ```bash
//! cargo run --example cost_breakdown
//! ```

use edgesched::model::{combine_delay, combine_energy, layer_costs, Assignment, TaskId};
use edgesched::workload::default_scenario;
use edgesched::Task;

fn main() {
    let scenario = default_scenario();
    // 1 gigacycle over 10 MB of input, the kind of job a recognition
    // pipeline ships around.
    let task = Task::with_uniform_accuracy("demo", 1.0e9, 8.0e7, 0.0, 1.0).unwrap();

    println!("task: {} cycles, {} bits uplink\n", task.cycles, task.input_size);
    println!(
        "{:<10} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "executor", "delay_s", "energy_J", "uplink_s", "exec_s", "feedback_s"
    );
    for node in scenario.nodes() {
        let assignment = Assignment::new(TaskId::new("demo"), node);
        let costs = layer_costs(&task, &assignment, &scenario).unwrap();
        println!(
            "{:<10} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            node.id,
            costs.delay,
            costs.energy,
            costs.breakdown.uplink_time,
            costs.breakdown.exec_time,
            costs.breakdown.feedback_time
        );
        // The indicator-weighted combination returns the same numbers.
        assert_eq!(combine_delay(&task, &assignment, &scenario).unwrap(), costs.delay);
        assert_eq!(combine_energy(&task, &assignment, &scenario).unwrap(), costs.energy);
    }

    println!("\nlocal execution is fastest to start but pays full CPU power;");
    println!("offloading trades a long uplink for cheap idle waiting.");
}
