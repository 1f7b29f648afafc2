//! Compare the four offloading policies on one generated batch.
//!
//! ```bash
//! cargo run --example compare_policies
//! ```

use edgesched::harness::{compare_batch, PolicyKind};
use edgesched::workload::{default_scenario, generate_tasks, WorkloadSpec};
use edgesched::BITS_PER_MB;

fn main() {
    let scenario = default_scenario();
    let spec = WorkloadSpec {
        count: 100,
        seed: 42,
        cycles_range: (1.0e8, 1.0e10),
        size_range: (0.1 * BITS_PER_MB, 2.0 * BITS_PER_MB),
        deadline: 5.0,
        ..WorkloadSpec::default()
    };
    let (tasks, reqs): (Vec<_>, Vec<_>) = generate_tasks(&spec).unwrap().into_iter().unzip();

    let report = compare_batch(&tasks, &reqs, &scenario, &PolicyKind::ALL, spec.seed, false)
        .unwrap();
    print!("{report}");

    let proposed = report
        .rows
        .iter()
        .find(|r| r.label == "edge_multi_layer")
        .unwrap();
    let best_baseline = report
        .rows
        .iter()
        .filter(|r| r.label != "edge_multi_layer")
        .map(|r| r.mean_energy_j)
        .fold(f64::INFINITY, f64::min);
    println!(
        "\nproposed policy saves {:.1}% energy against the best baseline",
        100.0 * (1.0 - proposed.mean_energy_j / best_baseline)
    );
}
