//! Sweep the task deadline from 1 s to 3.5 s and watch the proposed
//! policy's energy fall and then flatten as offloading becomes feasible.
//! Writes the row and summary CSVs next to the current directory.
//!
//! ```bash
//! cargo run --example sweep_deadline
//! ```

use edgesched::harness::{run_sweep, PolicyKind, SweepAxis, SweepConfig};
use edgesched::workload::WorkloadSpec;
use edgesched::BITS_PER_MB;

fn main() {
    let config = SweepConfig {
        axis: SweepAxis::Deadline((0..11).map(|i| 1.0 + 0.25 * i as f64).collect()),
        repetitions: 5,
        policies: PolicyKind::ALL.to_vec(),
        scenario_path: None,
        output_path: Some("deadline_sweep.csv".into()),
        base_seed: 42,
        workload: WorkloadSpec {
            count: 100,
            cycles_range: (1.0e8, 4.0e9),
            size_range: (0.1 * BITS_PER_MB, 2.0 * BITS_PER_MB),
            ..WorkloadSpec::default()
        },
    };

    let (outcome, rows_path, summary_path) = run_sweep(&config).unwrap();
    println!("rows:    {}", rows_path.display());
    println!("summary: {}\n", summary_path.display());

    println!("{:>10} {:>16} {:>10}", "deadline_s", "mean_energy_J", "feasible");
    for row in outcome.summary_for(PolicyKind::EdgeBasedMultiLayer) {
        println!(
            "{:>10} {:>16.4} {:>10.3}",
            row.axis_value, row.mean_energy_j, row.feasible_fraction
        );
    }
    println!("\nplot any column straight from the CSVs above");
}
