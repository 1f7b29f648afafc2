//! Seeded workload generation: same seed, same batch.
//!
//! ```bash
//! cargo run --example generate_workload
//! ```

use edgesched::workload::{generate_tasks, WorkloadSpec};
use edgesched::BITS_PER_MB;

fn main() {
    let spec = WorkloadSpec {
        count: 5,
        seed: 2024,
        cycles_range: (1.0e8, 1.0e10),
        size_range: (10.0 * BITS_PER_MB, 110.0 * BITS_PER_MB),
        deadline: 10.0,
        ..WorkloadSpec::default()
    };

    let batch = generate_tasks(&spec).unwrap();
    println!("{:<6} {:>16} {:>12} {:>12}", "task", "cycles", "size_mb", "deadline_s");
    for (task, req) in &batch {
        println!(
            "{:<6} {:>16.3e} {:>12.2} {:>12}",
            task.id,
            task.cycles,
            task.input_size / BITS_PER_MB,
            req.deadline
        );
    }

    let again = generate_tasks(&spec).unwrap();
    assert_eq!(batch, again);
    println!("\nsame seed reproduces the batch exactly");

    let other = generate_tasks(&WorkloadSpec { seed: 2025, ..spec }).unwrap();
    assert_ne!(batch, other);
    println!("a different seed gives a different batch");
}
