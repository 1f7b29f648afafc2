//! Cross-check branch and bound and the greedy fast path against the
//! brute-force oracle on small random instances.
//!
//! ```bash
//! cargo run --example optimal_vs_bruteforce
//! ```

use edgesched::scheduler::{solve_bnb, solve_bruteforce, solve_greedy};
use edgesched::workload::{default_scenario, generate_tasks, WorkloadSpec};

fn main() {
    let scenario = default_scenario();
    println!(
        "{:>5} {:>10} {:>16} {:>13} {:>13}",
        "q", "deadline", "objective_J", "bnb_nodes", "brute_nodes"
    );
    for seed in 0..8u64 {
        let q = 3 + (seed as usize % 6);
        let deadline = [0.5, 2.0, 8.0, 50.0][seed as usize % 4];
        let spec = WorkloadSpec {
            count: q,
            seed,
            deadline,
            ..WorkloadSpec::default()
        };
        let (tasks, reqs): (Vec<_>, Vec<_>) = generate_tasks(&spec).unwrap().into_iter().unzip();

        let brute = solve_bruteforce(&tasks, &reqs, &scenario).unwrap();
        let bnb = solve_bnb(&tasks, &reqs, &scenario).unwrap();
        let greedy = solve_greedy(&tasks, &reqs, &scenario).unwrap();

        assert_eq!(bnb.objective, brute.objective);
        assert_eq!(greedy.objective, brute.objective);
        println!(
            "{:>5} {:>10} {:>16.6} {:>13} {:>13}",
            q, deadline, bnb.objective, bnb.nodes_explored, brute.nodes_explored
        );
    }
    println!("\nall three solvers agree exactly on every instance");
}
