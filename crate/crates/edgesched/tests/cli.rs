//! End-to-end tests of the `edgesched` binary: subcommands, exit codes,
//! and output reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn edgesched(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgesched"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn compare_defaults_print_all_policies() {
    let dir = tempfile::tempdir().unwrap();
    let out = edgesched(&["compare", "-q", "12", "--seed", "42"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    for policy in ["local_only", "cloud_only", "random", "edge_multi_layer"] {
        assert!(text.contains(policy), "missing {policy} in:\n{text}");
    }
}

#[test]
fn compare_verify_appends_oracle_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = edgesched(
        &["compare", "-q", "6", "--seed", "7", "--verify"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("bruteforce_oracle"), "{text}");
    // The oracle row must agree with the proposed policy's energy column.
    let energy = |label: &str| -> f64 {
        let line = text.lines().find(|l| l.contains(label)).unwrap();
        line.split_whitespace().nth(2).unwrap().parse().unwrap()
    };
    assert_eq!(energy("edge_multi_layer"), energy("bruteforce_oracle"));
}

#[test]
fn compare_respects_policy_subset() {
    let dir = tempfile::tempdir().unwrap();
    let out = edgesched(
        &["compare", "-q", "5", "--policies", "local_only,cloud_only"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("local_only"));
    assert!(!text.contains("edge_multi_layer"));
}

#[test]
fn compare_uses_embedded_tasks() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = r#"{
        "nodes": [
            { "id": "device0", "layer": "local", "frequency_hz": 2e9,
              "power": { "measured_w": 0.9 } },
            { "id": "cloud0", "layer": "cloud", "frequency_hz": 1.5e10 }
        ],
        "links": [
            { "from_node": "device0", "to_node": "cloud0", "bandwidth_hz": 1e6,
              "gain": 1e-5, "noise_w": 1e-9, "tx_power_w": 1.3, "idle_power_w": 0.3 }
        ],
        "tasks": [
            { "id": "t0", "cycles": 0.0, "input_size_bits": 0.0 }
        ],
        "requirements": [ { "deadline_s": 1.0 } ]
    }"#;
    let path = dir.path().join("scenario.json");
    fs::write(&path, scenario).unwrap();
    let out = edgesched(
        &[
            "compare",
            "--scenario",
            "scenario.json",
            "--policies",
            "local_only,cloud_only",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("q=1"), "{text}");
    // A zero task costs nothing anywhere.
    for line in text.lines().filter(|l| l.contains("_only")) {
        let energy: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
        assert_eq!(energy, 0.0);
    }
}

#[test]
fn sweep_writes_byte_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "axis": { "kind": "deadline_s", "values": [1.0, 2.0, 3.0] },
        "repetitions": 2,
        "base_seed": 11,
        "workload": { "count": 15, "cycles_range_gigacycles": [0.1, 4.0],
                      "size_range_mb": [0.1, 2.0] }
    }"#;
    fs::write(dir.path().join("sweep.json"), config).unwrap();
    for run in ["a", "b"] {
        let out = edgesched(
            &[
                "sweep",
                "--config",
                "sweep.json",
                "--out",
                &format!("{run}.csv"),
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{out:?}");
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let sa = fs::read(dir.path().join("a.summary.csv")).unwrap();
    let sb = fs::read(dir.path().join("b.summary.csv")).unwrap();
    assert_eq!(sa, sb);

    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "axis_value,repetition,policy,mean_delay_s,mean_energy_J,feasible_fraction,solver_nodes\n"
    ));
    // 3 axis values x 2 repetitions x 4 policies + header.
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 4);
}

#[test]
fn sweep_worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "axis": { "kind": "task_count", "values": [5, 10, 15] },
        "repetitions": 2,
        "base_seed": 3,
        "workload": { "cycles_range_gigacycles": [0.1, 4.0], "size_range_mb": [0.1, 2.0] }
    }"#;
    fs::write(dir.path().join("sweep.json"), config).unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = Command::new(env!("CARGO_BIN_EXE_edgesched"))
            .args(["sweep", "--config", "sweep.json", "--out", "w.csv"])
            .env("EDGESCHED_WORKERS", workers)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        outputs.push(fs::read(dir.path().join("w.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn exit_code_1_on_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown policy token.
    let out = edgesched(&["compare", "--policies", "warp_drive"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    // Non-increasing axis.
    fs::write(
        dir.path().join("bad.json"),
        r#"{ "axis": { "kind": "deadline_s", "values": [2.0, 1.0] } }"#,
    )
    .unwrap();
    let out = edgesched(
        &["sweep", "--config", "bad.json", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    // Unknown CLI flag.
    let out = edgesched(&["compare", "--frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_code_2_when_nothing_is_feasible() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = r#"{
        "nodes": [
            { "id": "device0", "layer": "local", "frequency_hz": 2e9,
              "power": { "measured_w": 0.9 } }
        ],
        "workload": { "count": 5, "deadline_s": 0.001 }
    }"#;
    fs::write(dir.path().join("tight.json"), scenario).unwrap();
    let out = edgesched(
        &[
            "compare",
            "--scenario",
            "tight.json",
            "--policies",
            "local_only",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn exit_code_3_on_unreadable_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = edgesched(&["compare", "--scenario", "nope.json"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}
