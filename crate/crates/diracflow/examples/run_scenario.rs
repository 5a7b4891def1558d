//! Run a shipped scenario through the orchestration layer, the same path
//! the `diracflow run` subcommand takes, and print its invariant
//! checklist and artifact manifest.

use diracflow::run::{run_scenario, shipped_scenario};

fn main() {
    let scenario = shipped_scenario("causal_mixing").expect("shipped scenario");
    let out = std::env::temp_dir().join("diracflow_example_run");
    let report = run_scenario(&scenario, &out).expect("run");

    println!("scenario: {} ({})", scenario.name, scenario.run.kind_name());
    for check in &report.invariants {
        let mark = if check.passed { "pass" } else { "FAIL" };
        println!("[{mark}] {:<55} {:.3e} <= {:.0e}", check.name, check.value, check.threshold);
    }
    println!("artifacts in {}:", out.display());
    for artifact in &report.artifacts {
        println!("  {}  sha256:{}...", artifact.file, &artifact.sha256[..16]);
    }
    println!("overall: {}", if report.passed { "passed" } else { "failed" });
}
