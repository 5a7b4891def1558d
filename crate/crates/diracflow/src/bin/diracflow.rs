use clap::{Parser, Subcommand};
use diracflow::run::{artifact_dir, run_scenario_with_threads, SHIPPED_SCENARIOS};
use diracflow::scenario::{Preset, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "diracflow", about = "Scenario-driven trajectory simulations", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario file and write its artifacts and report
    Run {
        file: PathBuf,
        /// artifact directory (default: out/<scenario name>)
        #[arg(long)]
        out: Option<PathBuf>,
        /// worker threads for ensemble runs (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
        /// override the scenario's seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a scenario file without executing it
    Validate { file: PathBuf },
    /// Initial-state presets and shipped scenarios
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Subcommand)]
enum PresetsAction {
    /// List initial-state presets and shipped scenario files
    List,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> diracflow::error::Result<ExitCode> {
    match cli.command {
        Command::Run { file, out, threads, seed } => {
            let mut scenario = Scenario::load(&file)?;
            if let Some(seed) = seed {
                scenario.seed = Some(seed);
            }
            let diagnostics = scenario.validate();
            if !diagnostics.is_empty() {
                for d in &diagnostics {
                    eprintln!("invalid: {d}");
                }
                return Ok(ExitCode::FAILURE);
            }
            let out_dir = out.unwrap_or_else(|| artifact_dir(&PathBuf::from("out"), &scenario));
            let report = run_scenario_with_threads(&scenario, &out_dir, threads)?;
            for check in &report.invariants {
                let mark = if check.passed { "pass" } else { "FAIL" };
                println!(
                    "[{mark}] {} (value {:e}, threshold {:e})",
                    check.name, check.value, check.threshold
                );
                if let Some(note) = &check.note {
                    println!("       {note}");
                }
            }
            println!(
                "report: {} ({} artifacts, {:.0} ms)",
                out_dir.join("report.json").display(),
                report.artifacts.len(),
                report.elapsed_ms
            );
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Validate { file } => {
            let text = std::fs::read_to_string(&file)?;
            match Scenario::from_json(&text) {
                Err(e) => {
                    println!("schema: {e}");
                    Ok(ExitCode::FAILURE)
                }
                Ok(scenario) => {
                    let diagnostics = scenario.validate();
                    if diagnostics.is_empty() {
                        println!("ok");
                        Ok(ExitCode::SUCCESS)
                    } else {
                        for d in &diagnostics {
                            println!("{d}");
                        }
                        Ok(ExitCode::FAILURE)
                    }
                }
            }
        }
        Command::Presets { action: PresetsAction::List } => {
            println!("initial-state presets:");
            for preset in Preset::ALL {
                println!("  {:<20} {}", preset.name(), preset.description());
            }
            println!("\nshipped scenarios (crates/diracflow/scenarios/):");
            for (name, text) in SHIPPED_SCENARIOS {
                let kind = Scenario::from_json(text)
                    .map(|s| s.run.kind_name())
                    .unwrap_or("unparseable");
                println!("  {name:<24} {kind}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
