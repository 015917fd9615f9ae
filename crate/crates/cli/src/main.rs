use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use posture_core::batch::run_batch_with_jobs;
use posture_core::config::{load_scenario, preset, preset_source, PRESETS};
use posture_core::output::{emit_csv, emit_metrics, emit_plot};
use posture_core::scenario::{RunOutcome, ScenarioConfig};

#[derive(Parser)]
#[command(name = "posture", version, about = "Multi-link posture control simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and write <name>.csv, <name>.metrics.json and <name>.svg.
    Run(RunArgs),
    /// Print the TOML source of a built-in scenario.
    Preset {
        /// One of fig3, fig4, pull, translation, quiet.
        name: String,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario file (repeatable).
    #[arg(long = "scenario", value_name = "PATH")]
    scenarios: Vec<PathBuf>,
    /// Built-in scenario by name (repeatable).
    #[arg(long = "preset", value_name = "NAME")]
    presets: Vec<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Log every n-th tick; the first and last tick are always kept.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    decimate: u64,
    #[arg(long)]
    no_plot: bool,
    /// Worker threads for running several scenarios.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Overrides the sensor-noise seed of every scenario.
    #[arg(long)]
    seed: Option<u64>,
}

/// A configuration or I/O problem; reported with exit code 1.
type Failure = String;

fn load_all(args: &RunArgs) -> Result<Vec<ScenarioConfig>, Failure> {
    let mut configs = vec![];
    for path in &args.scenarios {
        let c = load_scenario(path).map_err(|e| format!("{}: {e}", path.display()))?;
        configs.push(c);
    }
    for name in &args.presets {
        configs.push(preset(name).map_err(|e| format!("preset {name}: {e}"))?);
    }
    if configs.is_empty() {
        return Err("nothing to run: give --scenario or --preset".into());
    }
    let mut names = BTreeSet::new();
    for c in &mut configs {
        if !names.insert(c.name.clone()) {
            return Err(format!("two scenarios are named {:?}; outputs would collide", c.name));
        }
        if let Some(seed) = args.seed {
            c.noise.seed = seed;
        }
    }
    Ok(configs)
}

fn write_outputs(outcome: &RunOutcome, args: &RunArgs) -> Result<(), Failure> {
    let file = |ext: &str| args.out.join(format!("{}.{ext}", outcome.name));
    let io = |p: &Path, e: posture_core::Error| format!("{}: {e}", p.display());
    let csv = file("csv");
    emit_csv(&outcome.log, args.decimate as usize, &csv).map_err(|e| io(&csv, e))?;
    let json = file("metrics.json");
    emit_metrics(&outcome.name, &outcome.metrics, &json).map_err(|e| io(&json, e))?;
    if !args.no_plot && !outcome.log.records.is_empty() {
        let svg = file("svg");
        emit_plot(&outcome.log, &outcome.name, &svg).map_err(|e| io(&svg, e))?;
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<bool, Failure> {
    let configs = load_all(args)?;
    std::fs::create_dir_all(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    let outcomes = run_batch_with_jobs(&configs, args.jobs as usize);
    let mut all_stable = true;
    for (config, outcome) in configs.iter().zip(outcomes) {
        let outcome = outcome.map_err(|e| format!("{}: {e}", config.name))?;
        write_outputs(&outcome, args)?;
        let amplitudes: Vec<String> = outcome
            .metrics
            .amplitude_deg
            .iter()
            .map(|a| format!("{a:.3}"))
            .collect();
        match &outcome.divergence {
            Some(d) => println!("{}: DIVERGED at {:.3} s ({})", outcome.name, d.time, d.reason),
            None if !outcome.metrics.stable => println!(
                "{}: UNSTABLE (max |angle| {:.2} deg)",
                outcome.name, outcome.metrics.max_abs_space_deg
            ),
            None => println!("{}: ok, amplitude deg [{}]", outcome.name, amplitudes.join(", ")),
        }
        all_stable &= outcome.is_stable();
    }
    Ok(all_stable)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Preset { name } => match preset_source(&name) {
            Some(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: no preset named {name:?} (available: {})", PRESETS.join(", "));
                ExitCode::from(1)
            }
        },
        Command::Run(args) => match run(&args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(2),
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        },
    }
}
