use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use scf_cli::{parse_config, run_experiment, write_csv, ParsedConfig, Preset};

/// Uplink C-RAN simulator with spatial-compression-and-forward radio heads.
#[derive(Parser, Debug)]
#[command(name = "scf", version, about)]
struct Args {
    /// Configuration file (flat key/value document); defaults apply if
    /// omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Experiment preset: fig4|fig5|fig6|fig7|fig9|table5|custom.
    #[arg(long)]
    experiment: Option<String>,

    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Scenario draws per sweep point.
    #[arg(long)]
    trials: Option<usize>,

    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Shrink the preset to quick desk-scale dimensions.
    #[arg(long)]
    desk_scale: bool,

    /// Record wall-clock runtimes in the CSV (breaks byte-for-byte
    /// reproducibility of the output).
    #[arg(long)]
    timing: bool,
}

fn run(args: Args) -> Result<(), String> {
    let mut cfg: ParsedConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ParsedConfig::default(),
    };

    if let Some(name) = &args.experiment {
        cfg.experiment.preset =
            Preset::parse(name).ok_or_else(|| format!("unknown experiment preset `{name}`"))?;
    }
    if let Some(seed) = args.seed {
        cfg.experiment.seed = seed;
        cfg.system.rng_seed = seed;
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err("--trials must be >= 1".into());
        }
        cfg.experiment.trials = trials;
    }
    if args.desk_scale {
        cfg.experiment.desk_scale = true;
    }
    if args.timing {
        cfg.experiment.timing = true;
    }

    let out_path = args
        .out
        .or_else(|| cfg.experiment.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("scf_results.csv"));

    let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
    write_csv(&rows, &out_path).map_err(|e| format!("cannot write {}: {e}", out_path.display()))?;
    println!(
        "{}: wrote {} rows to {}",
        cfg.experiment.preset.label(),
        rows.len(),
        out_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
