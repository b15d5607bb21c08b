use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use intercept::config::{parse_config, Mode, RunConfig};
use intercept::runner;

/// Planar pursuer-evader engagement simulator.
#[derive(Debug, Parser)]
#[command(name = "intercept", version)]
struct Args {
    /// TOML run configuration.
    config: PathBuf,

    /// Override the configured mode (single, campaign, sweep).
    #[arg(long)]
    mode: Option<Mode>,

    /// Override the campaign seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Directory for CSV and text output.
    #[arg(long, short, env = "INTERCEPT_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    /// Worker threads for campaigns (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Override the campaign trial count.
    #[arg(long)]
    trials: Option<usize>,
}

fn load(args: &Args) -> intercept::Result<RunConfig> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| intercept::Error::Io {
        path: args.config.display().to_string(),
        message: e.to_string(),
    })?;
    let mut config = parse_config(&text)?;
    if let Some(mode) = args.mode {
        config.mode = mode;
    }
    if let Some(dir) = &args.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(w) = args.workers {
        config.workers = Some(w);
    }
    if let Some(c) = config.campaign.as_mut() {
        if let Some(seed) = args.seed {
            c.seed = seed;
        }
        if let Some(n) = args.trials {
            c.n_trials = n;
        }
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = load(&args).and_then(|config| runner::run(&config));
    match outcome {
        Ok(summary) => {
            for line in &summary.report {
                println!("{line}");
            }
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
