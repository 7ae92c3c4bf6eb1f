use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qusum::cli::{run, write_run, CliError, Command, ConfigError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "qusum", version, about = "Quickest change-point detection for qubit streams")]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Config file: `key = value` lines, a JSON object, or a run manifest.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Starting point before the config file is applied.
    #[arg(long, global = true)]
    preset: Option<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Run-length cap in engine steps.
    #[arg(long, global = true)]
    cap: Option<u64>,

    /// Worker threads for Monte Carlo trials; never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, env = "QUSUM_OUT_DIR", default_value = "qusum-out")]
    out: PathBuf,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Relative entropies of the pair and sufficient block lengths.
    Divergences,
    /// Measured rate per copy for each block length.
    BlockRate,
    /// Monte Carlo delay/false-alarm tradeoff.
    Simulate,
    /// Log-likelihood paths of a change at `nu` with trend slopes.
    ClassicalDemo,
}

fn config(args: &Args) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = match &args.preset {
        Some(name) => ScenarioConfig::preset(name)?,
        None => ScenarioConfig::default(),
    };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { location: path.display().to_string(), message: e.to_string() })?;
        cfg.apply_text(&text)
            .map_err(|e| ConfigError { location: format!("{}: {}", path.display(), e.location), ..e })?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(cap) = args.cap {
        cfg.cap = cap;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(args: &Args) -> Result<(), CliError> {
    let cfg = config(args)?;
    let command = match args.command {
        Cmd::Divergences => Command::Divergences,
        Cmd::BlockRate => Command::BlockRate,
        Cmd::Simulate => Command::Simulate,
        Cmd::ClassicalDemo => Command::ClassicalDemo,
    };
    let result = match args.threads {
        Some(n) => {
            if n == 0 {
                return Err(ConfigError { location: "--threads".into(), message: "must be at least 1".into() }.into());
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
            pool.install(|| run(command, &cfg))
        }
        None => run(command, &cfg),
    };
    match result {
        Ok(output) => {
            let manifest = write_run(&args.out, command, &cfg, &output)?;
            print!("{}", output.stdout);
            eprintln!("wrote {}", manifest.display());
            Ok(())
        }
        Err(CliError::Censored { message, partial }) => {
            write_run(&args.out, command, &cfg, &partial)?;
            print!("{}", partial.stdout);
            Err(CliError::Censored { message, partial })
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
