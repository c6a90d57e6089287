use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use irs_noma::cli::{self, ExperimentSpec, SnrGrid, PRESET_NAMES, THREADS_ENV};
use irs_noma::irs_control::Scheme;
use irs_noma::simulator::Engine;
use irs_noma::{Error, Result};

#[derive(Parser)]
#[command(name = "irs-noma", version, about = "Outage simulation and closed forms for IRS-assisted NOMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo outage sweep, written as CSV.
    Simulate(RunArgs),
    /// Closed-form on-off outage over the SNR grid, written as CSV.
    Analytic(RunArgs),
    /// Compare simulated on-off outage with the closed form point by point.
    Validate(RunArgs),
    /// List built-in presets.
    PresetList {
        /// Print each preset as an experiment file.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file (`key = value` lines).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `preset-list`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// SNR grid as START:STOP:STEP in dB.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<SnrGrid>,
    /// Scheme to run; repeat for several.
    #[arg(long = "scheme")]
    schemes: Vec<Scheme>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: $IRS_NOMA_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentSpec::load(path)?,
            (None, Some(name)) => cli::preset(name)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown preset `{name}`; try {}", PRESET_NAMES.join(", "))))?,
            (None, None) => ExperimentSpec::default(),
        };
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(trials) = self.trials {
            spec.trials = trials;
        }
        if let Some(grid) = self.snr_db {
            spec.grid = grid;
        }
        if !self.schemes.is_empty() {
            spec.schemes = self.schemes.clone();
        }
        if let Some(out) = &self.out {
            spec.output = Some(out.clone());
        }
        spec.validate()?;
        Ok(spec)
    }

    fn engine(&self) -> Result<Engine> {
        let workers = match self.threads {
            Some(n) => n,
            None => match std::env::var(THREADS_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("{THREADS_ENV}=`{v}` is not a thread count")))?,
                Err(_) => return Ok(Engine::default()),
            },
        };
        if workers == 0 {
            return Err(Error::InvalidConfig("thread count must be >= 1".into()));
        }
        Ok(Engine::with_workers(workers))
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Simulate(args) => {
            let spec = args.spec()?;
            let csv = cli::simulate_csv(&spec, &args.engine()?)?;
            cli::emit(&csv, spec.output.as_deref())?;
        }
        Command::Analytic(args) => {
            let spec = args.spec()?;
            cli::emit(&cli::analytic_csv(&spec)?, spec.output.as_deref())?;
        }
        Command::Validate(args) => {
            let spec = args.spec()?;
            let report = cli::validate(&spec, &args.engine()?)?;
            cli::emit(&report.render(), spec.output.as_deref())?;
            return Ok(report.passed());
        }
        Command::PresetList { full } => {
            for name in PRESET_NAMES {
                println!("{name:<6} {}", cli::preset_description(name).unwrap_or(""));
                if full {
                    let spec = cli::preset(name).expect("listed preset exists");
                    for line in spec.to_config_string().lines() {
                        println!("    {line}");
                    }
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
