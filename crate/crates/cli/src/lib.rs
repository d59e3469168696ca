//! Configuration, orchestration and report emission for the `quasiopt`
//! binary.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_run_config, Mode, RunConfig};
pub use error::CliError;
pub use run::execute;

#[derive(Debug, Clone, Parser)]
#[command(name = "quasiopt", version, about = "Regularization parameter choice experiments")]
pub struct Args {
    /// Run configuration (or a previous run's manifest.json).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `replications`.
    #[arg(long)]
    pub replications: Option<usize>,
    /// Output directory; defaults to the config's `out`, then `./out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Loads the configuration named by `args` and applies flag overrides.
pub fn load(args: &Args) -> Result<(RunConfig, PathBuf), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let mut cfg = parse_run_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    cfg.validate()?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

pub fn run(args: &Args) -> Result<Vec<String>, CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let (cfg, out) = load(args)?;
    execute(&cfg, &out)
}
