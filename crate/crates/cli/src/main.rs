//! `softgeo`: configuration-driven connectivity experiments.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

/// Environment fallback for the master seed.
pub const SEED_ENV: &str = "SOFTGEO_SEED";

#[derive(Debug, Parser)]
#[command(name = "softgeo", version, about = "Connectivity of soft random geometric graphs in bounded domains")]
struct Args {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config and SOFTGEO_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV; overrides the config. Standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Clamp probability columns to [0, 1].
    #[arg(long)]
    clamp: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn invalid(path: &str, message: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{path}: {message}"))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

/// Flag and environment overrides shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed_flag: Option<u64>,
    pub seed_env: Option<u64>,
    pub clamp: bool,
}

impl Overrides {
    /// Seed precedence: flag, then config, then environment, then 0.
    pub fn seed(&self, from_config: Option<u64>) -> u64 {
        self.seed_flag.or(from_config).or(self.seed_env).unwrap_or(0)
    }
}

/// A finished table and whether any cell failed to compute.
pub struct Report {
    pub csv: Vec<u8>,
    pub partial_failure: bool,
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::invalid(SEED_ENV, format!("{v:?} is not a u64"))),
        Err(_) => Ok(None),
    }
}

fn run(args: Args) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = config::parse(&text)?;
    if args.workers == Some(0) {
        return Err(CliError::invalid("--workers", "must be at least 1"));
    }
    let overrides = Overrides {
        seed_flag: args.seed,
        seed_env: env_seed()?,
        clamp: args.clamp || cfg.clamp(),
    };
    let job = commands::prepare(&cfg, &overrides)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let report = pool.install(|| job.execute())?;

    let target = args.out.or_else(|| cfg.output().cloned());
    output::write_atomic(target.as_deref(), &report.csv)?;
    Ok(report)
}

/// 0 on success, 3 when some cells failed (the table is still written),
/// 2 for configuration errors and 1 for I/O failures.
fn exit_status(result: &Result<Report, CliError>) -> u8 {
    match result {
        Ok(report) if report.partial_failure => 3,
        Ok(_) => 0,
        Err(e) => e.exit_code(),
    }
}

fn main() -> ExitCode {
    let result = run(Args::parse());
    match &result {
        Ok(report) if report.partial_failure => eprintln!("softgeo: some cells failed; see the flags and empty columns"),
        Ok(_) => {}
        Err(e) => eprintln!("softgeo: {e}"),
    }
    ExitCode::from(exit_status(&result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let ok = |partial_failure| Ok(Report { csv: Vec::new(), partial_failure });
        assert_eq!(exit_status(&ok(false)), 0);
        assert_eq!(exit_status(&ok(true)), 3);
        assert_eq!(exit_status(&Err(CliError::Validation("x".into()))), 2);
        assert_eq!(exit_status(&Err(CliError::Io("x".into()))), 1);
    }

    #[test]
    fn seed_precedence() {
        let o = Overrides { seed_flag: Some(1), seed_env: Some(3), clamp: false };
        assert_eq!(o.seed(Some(2)), 1);
        let o = Overrides { seed_flag: None, ..o };
        assert_eq!(o.seed(Some(2)), 2);
        assert_eq!(o.seed(None), 3);
        assert_eq!(Overrides::default().seed(None), 0);
    }
}
