mod commands;
mod config;
mod output;
mod selfcheck;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fhlab::LabError;

use commands::Regime;
use config::{CommonArgs, RunConfig, DIGITS_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lab(
                LabError::PrecisionUnreachable { .. }
                | LabError::NumericallySingular { .. }
                | LabError::Consistency(_),
            ) => 3,
            _ => 2,
        }
    }
}

/// Hankel determinants with Fisher-Hartwig singularities against their
/// large-n asymptotics.
#[derive(Debug, Parser)]
#[command(name = "fhlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact log-average against the asymptotic formula
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "bulk")]
        regime: Regime,
    },
    /// Recurrence coefficients against their expansions
    Coeffs {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Finite-difference check of the differential identity in alpha
    DiffId {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 1e-6)]
        step: f64,
    },
    /// Monte Carlo average over GUE against the exact value
    Mc {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Raw moment table
    Moments {
        #[command(flatten)]
        common: CommonArgs,
        /// Highest moment index (default 2n)
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Reduced invariant suite; exit status 1 on any failure
    Selfcheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn resolve(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let env = std::env::var(DIGITS_ENV).ok();
    RunConfig::resolve(common, env.as_deref())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (cfg, table) = match &cli.command {
        Command::Compare { common, regime } => {
            let cfg = resolve(common)?;
            let t = commands::compare(&cfg, *regime)?;
            (cfg, t)
        }
        Command::Coeffs { common } => {
            let cfg = resolve(common)?;
            let t = commands::coeffs(&cfg)?;
            (cfg, t)
        }
        Command::DiffId { common, step } => {
            let cfg = resolve(common)?;
            let t = commands::diff_id(&cfg, *step)?;
            (cfg, t)
        }
        Command::Mc { common } => {
            let cfg = resolve(common)?;
            let t = commands::mc(&cfg)?;
            (cfg, t)
        }
        Command::Moments { common, k_max } => {
            let cfg = resolve(common)?;
            let t = commands::moments(&cfg, *k_max)?;
            (cfg, t)
        }
        Command::Selfcheck { common, inject_fault } => {
            let cfg = resolve(common)?;
            let outcomes = selfcheck::run(cfg.digits, *inject_fault)?;
            let mut text = String::new();
            for o in &outcomes {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{tag} {} {}\n", o.name, o.detail));
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            text.push_str(&format!("{} checks, {failed} failed\n", outcomes.len()));
            output::emit(&text, cfg.out.as_deref())?;
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    };
    output::emit(&table.render(cfg.format), cfg.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
