use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use crate::CliError;

pub const DIGITS_ENV: &str = "FHLAB_DIGITS";
pub const DEFAULT_DIGITS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every command. Anything left unset falls back to the
/// config file, then to the environment (digits only), then to defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Singular points lambda_j (comma-separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    /// Exponents alpha_j (comma-separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    /// Matrix sizes (comma-separated)
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Working precision in decimal digits
    #[arg(long)]
    pub digits: Option<u32>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the table here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// key=value file with defaults for the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub digits: u32,
    pub n_list: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            digits: DEFAULT_DIGITS,
            n_list: vec![8, 16, 32],
            lambdas: vec![0.3],
            alphas: vec![0.5],
            seed: 1,
            samples: 100_000,
            format: Format::Csv,
            out: None,
        }
    }
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Config(format!("{key}: cannot parse '{s}'")))
        })
        .collect()
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse '{value}'")))
}

/// Parse flat `key = value` text; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<CommonArgs, CliError> {
    let mut args = CommonArgs::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "lambdas" => args.lambdas = Some(list(&key, value)?),
            "alphas" => args.alphas = Some(list(&key, value)?),
            "n_list" => args.n_list = Some(list(&key, value)?),
            "digits" => args.digits = Some(scalar(&key, value)?),
            "seed" => args.seed = Some(scalar(&key, value)?),
            "samples" => args.samples = Some(scalar(&key, value)?),
            "out" => args.out = Some(PathBuf::from(value)),
            "format" => {
                args.format = Some(
                    Format::from_str(value, true)
                        .map_err(|_| CliError::Config(format!("format: unknown '{value}'")))?,
                )
            }
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
    }
    Ok(args)
}

fn read_config(path: &Path) -> Result<CommonArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

impl RunConfig {
    /// Merge flags over the config file over the environment over defaults.
    pub fn resolve(flags: &CommonArgs, env_digits: Option<&str>) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => read_config(p)?,
            None => CommonArgs::default(),
        };
        let env_digits = env_digits
            .map(|v| scalar::<u32>(DIGITS_ENV, v))
            .transpose()?;
        let d = RunConfig::default();
        let cfg = RunConfig {
            digits: flags
                .digits
                .or(file.digits)
                .or(env_digits)
                .unwrap_or(d.digits),
            n_list: flags.n_list.clone().or(file.n_list).unwrap_or(d.n_list),
            lambdas: flags.lambdas.clone().or(file.lambdas).unwrap_or(d.lambdas),
            alphas: flags.alphas.clone().or(file.alphas).unwrap_or(d.alphas),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            samples: flags.samples.or(file.samples).unwrap_or(d.samples),
            format: flags.format.or(file.format).unwrap_or(d.format),
            out: flags.out.clone().or(file.out),
        };
        if cfg.n_list.is_empty() {
            return Err(CliError::Config("n-list is empty".into()));
        }
        Ok(cfg)
    }
}
