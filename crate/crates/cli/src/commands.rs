use std::time::Instant;

use fhlab::asymptotics::{coeff_asym, diff_identity_rhs, johansson_log, theorem1_log};
use fhlab::hankel::{char_poly_average_log, working_digits};
use fhlab::mc_gue::mc_average_log;
use fhlab::orthopoly::recurrence_from_moments;
use fhlab::precision::PrecisionContext;
use fhlab::weights::{moment_table, WeightSpec};
use fhlab::{Float, LabError};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Regime {
    /// Singular points inside (-1, 1)
    Bulk,
    /// One point with |lambda| > 1
    Outside,
}

fn context(cfg: &RunConfig) -> Result<PrecisionContext, CliError> {
    Ok(PrecisionContext::new(cfg.digits)?)
}

fn spec_at(cfg: &RunConfig, n: usize) -> Result<WeightSpec, LabError> {
    WeightSpec::new(cfg.lambdas.clone(), cfg.alphas.clone(), n)
}

fn sub(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec().max(b.prec()), a - b)
}

/// Rows computed per `n` in parallel, returned in ascending `n`.
fn per_n<F>(cfg: &RunConfig, f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(usize) -> Result<Vec<Vec<Cell>>, CliError> + Sync,
{
    let mut ns = cfg.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let results: Vec<_> = ns.par_iter().map(|&n| f(n)).collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// One comparison of an exact log value against its asymptotic prediction.
#[derive(Debug, Clone)]
pub struct ComparisonRecord {
    pub n: usize,
    pub exact_log: Float,
    pub asym_log: Float,
    pub diff: Float,
    /// `diff n / ln n`, absent for `n = 1`.
    pub normalized: Option<Float>,
    pub runtime_seconds: f64,
}

impl ComparisonRecord {
    pub fn new(n: usize, exact_log: Float, asym_log: Float, runtime_seconds: f64) -> Self {
        let diff = sub(&exact_log, &asym_log);
        let normalized = (n >= 2).then(|| {
            let nf = Float::with_val(diff.prec(), n);
            Float::with_val(diff.prec(), &diff * &nf) / nf.ln()
        });
        Self {
            n,
            exact_log,
            asym_log,
            diff,
            normalized,
            runtime_seconds,
        }
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.n as i64),
            Cell::float(&self.exact_log),
            Cell::float(&self.asym_log),
            Cell::float(&self.diff),
            self.normalized.as_ref().map_or(Cell::Null, Cell::float),
            Cell::seconds(self.runtime_seconds),
        ]
    }
}

pub fn compare(cfg: &RunConfig, regime: Regime) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    if regime == Regime::Outside && cfg.lambdas.len() != 1 {
        return Err(CliError::Usage("--regime outside takes exactly one lambda".into()));
    }
    let mut table = Table::new(
        "compare",
        &["n", "exact_log", "asym_log", "diff", "normalized", "runtime_s"],
    );
    table.rows = per_n(cfg, |n| {
        let start = Instant::now();
        let spec = spec_at(cfg, n)?;
        let asym = match regime {
            Regime::Bulk => theorem1_log(&spec, &ctx)?,
            Regime::Outside => johansson_log(spec.lambdas()[0], spec.alphas()[0], n, &ctx)?,
        };
        let exact = char_poly_average_log(&spec, &ctx)?;
        let rec = ComparisonRecord::new(n, exact, asym.log_value, start.elapsed().as_secs_f64());
        Ok(vec![rec.cells()])
    })?;
    Ok(table)
}

pub fn coeffs(cfg: &RunConfig) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    let mut table = Table::new(
        "coeffs",
        &[
            "n",
            "kappa2_exact",
            "kappa2_asym",
            "beta_exact",
            "beta_asym",
            "gamma_exact",
            "gamma_asym",
            "kappa2_n2dev",
        ],
    );
    table.rows = per_n(cfg, |n| {
        let spec = spec_at(cfg, n)?;
        let asym = coeff_asym(&spec, &ctx)?;
        let working = ctx.at_least(working_digits(n, &ctx));
        let moments = moment_table(&spec, 2 * n, &working)?;
        let rec = recurrence_from_moments(&moments, n, &ctx)?;
        let bits = rec.bits();
        let kappa2 = Float::with_val(bits, rec.kappa[n - 1].square_ref());
        let n2 = Float::with_val(bits, (n * n) as u64);
        let dev = (Float::with_val(bits, &kappa2 / &asym.kappa2) - 1u32) * n2;
        Ok(vec![vec![
            Cell::Int(n as i64),
            Cell::float(&kappa2),
            Cell::float(&asym.kappa2),
            Cell::float(&rec.beta[n]),
            Cell::float(&asym.beta),
            Cell::float(&rec.gamma[n]),
            Cell::float(&asym.gamma),
            Cell::float(&dev),
        ]])
    })?;
    Ok(table)
}

/// Minimum digits for the finite-difference derivative in `alpha`.
pub const DIFF_ID_MIN_DIGITS: u32 = 60;

pub fn diff_id(cfg: &RunConfig, step: f64) -> Result<Table, CliError> {
    if !(step > 0.0) {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    let ctx = context(cfg)?.at_least(DIFF_ID_MIN_DIGITS);
    let mut table = Table::new(
        "diff-id",
        &["n", "nu", "fd", "rhs", "residual", "normalized"],
    );
    table.rows = per_n(cfg, |n| {
        let spec = spec_at(cfg, n)?;
        let mut rows = Vec::new();
        for nu in 0..spec.m() {
            let alpha = spec.alphas()[nu];
            let (up, down) = (alpha + step, alpha - step);
            let plus = char_poly_average_log(&spec.with_alpha(nu, up)?, &ctx)?;
            let minus = char_poly_average_log(&spec.with_alpha(nu, down)?, &ctx)?;
            let fd = sub(&plus, &minus) / (up - down);
            let rhs = diff_identity_rhs(&spec, nu, &ctx)?;
            let residual = sub(&fd, &rhs);
            let normalized = if n >= 2 {
                Cell::float(&(Float::with_val(residual.prec(), &residual * n as u64) / (n as f64).ln()))
            } else {
                Cell::Null
            };
            rows.push(vec![
                Cell::Int(n as i64),
                Cell::Int(nu as i64 + 1),
                Cell::float(&fd),
                Cell::float(&rhs),
                Cell::float(&residual),
                normalized,
            ]);
        }
        Ok(rows)
    })?;
    Ok(table)
}

pub fn mc(cfg: &RunConfig) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    let mut table = Table::new(
        "mc",
        &["n", "mc_log", "stderr_rel", "exact_log", "z_score", "samples", "seed"],
    );
    table.rows = per_n(cfg, |n| {
        let spec = spec_at(cfg, n)?;
        let est = mc_average_log(&spec, cfg.samples, cfg.seed)?;
        let exact_float = char_poly_average_log(&spec, &ctx)?;
        let exact = exact_float.to_f64();
        let z = if est.stderr_rel > 0.0 {
            ((est.mean_log - exact).exp() - 1.0) / est.stderr_rel
        } else {
            0.0
        };
        Ok(vec![vec![
            Cell::Int(n as i64),
            Cell::f64(est.mean_log),
            Cell::f64(est.stderr_rel),
            Cell::float(&exact_float),
            Cell::f64(z),
            Cell::Int(est.samples as i64),
            Cell::Num(est.seed.to_string()),
        ]])
    })?;
    Ok(table)
}

pub fn moments(cfg: &RunConfig, k_max: Option<usize>) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    let mut table = Table::new("moments", &["n", "k", "moment"]);
    table.rows = per_n(cfg, |n| {
        let spec = spec_at(cfg, n)?;
        let t = moment_table(&spec, k_max.unwrap_or(2 * n), &ctx)?;
        Ok(t.values
            .iter()
            .enumerate()
            .map(|(k, v)| vec![Cell::Int(n as i64), Cell::Int(k as i64), Cell::float(v)])
            .collect())
    })?;
    Ok(table)
}
