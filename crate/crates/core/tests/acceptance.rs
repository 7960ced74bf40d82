//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use fhlab::asymptotics::{
    coeff_asym, diff_identity_rhs, equilibrium_tail, g_boundary, johansson_log, szego_boundary,
    theorem1_log, EquilibriumData,
};
use fhlab::hankel::{
    char_poly_average_log, hankel_log_determinant, log_det_for_spec, selberg_log, working_digits,
};
use fhlab::mc_gue::mc_average_log;
use fhlab::orthopoly::{
    christoffel_darboux_residual, coefficient_identity_residual, kappa_logproduct,
    recurrence_from_moments,
};
use fhlab::precision::{pow10, PrecisionContext};
use fhlab::specfun::{log_barnes_g, log_c_barnes, log_c_integral, zeta_prime_minus1};
use fhlab::weights::{moment_table, WeightSpec};
use fhlab::{Float, Result};
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Result<Outcome>,
}

fn diff(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec().max(b.prec()), a - b).abs()
}

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::new(digits).expect("valid digits")
}

/// `max / min` over positive values.
fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn list(v: &[f64]) -> String {
    let s: Vec<String> = v.iter().map(|x| format!("{x:.4e}")).collect();
    format!("[{}]", s.join(", "))
}

fn selberg_exactness() -> Result<Outcome> {
    let c = ctx(60);
    let errs: Vec<Float> = (1..=20usize)
        .into_par_iter()
        .map(|n| {
            let d = log_det_for_spec(&WeightSpec::gaussian(n)?, &c)?;
            Ok(diff(&d.log_value, &selberg_log(n, d.log_value.prec())?))
        })
        .collect::<Result<_>>()?;
    let worst = errs.iter().map(Float::to_f64).fold(0.0, f64::max);
    Ok(Outcome {
        passed: errs.iter().all(|e| *e < 1e-40),
        detail: format!("max |lnD_n - selberg| over n=1..20 = {worst:.3e} (< 1e-40)"),
    })
}

fn moment_oracle() -> Result<Outcome> {
    let c = ctx(60);
    let bits = c.bits();
    let mut worst = Float::new(bits);
    for alpha in [-0.3, 0.5, 1.2] {
        let spec = WeightSpec::new(vec![0.0], vec![alpha], 20)?;
        let table = moment_table(&spec, 40, &c)?;
        for k in 0..=40usize {
            let err = if k % 2 == 0 {
                let arg = Float::with_val(bits, alpha) + (k as f64 + 1.0) / 2.0;
                let exact = arg.gamma();
                diff(&table.values[k], &exact) / exact
            } else {
                Float::with_val(bits, table.values[k].abs_ref()) / &table.values[k - 1]
            };
            worst = worst.max(&err);
        }
    }
    Ok(Outcome {
        passed: worst < 1e-45,
        detail: format!("max relative moment error {:.3e} (< 1e-45)", worst.to_f64()),
    })
}

fn two_path_determinant() -> Result<Outcome> {
    let c = ctx(40);
    let errs: Vec<f64> = (1..=30usize)
        .into_par_iter()
        .map(|n| {
            let spec = WeightSpec::new(vec![0.3], vec![0.5], n)?;
            let table = moment_table(&spec, 2 * n, &c.at_least(working_digits(n, &c)).scaled(2))?;
            let det = hankel_log_determinant(&table, n, &c)?;
            let rec = recurrence_from_moments(&table, n, &c)?;
            Ok(diff(&det.log_value, &kappa_logproduct(&rec, n)?).to_f64())
        })
        .collect::<Result<_>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst < 1e-25,
        detail: format!("max |LU - kappa product| over n=1..30 = {worst:.3e} (< 1e-25)"),
    })
}

/// Exact values and asymptotic predictions for the one-point spec at one `n`,
/// from a single moment table.
#[derive(Debug, Clone)]
struct OnePoint {
    n: usize,
    bulk_err: f64,
    kappa2_dev: f64,
    beta_norm: f64,
    gamma_norm: f64,
}

fn one_point(n: usize) -> Result<OnePoint> {
    let c = ctx(40);
    let spec = WeightSpec::new(vec![0.3], vec![0.5], n)?;
    let table = moment_table(&spec, 2 * n, &c.at_least(working_digits(n, &c)).scaled(2))?;
    let det = hankel_log_determinant(&table, n, &c)?;
    let bits = det.log_value.prec();
    let exact = Float::with_val(bits, &det.log_value - &selberg_log(n, bits)?);
    let asym = theorem1_log(&spec, &c)?;
    let rec = recurrence_from_moments(&table, n, &c)?;
    let coeffs = coeff_asym(&spec, &c)?;
    let nf = n as f64;
    let kappa2 = Float::with_val(rec.bits(), rec.kappa[n - 1].square_ref());
    let ratio = Float::with_val(rec.bits(), &kappa2 / &coeffs.kappa2) - 1u32;
    Ok(OnePoint {
        n,
        bulk_err: diff(&exact, &asym.log_value).to_f64(),
        kappa2_dev: nf * nf * ratio.to_f64().abs(),
        beta_norm: nf * nf * diff(&rec.beta[n], &coeffs.beta).to_f64() / (2.0 * nf).sqrt(),
        gamma_norm: nf * diff(&rec.gamma[n], &coeffs.gamma).to_f64(),
    })
}

/// Shared by the convergence and coefficient criteria.
fn one_point_table() -> Result<Vec<OnePoint>> {
    static CACHE: OnceLock<Result<Vec<OnePoint>>> = OnceLock::new();
    CACHE
        .get_or_init(|| [8usize, 16, 32, 64].into_par_iter().map(one_point).collect())
        .clone()
}

fn bulk_convergence() -> Result<Outcome> {
    let rows = one_point_table()?;
    let normalized: Vec<f64> = rows
        .iter()
        .map(|r| r.bulk_err * r.n as f64 / (r.n as f64).ln())
        .collect();
    let e8 = rows[0].bulk_err;
    let e64 = rows[3].bulk_err;
    let s = spread(&normalized);
    Ok(Outcome {
        passed: s <= 3.0 && e64 < e8,
        detail: format!(
            "e_n n/ln n at n=8,16,32,64 = {}, spread {s:.3} (<= 3), e_64 {e64:.3e} < e_8 {e8:.3e}",
            list(&normalized)
        ),
    })
}

fn cross_term() -> Result<Outcome> {
    let c = ctx(40);
    let (l1, l2, a1, a2) = (-0.4, 0.3, 0.5, 0.5);
    let target = -2.0 * a1 * a2 * (2.0 * f64::abs(l1 - l2)).ln();
    let errs: Vec<f64> = [8usize, 16, 32]
        .into_par_iter()
        .map(|n| {
            let at = |x: f64, y: f64| -> Result<Float> {
                char_poly_average_log(&WeightSpec::new(vec![l1, l2], vec![x, y], n)?, &c)
            };
            let both = at(a1, a2)?;
            let first = at(a1, 0.0)?;
            let second = at(0.0, a2)?;
            let none = at(0.0, 0.0)?;
            let combo = Float::with_val(both.prec(), &both - &first) - &second + &none;
            Ok((combo.to_f64() - target).abs())
        })
        .collect::<Result<_>>()?;
    Ok(Outcome {
        passed: errs[1] < errs[0] && errs[2] < errs[1],
        detail: format!("|combination - cross term| at n=8,16,32 = {} (decreasing)", list(&errs)),
    })
}

fn coefficient_asymptotics() -> Result<Outcome> {
    let rows = one_point_table()?;
    let tail = &rows[1..];
    let k: Vec<f64> = tail.iter().map(|r| r.kappa2_dev).collect();
    let b: Vec<f64> = tail.iter().map(|r| r.beta_norm).collect();
    let g: Vec<f64> = tail.iter().map(|r| r.gamma_norm).collect();
    let (sk, sb, sg) = (spread(&k), spread(&b), spread(&g));
    Ok(Outcome {
        passed: sk <= 3.0 && sb <= 3.0 && sg <= 3.0,
        detail: format!(
            "n=16,32,64 (tables shared with [4]): kappa2 {} spread {sk:.3}; beta {} spread {sb:.3}; gamma {} spread {sg:.3} (each <= 3)",
            list(&k),
            list(&b),
            list(&g)
        ),
    })
}

fn differential_identity() -> Result<Outcome> {
    let c = ctx(60);
    let step = 1e-6;
    let normalized: Vec<f64> = [8usize, 16, 32]
        .into_par_iter()
        .map(|n| {
            let spec = WeightSpec::new(vec![0.3], vec![0.5], n)?;
            let plus = char_poly_average_log(&spec.with_alpha(0, 0.5 + step)?, &c)?;
            let minus = char_poly_average_log(&spec.with_alpha(0, 0.5 - step)?, &c)?;
            let fd = Float::with_val(plus.prec(), &plus - &minus).to_f64() / (2.0 * step);
            let rhs = diff_identity_rhs(&spec, 0, &c)?.to_f64();
            Ok((fd - rhs).abs() * n as f64 / (n as f64).ln())
        })
        .collect::<Result<_>>()?;
    let s = spread(&normalized);
    Ok(Outcome {
        passed: s <= 3.0,
        detail: format!(
            "|fd - rhs| n/ln n at n=8,16,32 = {}, spread {s:.3} (<= 3)",
            list(&normalized)
        ),
    })
}

fn johansson_regime() -> Result<Outcome> {
    let c = ctx(40);
    let errs: Vec<f64> = [4usize, 8, 16]
        .into_par_iter()
        .map(|n| {
            let spec = WeightSpec::new(vec![1.5], vec![0.5], n)?;
            let exact = char_poly_average_log(&spec, &c)?;
            let asym = johansson_log(1.5, 0.5, n, &c)?.log_value;
            Ok(diff(&exact, &asym).to_f64() / n as f64)
        })
        .collect::<Result<_>>()?;
    Ok(Outcome {
        passed: errs[1] < errs[0] && errs[2] < errs[1],
        detail: format!("|exact - asym|/n at n=4,8,16 = {} (decreasing)", list(&errs)),
    })
}

/// `zeta'(-1)` to 25 digits, from published tables.
const ZETA_PRIME_MINUS1: &str = "-0.1654211437004509292139196";

fn special_functions() -> Result<Outcome> {
    let c = ctx(60);
    let bits = c.bits();
    let mut forms = Float::new(bits);
    for a in [-0.45, -0.2, 0.1, 0.5, 0.75, 1.3, 2.0] {
        let af = Float::with_val(bits, a);
        forms = forms.max(&diff(&log_c_integral(&af, &c)?, &log_c_barnes(&af, &c)?));
    }
    let zero = Float::new(bits);
    let one = Float::with_val(bits, 1);
    let c0 = log_c_integral(&zero, &c)?.max(&log_c_barnes(&zero, &c)?.abs());
    let ln4 = Float::with_val(bits, 4).ln();
    let c1 = diff(&log_c_integral(&one, &c)?, &ln4).max(&diff(&log_c_barnes(&one, &c)?, &ln4));
    let zeta = zeta_prime_minus1(&c).value;
    let lhs = log_barnes_g(&Float::with_val(bits, 0.5), &c)? * 2u32;
    let rhs = Float::with_val(bits, 2).ln() / 12u32 - c.pi().ln() / 2u32 + Float::with_val(bits, &zeta * 3u32);
    let identity = diff(&lhs, &rhs);
    let literal = Float::with_val(bits, Float::parse(ZETA_PRIME_MINUS1).expect("literal"));
    let zeta_err = diff(&zeta, &literal);
    let tol = pow10(bits, -40.0);
    Ok(Outcome {
        passed: forms < tol && c0 < tol && c1 < tol && identity < tol && zeta_err < 1e-24,
        detail: format!(
            "C forms {:.3e}, lnC(0) {:.3e}, lnC(1) - ln4 {:.3e}, G(1/2) identity {:.3e} (each < 1e-40); zeta'(-1) vs table {:.3e}",
            forms.to_f64(),
            c0.to_f64(),
            c1.to_f64(),
            identity.to_f64(),
            zeta_err.to_f64()
        ),
    })
}

fn g_and_szego() -> Result<Outcome> {
    let c = ctx(40);
    let bits = c.bits();
    let points: Vec<f64> = (0..20).map(|i| -0.95 + 1.9 * (i as f64 + 0.5) / 20.0).collect();
    let g_err: Vec<f64> = points
        .par_iter()
        .map(|&x| {
            let xf = Float::with_val(bits, x);
            let gp = g_boundary(&xf, true, &c)?;
            let gm = g_boundary(&xf, false, &c)?;
            let sum = gp.add(&gm);
            let jump = gp.sub(&gm);
            let target = Float::with_val(bits, xf.square_ref()) * 2u32 + EquilibriumData::new(bits).l_const();
            let two_pi_tail = equilibrium_tail(&xf)? * c.pi() * 2u32;
            Ok([
                diff(&sum.re, &target),
                sum.im.abs(),
                jump.re.abs(),
                diff(&jump.im, &two_pi_tail),
            ]
            .iter()
            .map(Float::to_f64)
            .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let spec = WeightSpec::new(vec![-0.4, 0.3], vec![0.5, -0.3], 16)?;
    let mut d_err = Float::new(bits);
    for &x in &points {
        let xf = Float::with_val(bits, x);
        let prod = szego_boundary(&xf, &spec, true)?.mul(&szego_boundary(&xf, &spec, false)?);
        let mut log_w = Float::new(bits);
        for (&l, &a) in spec.lambdas().iter().zip(spec.alphas()) {
            log_w += Float::with_val(bits, &xf - l).abs().ln() * (2.0 * a);
        }
        let w = log_w.exp();
        let rel = (diff(&prod.re, &w) / &w).max(&(prod.im.abs() / &w));
        d_err = d_err.max(&rel);
    }
    let g_worst = g_err.iter().copied().fold(0.0, f64::max);
    let tol = c.target_tol();
    Ok(Outcome {
        passed: g_worst < 1e-10 && d_err < tol,
        detail: format!(
            "g boundary identities {g_worst:.3e} (< 1e-10); D+ D- = w relative {:.3e} (< {:.0e}) at 20 points",
            d_err.to_f64(),
            tol.to_f64()
        ),
    })
}

fn christoffel_darboux() -> Result<Outcome> {
    let c = ctx(40);
    let n = 12;
    let spec = WeightSpec::new(vec![-0.4, 0.3], vec![0.5, 0.25], n)?;
    let table = moment_table(&spec, 2 * n, &c.at_least(working_digits(n, &c)))?;
    let r = recurrence_from_moments(&table, n, &c)?;
    let edge = 1.2 * (2.0 * n as f64).sqrt();
    let mut cd = Float::new(r.bits());
    for i in 0..15 {
        let x = -edge + 2.0 * edge * (i as f64 + 0.5) / 15.0;
        cd = cd.max(&christoffel_darboux_residual(&r, &Float::with_val(r.bits(), x), n)?);
    }
    let coeff = coefficient_identity_residual(&r);
    Ok(Outcome {
        passed: cd < 1e-20 && coeff < 1e-20,
        detail: format!(
            "CD relative residual {:.3e}, coefficient identities {:.3e} (each < 1e-20)",
            cd.to_f64(),
            coeff.to_f64()
        ),
    })
}

fn monte_carlo() -> Result<Outcome> {
    let spec = WeightSpec::new(vec![0.2], vec![1.0], 4)?;
    let est = mc_average_log(&spec, 100_000, 2024)?;
    let again = mc_average_log(&spec, 100_000, 2024)?;
    let exact = char_poly_average_log(&spec, &ctx(40))?.to_f64();
    let z = ((est.mean_log - exact).exp() - 1.0) / est.stderr_rel;
    Ok(Outcome {
        passed: z.abs() < 4.0 && est == again,
        detail: format!(
            "mc {:.6} vs exact {exact:.6}, z = {z:.3} (|z| < 4), stderr_rel {:.3e}, rerun identical: {}",
            est.mean_log,
            est.stderr_rel,
            est == again
        ),
    })
}

fn main() -> ExitCode {
    let mins = |m: u64| Duration::from_secs(60 * m);
    let criteria = [
        Criterion { id: 1, name: "Selberg exactness", limit: mins(1), run: selberg_exactness },
        Criterion { id: 2, name: "moment oracle", limit: mins(2), run: moment_oracle },
        Criterion { id: 3, name: "two-path determinant", limit: mins(2), run: two_path_determinant },
        Criterion { id: 4, name: "bulk asymptotic convergence", limit: mins(15), run: bulk_convergence },
        Criterion { id: 5, name: "two-point cross term", limit: mins(20), run: cross_term },
        Criterion { id: 6, name: "coefficient asymptotics", limit: mins(15), run: coefficient_asymptotics },
        Criterion { id: 7, name: "differential identity", limit: mins(10), run: differential_identity },
        Criterion { id: 8, name: "Johansson regime", limit: mins(5), run: johansson_regime },
        Criterion { id: 9, name: "special functions", limit: mins(1), run: special_functions },
        Criterion { id: 10, name: "g-function and Szego", limit: mins(2), run: g_and_szego },
        Criterion { id: 11, name: "Christoffel-Darboux", limit: mins(1), run: christoffel_darboux },
        Criterion { id: 12, name: "Monte Carlo cross-check", limit: mins(2), run: monte_carlo },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= c.limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {}: {detail}; {:.1}s (limit {}s)",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
