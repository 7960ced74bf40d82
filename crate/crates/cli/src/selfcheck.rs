//! Reduced-size invariant suite across all modules.

use fhlab::asymptotics::{
    coeff_asym, equilibrium_tail, g_boundary, szego_boundary, theorem1_log, EquilibriumData,
};
use fhlab::hankel::{hankel_log_determinant, log_det_for_spec, selberg_log, working_digits};
use fhlab::mc_gue::mc_average_log;
use fhlab::orthopoly::{
    christoffel_darboux_residual, coefficient_identity_residual, kappa_logproduct,
    orthonormality_residual, recurrence_from_moments,
};
use fhlab::precision::{pow10, PrecisionContext};
use fhlab::specfun::{
    digamma, log_barnes_g, log_c_barnes, log_c_integral, log_gamma, zeta_prime_minus1,
};
use fhlab::weights::{moment_table, symmetric_moment_oracle, MomentTable, WeightSpec};
use fhlab::{Float, Result};

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Tolerances {
    /// `10^-(digits - 2 guard)`
    exact: Float,
    /// `10^-(digits / 2)`
    half: Float,
    /// `10^-(digits / 3)`
    third: Float,
}

fn diff(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec().max(b.prec()), a - b).abs()
}

fn rel(a: &Float, b: &Float) -> Float {
    let scale = Float::with_val(b.prec(), b.abs_ref()).max(&Float::with_val(b.prec(), 1e-300));
    diff(a, b) / scale
}

fn sci(x: &Float) -> String {
    format!("{:.3e}", x.to_f64())
}

/// Largest value with a readable summary; `ok` when below `tol`.
fn verdict(worst: Float, tol: &Float) -> (bool, String) {
    let ok = worst <= *tol;
    (ok, format!("max {} (tol {})", sci(&worst), sci(tol)))
}

fn max_of(values: impl IntoIterator<Item = Float>) -> Float {
    values
        .into_iter()
        .fold(Float::new(64), |acc, v| if v > acc { v } else { acc })
}

type Check<'a> = (&'static str, Box<dyn Fn() -> Result<(bool, String)> + 'a>);

/// Run every check; `inject_fault` corrupts one moment on the determinant
/// side of the two-path comparison.
pub fn run(digits: u32, inject_fault: bool) -> Result<Vec<CheckOutcome>> {
    let ctx = PrecisionContext::new(digits)?;
    let tol = Tolerances {
        exact: pow10(ctx.bits(), -f64::from(digits.saturating_sub(2 * ctx.guard_digits).max(10))),
        half: pow10(ctx.bits(), -f64::from(digits) / 2.0),
        third: pow10(ctx.bits(), -f64::from(digits) / 3.0),
    };
    let bits = ctx.bits();
    let c = &ctx;
    let t = &tol;

    let checks: Vec<Check> = vec![
        ("weights.gaussian_moments", Box::new(move || {
            let table = moment_table(&WeightSpec::gaussian(4)?, 8, c)?;
            let errs = (0..=8).map(|k| {
                let exact = symmetric_moment_oracle(0.0, k, c)?;
                Ok(if k % 2 == 0 { rel(&table.values[k], &exact) } else { table.values[k].clone().abs() })
            });
            Ok(verdict(max_of(errs.collect::<Result<Vec<_>>>()?), &t.exact))
        })),
        ("weights.symmetric_oracle", Box::new(move || {
            let spec = WeightSpec::new(vec![0.0], vec![0.7], 3)?;
            let table = moment_table(&spec, 10, c)?;
            let errs = (0..=10).map(|k| {
                let exact = symmetric_moment_oracle(0.7, k, c)?;
                Ok(if k % 2 == 0 { rel(&table.values[k], &exact) } else { table.values[k].clone().abs() })
            });
            Ok(verdict(max_of(errs.collect::<Result<Vec<_>>>()?), &t.exact))
        })),
        ("weights.reflection", Box::new(move || {
            let spec = WeightSpec::new(vec![0.3], vec![0.5], 4)?;
            let a = moment_table(&spec, 6, c)?;
            let b = moment_table(&spec.reflected(), 6, c)?;
            let errs = (0..=6).map(|k| {
                let mirrored = if k % 2 == 0 { b.values[k].clone() } else { -b.values[k].clone() };
                rel(&a.values[k], &mirrored)
            });
            Ok(verdict(max_of(errs), &t.exact))
        })),
        ("weights.precision_stability", Box::new(move || {
            let spec = WeightSpec::new(vec![-0.2, 0.5], vec![0.4, -0.3], 4)?;
            let a = moment_table(&spec, 8, c)?;
            let b = moment_table(&spec, 8, &c.at_least(c.digits + 20))?;
            let worst = max_of((0..=8).map(|k| rel(&a.values[k], &b.values[k])));
            let bound = Float::with_val(bits, 10u32) * a.achieved_tol().max(&t.exact);
            Ok(verdict(worst, &bound))
        })),
        ("hankel.selberg", Box::new(move || {
            let mut worst = Float::new(bits);
            for n in 1..=10 {
                let d = log_det_for_spec(&WeightSpec::gaussian(n)?, c)?;
                let s = selberg_log(n, d.log_value.prec())?;
                worst = worst.max(&diff(&d.log_value, &s));
            }
            Ok(verdict(worst, &t.exact))
        })),
        ("hankel.two_path", Box::new(move || {
            let n = 10;
            let spec = WeightSpec::new(vec![0.3], vec![0.5], n)?;
            let working = c.at_least(working_digits(n, c)).scaled(2);
            let table = moment_table(&spec, 2 * n, &working)?;
            let rec = recurrence_from_moments(&table, n, c)?;
            let det = if inject_fault {
                let mut values = table.values.clone();
                values[2] *= Float::with_val(working.bits(), 1) + pow10(working.bits(), -8.0);
                hankel_log_determinant(&MomentTable::from_values(values, working.digits), n, c)?
            } else {
                hankel_log_determinant(&table, n, c)?
            };
            Ok(verdict(diff(&det.log_value, &kappa_logproduct(&rec, n)?), &t.half))
        })),
        ("hankel.reflection", Box::new(move || {
            let spec = WeightSpec::new(vec![-0.5, 0.2], vec![0.3, 0.6], 6)?;
            let a = log_det_for_spec(&spec, c)?;
            let b = log_det_for_spec(&spec.reflected(), c)?;
            Ok(verdict(diff(&a.log_value, &b.log_value), &t.exact))
        })),
        ("orthopoly.hermite", Box::new(move || {
            let n = 8;
            let table = moment_table(&WeightSpec::gaussian(n)?, 2 * n, &c.at_least(working_digits(n, c)))?;
            let r = recurrence_from_moments(&table, n, c)?;
            let rb = r.bits();
            let mut worst = Float::with_val(rb, r.a[0].abs_ref());
            for j in 0..n {
                let b = (Float::with_val(rb, j + 1) / 2u32).sqrt();
                worst = worst.max(&diff(&r.b[j], &b)).max(&Float::with_val(rb, r.a[j].abs_ref()));
            }
            let pi = PrecisionContext::new(c.digits * 2)?.pi();
            let k0 = Float::with_val(rb, pi.sqrt().sqrt()).recip();
            worst = worst.max(&diff(&r.kappa[0], &k0));
            Ok(verdict(worst, &t.exact))
        })),
        ("orthopoly.christoffel_darboux", Box::new(move || {
            let n = 8;
            let spec = WeightSpec::new(vec![-0.4, 0.3], vec![0.5, 0.25], n)?;
            let table = moment_table(&spec, 2 * n, &c.at_least(working_digits(n, c)))?;
            let r = recurrence_from_moments(&table, n, c)?;
            let edge = 3.0 * (2.0 * n as f64).sqrt();
            let mut worst = Float::new(bits);
            for i in 0..5 {
                let x = -edge + 2.0 * edge * (i as f64 + 0.37) / 5.0;
                worst = worst.max(&christoffel_darboux_residual(&r, &Float::with_val(r.bits(), x), n)?);
            }
            Ok(verdict(worst, &t.third))
        })),
        ("orthopoly.coefficient_identities", Box::new(move || {
            let n = 8;
            let spec = WeightSpec::new(vec![-0.4, 0.3], vec![0.5, 0.25], n)?;
            let table = moment_table(&spec, 2 * n, &c.at_least(working_digits(n, c)))?;
            let r = recurrence_from_moments(&table, n, c)?;
            Ok(verdict(coefficient_identity_residual(&r), &t.exact))
        })),
        ("orthopoly.orthonormality", Box::new(move || {
            let n = 6;
            let spec = WeightSpec::new(vec![0.2], vec![0.6], n)?;
            let table = moment_table(&spec, 2 * n, &c.at_least(working_digits(n, c)))?;
            let r = recurrence_from_moments(&table, n, c)?;
            Ok(verdict(orthonormality_residual(&r, &spec, n, c)?, &t.third))
        })),
        ("specfun.gamma_recurrence", Box::new(move || {
            let mut worst = Float::new(bits);
            for x in [0.3, 1.7, 9.5] {
                let xf = Float::with_val(bits, x);
                let up = log_gamma(&Float::with_val(bits, &xf + 1u32), c)?;
                let here = log_gamma(&xf, c)?;
                worst = worst.max(&diff(&Float::with_val(bits, &up - &here), &xf.ln()));
            }
            Ok(verdict(worst, &t.exact))
        })),
        ("specfun.digamma_derivative", Box::new(move || {
            let h = pow10(bits, -f64::from(c.digits) / 3.0);
            let mut worst = Float::new(bits);
            for x in [0.3, 1.7, 9.5] {
                let xf = Float::with_val(bits, x);
                let hi = log_gamma(&Float::with_val(bits, &xf + &h), c)?;
                let lo = log_gamma(&Float::with_val(bits, &xf - &h), c)?;
                let fd = (hi - lo) / Float::with_val(bits, &h * 2u32);
                worst = worst.max(&diff(&fd, &digamma(&xf, c)?));
            }
            Ok(verdict(worst, &t.third))
        })),
        ("specfun.c_forms", Box::new(move || {
            let mut worst = Float::new(bits);
            for a in [-0.4, -0.1, 0.25, 0.5, 1.0, 1.5, 2.0] {
                let af = Float::with_val(bits, a);
                worst = worst.max(&diff(&log_c_integral(&af, c)?, &log_c_barnes(&af, c)?));
            }
            let four = log_c_integral(&Float::with_val(bits, 1), c)?;
            worst = worst.max(&diff(&four, &Float::with_val(bits, 4).ln()));
            Ok(verdict(worst, &t.exact))
        })),
        ("specfun.barnes_recurrence", Box::new(move || {
            let mut worst = Float::new(bits);
            for x in [0.25, 0.5, 1.5, 2.5, 4.0, 5.0] {
                let xf = Float::with_val(bits, x);
                let up = log_barnes_g(&Float::with_val(bits, &xf + 1u32), c)?;
                let expect = log_gamma(&xf, c)? + log_barnes_g(&xf, c)?;
                worst = worst.max(&diff(&up, &expect));
            }
            Ok(verdict(worst, &t.exact))
        })),
        ("specfun.g_half_identity", Box::new(move || {
            let lhs = log_barnes_g(&Float::with_val(bits, 0.5), c)? * 2u32;
            let ln2 = Float::with_val(bits, 2).ln();
            let ln_sqrt_pi = c.pi().ln() / 2u32;
            let rhs = ln2 / 12u32 - ln_sqrt_pi + zeta_prime_minus1(c).value * 3u32;
            Ok(verdict(diff(&lhs, &rhs), &t.exact))
        })),
        ("asymptotics.g_jump", Box::new(move || {
            let qc = PrecisionContext::new(40)?;
            let eq = EquilibriumData::new(qc.bits());
            let tol = Float::with_val(qc.bits(), 1e-10);
            let mut worst = Float::new(qc.bits());
            for x in [-0.9, -0.3, 0.2, 0.75] {
                let xf = Float::with_val(qc.bits(), x);
                let gp = g_boundary(&xf, true, &qc)?;
                let gm = g_boundary(&xf, false, &qc)?;
                let sum = gp.add(&gm);
                let target = Float::with_val(qc.bits(), xf.square_ref()) * 2u32 + eq.l_const();
                let jump = gp.sub(&gm);
                let two_pi_tail = equilibrium_tail(&xf)? * qc.pi() * 2u32;
                for v in [diff(&sum.re, &target), sum.im.abs(), jump.re.abs(), diff(&jump.im, &two_pi_tail)] {
                    worst = worst.max(&v);
                }
            }
            Ok(verdict(worst, &tol))
        })),
        ("asymptotics.szego_boundary", Box::new(move || {
            let spec = WeightSpec::new(vec![-0.4, 0.3], vec![0.5, -0.3], 8)?;
            let mut worst = Float::new(bits);
            for x in [-0.7, 0.1, 0.35, 0.9] {
                let xf = Float::with_val(bits, x);
                let p = szego_boundary(&xf, &spec, true)?.mul(&szego_boundary(&xf, &spec, false)?);
                let mut log_w = Float::new(bits);
                for (&l, &a) in spec.lambdas().iter().zip(spec.alphas()) {
                    log_w += Float::with_val(bits, &xf - l).abs().ln() * (2.0 * a);
                }
                worst = worst.max(&rel(&p.re, &log_w.exp())).max(&p.im.abs());
            }
            Ok(verdict(worst, &t.exact))
        })),
        ("asymptotics.bulk_permutation", Box::new(move || {
            let a = WeightSpec::new(vec![-0.4, 0.3, 0.6], vec![0.5, 1.0, -0.2], 16)?;
            let b = WeightSpec::new(vec![0.6, -0.4, 0.3], vec![-0.2, 0.5, 1.0], 16)?;
            let x = theorem1_log(&a, c)?.log_value;
            let y = theorem1_log(&b, c)?.log_value;
            Ok(verdict(diff(&x, &y), &t.exact))
        })),
        ("asymptotics.hermite_reduction", Box::new(move || {
            let n = 12;
            let p = coeff_asym(&WeightSpec::new(vec![0.3], vec![0.0], n)?, c)?;
            let ln_expect = Float::with_val(bits, n - 1) * Float::with_val(bits, 2).ln()
                - c.pi().ln() / 2u32
                - log_gamma(&Float::with_val(bits, n), c)?;
            let mut worst = diff(&p.log_kappa2, &ln_expect);
            worst = worst.max(&Float::with_val(bits, p.beta.abs_ref()));
            worst = worst.max(&diff(&p.gamma, &Float::with_val(bits, -((n * (n - 1)) as f64) / 4.0)));
            Ok(verdict(worst, &t.exact))
        })),
        ("mc.determinism", Box::new(move || {
            let spec = WeightSpec::new(vec![0.2], vec![1.0], 3)?;
            let a = mc_average_log(&spec, 2000, 17)?;
            let b = mc_average_log(&spec, 2000, 17)?;
            let trivial = mc_average_log(&WeightSpec::new(vec![0.2], vec![0.0], 3)?, 1000, 17)?;
            let ok = a == b && a.stderr_rel > 0.0 && trivial.mean_log == 0.0;
            Ok((ok, format!("mean_log {:.6}, stderr_rel {:.3e}", a.mean_log, a.stderr_rel)))
        })),
    ];

    let mut out = Vec::with_capacity(checks.len());
    for (name, check) in checks {
        let (passed, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        out.push(CheckOutcome { name, passed, detail });
    }
    Ok(out)
}
