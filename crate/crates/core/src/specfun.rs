//! Extended-precision special functions: log-Gamma, digamma, the Barnes
//! G-function, the Fisher-Hartwig constant `C(alpha)` and `zeta'(-1)`.

use std::sync::OnceLock;

use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::error::{LabError, Result};
use crate::precision::PrecisionContext;
use crate::quadrature::GaussLegendre;

/// Number of Bernoulli numbers `B_2, B_4, ...` kept in the shared table.
const BERNOULLI_COUNT: usize = 160;

/// `B_{2k}` for `k = 1..=BERNOULLI_COUNT`, exact.
fn bernoulli_table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = BERNOULLI_COUNT;
        // tangent numbers T_1..T_n
        let mut t = vec![Integer::new(); n + 1];
        t[1] = Integer::from(1);
        for k in 2..=n {
            t[k] = Integer::from(&t[k - 1] * (k as u32 - 1));
        }
        for k in 2..=n {
            for j in k..=n {
                let a = Integer::from(&t[j - 1] * (j - k) as u32);
                let b = Integer::from(&t[j] * (j - k + 2) as u32);
                t[j] = a + b;
            }
        }
        (1..=n)
            .map(|k| {
                let four_k = Integer::from(1) << (2 * k as u32);
                let den = four_k.clone() * (four_k - 1u32);
                let mut num = Integer::from(&t[k] * (2 * k as u32));
                if k % 2 == 0 {
                    num = -num;
                }
                Rational::from((num, den))
            })
            .collect()
    })
}

/// `B_{2k}` as an exact rational, `k >= 1`.
pub fn bernoulli_even(k: usize) -> Option<&'static Rational> {
    bernoulli_table().get(k.checked_sub(1)?)
}

fn digits_of(bits: u32) -> f64 {
    f64::from(bits) / std::f64::consts::LOG2_10
}

fn require_positive(function: &'static str, x: &Float) -> Result<()> {
    if x.is_finite() && *x > 0 {
        Ok(())
    } else {
        Err(LabError::Domain {
            function,
            detail: format!("x = {} must be positive", x.to_f64()),
        })
    }
}

/// `ln Gamma(x)` for `x > 0`: upward shift followed by the Stirling series.
pub fn log_gamma(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    require_positive("log_gamma", x)?;
    let bits = ctx.bits();
    let mut shift_to = 2.0 * digits_of(bits) + 10.0;
    loop {
        if let Some(v) = log_gamma_shifted(x, bits, shift_to) {
            return Ok(v);
        }
        shift_to *= 2.0;
    }
}

fn log_gamma_shifted(x: &Float, bits: u32, shift_to: f64) -> Option<Float> {
    let mut y = Float::with_val(bits, x);
    let mut prod = Float::with_val(bits, 1u32);
    while y.to_f64() < shift_to {
        prod *= &y;
        y += 1u32;
    }
    let eps = Float::with_val(bits, 1u32) >> bits;
    let ln_y = Float::with_val(bits, y.ln_ref());
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let mut sum = Float::with_val(bits, &y - 0.5f64) * &ln_y - &y + two_pi.ln() / 2u32;
    let y2 = Float::with_val(bits, y.square_ref());
    let mut ypow = y.clone(); // y^{2k-1}
    let mut converged = false;
    for (i, b) in bernoulli_table().iter().enumerate() {
        let k = (i + 1) as u32;
        let term = Float::with_val(bits, b) / (2 * k * (2 * k - 1)) / &ypow;
        sum += &term;
        if term.abs() <= Float::with_val(bits, &eps * &sum).abs() {
            converged = true;
            break;
        }
        ypow *= &y2;
    }
    if !converged {
        return None;
    }
    Some(sum - prod.ln())
}

/// `psi(x) = Gamma'(x)/Gamma(x)` for `x > 0`.
pub fn digamma(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    require_positive("digamma", x)?;
    let bits = ctx.bits();
    let mut shift_to = 2.0 * digits_of(bits) + 10.0;
    loop {
        if let Some(v) = digamma_shifted(x, bits, shift_to) {
            return Ok(v);
        }
        shift_to *= 2.0;
    }
}

fn digamma_shifted(x: &Float, bits: u32, shift_to: f64) -> Option<Float> {
    let mut y = Float::with_val(bits, x);
    let mut recip = Float::new(bits);
    while y.to_f64() < shift_to {
        recip += Float::with_val(bits, y.recip_ref());
        y += 1u32;
    }
    let eps = Float::with_val(bits, 1u32) >> bits;
    let mut sum = Float::with_val(bits, y.ln_ref()) - Float::with_val(bits, y.recip_ref()) / 2u32;
    let y2 = Float::with_val(bits, y.square_ref());
    let mut ypow = y2.clone(); // y^{2k}
    let mut converged = false;
    for (i, b) in bernoulli_table().iter().enumerate() {
        let k = (i + 1) as u32;
        let term = Float::with_val(bits, b) / (2 * k) / &ypow;
        sum -= &term;
        if term.abs() <= Float::with_val(bits, &eps * &sum).abs() {
            converged = true;
            break;
        }
        ypow *= &y2;
    }
    if !converged {
        return None;
    }
    Some(sum - recip)
}

/// Gauss-Legendre order for analytic integrands whose nearest singularity
/// sits at least one chunk half-length beyond the chunk.
fn gl_order(bits: u32) -> usize {
    digits_of(bits).ceil() as usize + 10
}

/// `int_0^z f(t) dt` split into chunks of length at most 2, for `z >= 0` or
/// small negative `z`.
fn chunked_integral<F>(z: &Float, gl: &GaussLegendre, mut f: F) -> Float
where
    F: FnMut(&Float) -> Float,
{
    let bits = z.prec();
    let zero = Float::new(bits);
    if *z <= 0 {
        return -gl.integrate(z, &zero, &mut f);
    }
    let mut total = Float::new(bits);
    let mut a = zero;
    while a < *z {
        let mut b = Float::with_val(bits, &a + 2u32);
        if b > *z {
            b = z.clone();
        }
        total += gl.integrate(&a, &b, &mut f);
        a = b;
    }
    total
}

/// `ln G(x)` for `x > 0`, from
/// `int_0^z lnGamma(t+1) dt = (z/2) ln 2pi - z(z+1)/2 + z lnGamma(z+1) - ln G(z+1)`
/// with the integral evaluated by Gauss-Legendre. Arguments below 1 are
/// lifted with `G(x+1) = Gamma(x) G(x)`.
pub fn log_barnes_g(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    require_positive("log_barnes_g", x)?;
    if *x < 1 {
        let up = Float::with_val(ctx.bits(), x + 1u32);
        return Ok(log_barnes_g(&up, ctx)? - log_gamma(x, ctx)?);
    }
    let bits = ctx.bits();
    let z = Float::with_val(bits, x - 1u32);
    let gl = GaussLegendre::new(gl_order(bits), bits);
    let mut failure = None;
    let integral = chunked_integral(&z, &gl, |t| {
        let arg = Float::with_val(bits, t + 1u32);
        match log_gamma(&arg, ctx) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                Float::new(bits)
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let zp1 = Float::with_val(bits, &z + 1u32);
    let value = Float::with_val(bits, &z * two_pi.ln()) / 2u32
        - Float::with_val(bits, &z * &zp1) / 2u32
        + Float::with_val(bits, &z * log_gamma(&zp1, ctx)?)
        - integral;
    Ok(value)
}

fn require_alpha(function: &'static str, alpha: &Float) -> Result<()> {
    if alpha.is_finite() && *alpha > -0.5f64 {
        Ok(())
    } else {
        Err(LabError::Domain {
            function,
            detail: format!("alpha = {} must exceed -1/2", alpha.to_f64()),
        })
    }
}

/// `ln C(alpha)` from the integral representation
/// `C = Gamma(alpha+1/2)^{-2 alpha} exp(2 int_0^alpha lnGamma(s+1/2) ds + alpha^2)`.
///
/// The integrand is split as `lnGamma(s+3/2) - ln(s+1/2)`; the logarithm is
/// integrated in closed form so the quadrature only sees an analytic function.
pub fn log_c_integral(alpha: &Float, ctx: &PrecisionContext) -> Result<Float> {
    require_alpha("log_c_integral", alpha)?;
    let bits = ctx.bits();
    if alpha.is_zero() {
        return Ok(Float::new(bits));
    }
    let gl = GaussLegendre::new(gl_order(bits), bits);
    let mut failure = None;
    let smooth = chunked_integral(alpha, &gl, |s| {
        let arg = Float::with_val(bits, s + 1.5f64);
        match log_gamma(&arg, ctx) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                Float::new(bits)
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    // int_0^alpha ln(s + 1/2) ds
    let ap = Float::with_val(bits, alpha + 0.5f64);
    let half = Float::with_val(bits, 0.5f64);
    let log_part = Float::with_val(bits, &ap * ap.clone().ln()) - alpha - Float::with_val(bits, &half * half.clone().ln());
    let integral = smooth - log_part;
    let lg = log_gamma(&ap, ctx)?;
    Ok(Float::with_val(bits, alpha * lg) * -2i32
        + integral * 2u32
        + Float::with_val(bits, alpha.square_ref()))
}

/// `ln C(alpha) = 2 alpha^2 ln 2 + 2 ln G(alpha+1) - ln G(2 alpha+1)`.
pub fn log_c_barnes(alpha: &Float, ctx: &PrecisionContext) -> Result<Float> {
    require_alpha("log_c_barnes", alpha)?;
    let bits = ctx.bits();
    let ln2 = Float::with_val(bits, Constant::Log2);
    let g1 = log_barnes_g(&Float::with_val(bits, alpha + 1u32), ctx)?;
    let g2 = log_barnes_g(&(Float::with_val(bits, alpha * 2u32) + 1u32), ctx)?;
    Ok(Float::with_val(bits, alpha.square_ref()) * ln2 * 2u32 + g1 * 2u32 - g2)
}

/// `ln C(alpha)`: the integral form, accepted only when the Barnes form
/// agrees with it to the context tolerance.
pub fn log_c(alpha: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let integral = log_c_integral(alpha, ctx)?;
    let barnes = log_c_barnes(alpha, ctx)?;
    let scale = Float::with_val(ctx.bits(), integral.abs_ref()).max(&ctx.float(1.0));
    let diff = Float::with_val(ctx.bits(), &integral - &barnes).abs();
    if diff > ctx.target_tol() * scale {
        return Err(LabError::Consistency(format!(
            "C({}) integral and Barnes forms differ by {:.3e}",
            alpha.to_f64(),
            diff.to_f64()
        )));
    }
    Ok(integral)
}

/// A named constant together with how it was obtained.
#[derive(Debug, Clone)]
pub struct SpecialConstant {
    pub name: &'static str,
    pub value: Float,
    pub derivation: &'static str,
}

/// `zeta'(-1)` by Euler-Maclaurin summation of the derivative of the Hurwitz
/// tail of `sum k^{-s}` at `s = -1`.
pub fn zeta_prime_minus1(ctx: &PrecisionContext) -> SpecialConstant {
    let bits = ctx.bits();
    let cutoff = digits_of(bits).ceil() as u32 + 10;
    let nf = Float::with_val(bits, cutoff);
    let ln_n = Float::with_val(bits, nf.ln_ref());
    let mut value = Float::new(bits);
    for k in 2..cutoff {
        let kf = Float::with_val(bits, k);
        value -= Float::with_val(bits, kf.ln_ref()) * k;
    }
    let n2 = Float::with_val(bits, nf.square_ref());
    value += Float::with_val(bits, &n2 * &ln_n) / 2u32;
    value -= Float::with_val(bits, &n2 / 4u32);
    value -= Float::with_val(bits, &nf * &ln_n) / 2u32;
    value += (Float::with_val(bits, 1u32) + &ln_n) / 12u32;
    let eps = Float::with_val(bits, 1u32) >> bits;
    let mut npow = n2.clone(); // N^{2j-2}
    for (i, b) in bernoulli_table().iter().enumerate().skip(1) {
        let j = (i + 1) as u32;
        let denom = (2 * j) * (2 * j - 1) * (2 * j - 2);
        let term = Float::with_val(bits, b) / denom / &npow;
        value -= &term;
        if term.abs() <= eps {
            break;
        }
        npow *= &n2;
    }
    SpecialConstant {
        name: "zeta'(-1)",
        value,
        derivation: "Euler-Maclaurin expansion of the Hurwitz tail, differentiated at s = -1",
    }
}

/// Helper for callers holding `f64` parameters.
pub fn float_of(ctx: &PrecisionContext, v: f64) -> Float {
    Float::with_val(ctx.bits(), v)
}
