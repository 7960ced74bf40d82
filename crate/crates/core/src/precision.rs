//! Working-precision bookkeeping shared by every extended-precision routine.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{LabError, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Minimum working precision accepted by the pipeline, in decimal digits.
pub const MIN_DIGITS: u32 = 30;
/// Minimum number of internal guard digits.
pub const MIN_GUARD: u32 = 10;

/// Working precision (decimal digits), internal guard digits and the
/// relative tolerance `10^-tol_digits` that results must meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    pub digits: u32,
    pub guard_digits: u32,
    tol_digits: f64,
}

impl PrecisionContext {
    /// Context with the default tolerance `10^-(digits - guard)`.
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, MIN_GUARD)
    }

    pub fn with_guard(digits: u32, guard_digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(LabError::InvalidPrecision(format!(
                "digits = {digits}, need at least {MIN_DIGITS}"
            )));
        }
        if guard_digits < MIN_GUARD {
            return Err(LabError::InvalidPrecision(format!(
                "guard_digits = {guard_digits}, need at least {MIN_GUARD}"
            )));
        }
        Ok(Self {
            digits,
            guard_digits,
            tol_digits: f64::from(digits) - f64::from(guard_digits),
        })
    }

    /// Loosen (or tighten, down to the invariant bound) the target tolerance.
    pub fn with_tolerance_digits(mut self, tol_digits: f64) -> Result<Self> {
        let max = f64::from(self.digits) - f64::from(self.guard_digits);
        if !(tol_digits > 0.0) || tol_digits > max {
            return Err(LabError::InvalidPrecision(format!(
                "tolerance 1e-{tol_digits} outside (0, 1e-{max}]"
            )));
        }
        self.tol_digits = tol_digits;
        Ok(self)
    }

    /// `-log10` of the target relative tolerance.
    pub fn tol_digits(&self) -> f64 {
        self.tol_digits
    }

    /// Mantissa bits used for the working precision, guard digits included.
    pub fn bits(&self) -> u32 {
        (f64::from(self.digits + self.guard_digits) * LOG2_10).ceil() as u32 + 8
    }

    /// Target tolerance `10^-tol_digits` as an extended real.
    pub fn target_tol(&self) -> Float {
        pow10(self.bits(), -self.tol_digits)
    }

    /// Unit roundoff at the working precision (guard digits included).
    pub fn epsilon(&self) -> Float {
        pow10(self.bits(), -f64::from(self.digits + self.guard_digits))
    }

    /// Same guard digits, `digits` raised to at least `min_digits`; the
    /// tolerance is kept.
    pub fn at_least(&self, min_digits: u32) -> Self {
        Self {
            digits: self.digits.max(min_digits),
            ..*self
        }
    }

    /// Reference pass: `factor` times the digits and the default tolerance
    /// for the new digit count.
    pub fn scaled(&self, factor: u32) -> Self {
        let digits = self.digits * factor;
        Self {
            digits,
            guard_digits: self.guard_digits,
            tol_digits: f64::from(digits) - f64::from(self.guard_digits),
        }
    }

    pub fn float(&self, value: f64) -> Float {
        Float::with_val(self.bits(), value)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits())
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }
}

/// `10^e` at `bits` of precision, for real `e`.
pub fn pow10(bits: u32, e: f64) -> Float {
    let ten = Float::with_val(bits, 10);
    let e = Float::with_val(bits, e);
    ten.pow(&e)
}

/// `-log10 |x|`, saturating at `cap` for zero.
pub fn agreement_digits(diff: &Float, cap: f64) -> f64 {
    if diff.is_zero() {
        return cap;
    }
    let d = -diff.clone().abs().log10().to_f64();
    d.min(cap)
}

/// Parse a decimal literal at `bits` of precision.
pub fn parse_float(bits: u32, text: &str) -> Option<Float> {
    Float::parse(text).ok().map(|p| Float::with_val(bits, p))
}

/// Scientific notation with `sig` significant digits, lowercase `e` and a
/// signed exponent.
pub fn format_sci(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return format!("0.{}e+0", "0".repeat(sig - 1));
    }
    // value = 0.DIGITS * 10^exp
    let (negative, digits, exp) = x.to_sign_string_exp(10, Some(sig));
    let exp = exp.unwrap_or(0) - 1;
    let (lead, rest) = digits.split_at(1);
    format!("{}{lead}.{rest}e{exp:+}", if negative { "-" } else { "" })
}
