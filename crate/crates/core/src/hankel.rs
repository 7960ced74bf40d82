//! Exact finite-n quantities: the Hankel determinant `D_n = det(M_{i+j})`,
//! its Gaussian (Selberg) value, and the characteristic-polynomial average
//! `ln D_n(alpha) - ln D_n(0)`.
//!
//! Every determinant is computed twice, at the working precision and at
//! twice that, and accepted only when both agree to the target tolerance.
//! Moments are recomputed for each pass when the table knows its weight.

use rug::float::Constant;
use rug::Float;

use crate::error::{LabError, Result};
use crate::precision::{agreement_digits, PrecisionContext};
use crate::weights::{moment_table, MomentOrigin, MomentTable, WeightSpec};

/// Number of times the working precision may be doubled after a failed
/// agreement check.
pub const MAX_ESCALATIONS: u32 = 3;

/// Natural logarithm of a Hankel determinant.
#[derive(Debug, Clone)]
pub struct LogDeterminant {
    pub log_value: Float,
    pub n: usize,
    /// Digits of the working pass that was accepted.
    pub precision_used: u32,
    /// Decimal digits of agreement between the two passes.
    pub agreement_digits: f64,
}

/// Starting working precision for an `n x n` Hankel determinant.
pub fn working_digits(n: usize, ctx: &PrecisionContext) -> u32 {
    ctx.digits.max(20 + (2.5 * n as f64).ceil() as u32)
}

/// `ln det(M_{i+j})_{i,j<n}` by LU factorisation without pivoting, all
/// arithmetic at `bits`. Returns the index of the first non-positive pivot
/// on failure.
pub fn lu_log_det(moments: &[Float], n: usize, bits: u32) -> std::result::Result<Float, usize> {
    let mut a: Vec<Vec<Float>> = (0..n)
        .map(|i| (0..n).map(|j| Float::with_val(bits, &moments[i + j])).collect())
        .collect();
    let mut log_det = Float::new(bits);
    for k in 0..n {
        if !(a[k][k] > 0) {
            return Err(k);
        }
        log_det += Float::with_val(bits, a[k][k].ln_ref());
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail.iter_mut() {
            let factor = Float::with_val(bits, &row[k] / &pivot_row[k]);
            for j in k + 1..n {
                let t = Float::with_val(bits, &factor * &pivot_row[j]);
                row[j] -= t;
            }
        }
    }
    Ok(log_det)
}

/// Produces moment tables at requested precisions, reusing a table that is
/// already precise enough.
pub(crate) struct MomentSource<'a> {
    table: &'a MomentTable,
    k_max: usize,
    cache: Vec<MomentTable>,
}

impl<'a> MomentSource<'a> {
    pub(crate) fn new(table: &'a MomentTable, k_max: usize) -> Self {
        Self {
            table,
            k_max,
            cache: Vec::new(),
        }
    }

    pub(crate) fn at(&mut self, ctx: &PrecisionContext) -> Result<Vec<Float>> {
        let bits = ctx.bits();
        let spec = match &self.table.origin {
            MomentOrigin::Quadrature(spec) if self.table.digits < ctx.digits => spec.clone(),
            _ => {
                return Ok(self.table.values[..=self.k_max]
                    .iter()
                    .map(|v| Float::with_val(bits, v))
                    .collect())
            }
        };
        if let Some(t) = self.cache.iter().find(|t| t.digits >= ctx.digits) {
            return Ok(t.values.iter().map(|v| Float::with_val(bits, v)).collect());
        }
        let t = moment_table(&spec, self.k_max, ctx)?;
        let out = t.values.iter().map(|v| Float::with_val(bits, v)).collect();
        self.cache.push(t);
        Ok(out)
    }
}

/// `ln D_n` for the Hankel matrix of `moments`, with two-precision
/// acceptance and up to [`MAX_ESCALATIONS`] doublings of the precision.
pub fn hankel_log_determinant(
    moments: &MomentTable,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<LogDeterminant> {
    if n == 0 {
        return Err(LabError::InvalidSpec("determinant size must be positive".into()));
    }
    moments.require(2 * n - 2)?;
    let tol = ctx.target_tol();
    let mut source = MomentSource::new(moments, 2 * n - 2);
    let mut working = ctx.at_least(working_digits(n, ctx));
    let mut last_diff = None;
    for _ in 0..=MAX_ESCALATIONS {
        let reference = working.scaled(2);
        let low = lu_log_det(&source.at(&working)?, n, working.bits());
        let high = lu_log_det(&source.at(&reference)?, n, reference.bits());
        match (low, high) {
            (Ok(low), Ok(high)) => {
                let diff = Float::with_val(reference.bits(), &high - &low).abs();
                if diff <= tol {
                    return Ok(LogDeterminant {
                        log_value: high,
                        n,
                        precision_used: working.digits,
                        agreement_digits: agreement_digits(&diff, f64::from(working.digits)),
                    });
                }
                log::debug!(
                    "n = {n}: passes at {} and {} digits differ by {:.3e}, escalating",
                    working.digits,
                    reference.digits,
                    diff.to_f64()
                );
                last_diff = Some(diff.to_f64());
            }
            (Err(pivot), Err(_)) => return Err(LabError::NumericallySingular { n, pivot }),
            _ => {}
        }
        working = working.scaled(2);
    }
    Err(LabError::PrecisionUnreachable {
        stage: "Hankel determinant",
        reached: format!(
            "{} digits, last pass difference {:?}",
            working.digits, last_diff
        ),
    })
}

/// Exact `ln D_n(0,...,0) = (n/2) ln 2pi - (n^2/2) ln 2 + sum_{j<n} ln j!`.
pub fn selberg_log(n: usize, bits: u32) -> Result<Float> {
    if n == 0 {
        return Err(LabError::InvalidSpec("selberg_log needs n >= 1".into()));
    }
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let ln2 = Float::with_val(bits, Constant::Log2);
    let nf = n as u64;
    let mut value = two_pi.ln() * nf / 2u32 - ln2 * (nf * nf) / 2u32;
    let mut ln_fact = Float::new(bits);
    for j in 1..n {
        ln_fact += Float::with_val(bits, j).ln();
        value += &ln_fact;
    }
    Ok(value)
}

/// `ln D_n` for the weight of `spec` at the size `spec.n()`.
pub fn log_det_for_spec(spec: &WeightSpec, ctx: &PrecisionContext) -> Result<LogDeterminant> {
    let n = spec.n();
    let working = ctx.at_least(working_digits(n, ctx));
    let table = moment_table(spec, 2 * n - 2, &working)?;
    hankel_log_determinant(&table, n, ctx)
}

/// `ln <prod_j |det(H - mu_j)|^{2 alpha_j}>_GUE = ln D_n(alpha) - ln D_n(0)`.
pub fn char_poly_average_log(spec: &WeightSpec, ctx: &PrecisionContext) -> Result<Float> {
    let n = spec.n();
    let bits = ctx.scaled(2).bits();
    if spec.is_trivial() {
        return Ok(Float::new(bits));
    }
    let det = log_det_for_spec(spec, ctx)?;
    Ok(det.log_value - selberg_log(n, bits)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn gaussian_table(k_max: usize, bits: u32) -> MomentTable {
        // M_{2k} = Gamma(k + 1/2) = (2k-1)!! sqrt(pi) / 2^k
        let sqrt_pi = Float::with_val(bits, Constant::Pi).sqrt();
        let mut values = Vec::new();
        let mut even = sqrt_pi;
        for k in 0..=k_max {
            if k % 2 == 0 {
                values.push(even.clone());
                even *= Float::with_val(bits, k + 1) / 2u32;
            } else {
                values.push(Float::new(bits));
            }
        }
        MomentTable::from_values(values, 200)
    }

    #[test]
    fn one_by_one_is_log_m0() {
        let c = ctx();
        let spec = WeightSpec::new(vec![0.2], vec![0.4], 1).unwrap();
        let table = moment_table(&spec, 0, &c.at_least(60)).unwrap();
        let d = hankel_log_determinant(&table, 1, &c).unwrap();
        let expect = table.values[0].clone().ln();
        assert!(Float::with_val(300, &d.log_value - &expect).abs() < 1e-29);
    }

    #[test]
    fn two_by_two_gaussian() {
        let c = ctx();
        let d = hankel_log_determinant(&gaussian_table(2, 700), 2, &c).unwrap();
        let expect = (Float::with_val(300, Constant::Pi) / 2u32).ln();
        assert!(Float::with_val(300, &d.log_value - &expect).abs() < 1e-60);
        assert!(d.agreement_digits >= c.tol_digits());
    }

    #[test]
    fn selberg_small_values() {
        let bits = 300;
        let pi = Float::with_val(bits, Constant::Pi);
        let one = selberg_log(1, bits).unwrap();
        assert!(Float::with_val(bits, &one - pi.clone().sqrt().ln()).abs() < 1e-80);
        let two = selberg_log(2, bits).unwrap();
        assert!(Float::with_val(bits, &two - (pi.clone() / 2u32).ln()).abs() < 1e-80);
        // (2 pi)^{3/2} 2^{-9/2} 1! 2!
        let three = selberg_log(3, bits).unwrap();
        let expect = (pi * 2u32).pow(1.5f64) * Float::with_val(bits, 2).pow(-4.5f64) * 2u32;
        assert!(Float::with_val(bits, &three - expect.ln()).abs() < 1e-80);
        assert!(selberg_log(0, bits).is_err());
    }

    #[test]
    fn gaussian_determinants_match_selberg() {
        let c = ctx();
        let table = gaussian_table(2 * 12, 700);
        for n in 1..=12 {
            let d = hankel_log_determinant(&table, n, &c).unwrap();
            let s = selberg_log(n, 700).unwrap();
            assert!(Float::with_val(700, &d.log_value - &s).abs() < 1e-30, "n = {n}");
        }
    }

    #[test]
    fn short_table_is_a_dimension_error() {
        let c = ctx();
        let r = hankel_log_determinant(&gaussian_table(5, 300), 4, &c);
        assert!(matches!(r, Err(LabError::Dimension { needed: 6, .. })));
    }

    #[test]
    fn indefinite_matrix_is_singular() {
        let c = ctx();
        let vals = [1.0, 2.0, 1.0].iter().map(|&v| Float::with_val(200, v)).collect();
        let r = hankel_log_determinant(&MomentTable::from_values(vals, 200), 2, &c);
        assert!(matches!(r, Err(LabError::NumericallySingular { n: 2, pivot: 1 })));
    }

    #[test]
    fn trivial_average_is_zero() {
        let c = ctx();
        let spec = WeightSpec::new(vec![0.4], vec![0.0], 6).unwrap();
        assert!(char_poly_average_log(&spec, &c).unwrap().is_zero());
    }

    #[test]
    fn one_point_n1_average() {
        // <|x|^2> over N(0, 1/2) = Gamma(3/2)/Gamma(1/2) = 1/2
        let c = ctx();
        let spec = WeightSpec::new(vec![0.0], vec![1.0], 1).unwrap();
        let v = char_poly_average_log(&spec, &c).unwrap();
        let expect = Float::with_val(v.prec(), 0.5f64).ln();
        assert!(Float::with_val(v.prec(), &v - &expect).abs() < 1e-29);
    }

    #[test]
    fn reflection_leaves_determinant_unchanged() {
        let c = ctx();
        let spec = WeightSpec::new(vec![-0.5, 0.2], vec![0.3, -0.2], 6).unwrap();
        let a = log_det_for_spec(&spec, &c).unwrap();
        let b = log_det_for_spec(&spec.reflected(), &c).unwrap();
        assert!(Float::with_val(a.log_value.prec(), &a.log_value - &b.log_value).abs() < 1e-29);
    }
}
