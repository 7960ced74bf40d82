//! Orthonormal polynomials of the weight, built from its moments.
//!
//! The Jacobi coefficients come from the Chebyshev moment algorithm run at
//! extended precision, twice, with the same acceptance rule as the
//! determinant. Leading and subleading coefficients follow from the
//! recurrence.

use rug::Float;

use crate::error::{LabError, Result};
use crate::hankel::{working_digits, MomentSource, MAX_ESCALATIONS};
use crate::precision::{agreement_digits, PrecisionContext};
use crate::weights::{integrate_weighted, MomentTable, WeightSpec};

/// Jacobi data of the weight: `x p_j = b_{j-1} p_{j-1} + a_j p_j + b_j p_{j+1}`,
/// with `p_j = kappa_j x^j + ...` and monic expansion
/// `p_j / kappa_j = x^j + beta_j x^{j-1} + gamma_j x^{j-2} + ...`.
#[derive(Debug, Clone)]
pub struct RecurrenceData {
    /// `a_0..a_{n-1}`
    pub a: Vec<Float>,
    /// `b_0..b_{n-1}`
    pub b: Vec<Float>,
    /// `kappa_0..kappa_n`
    pub kappa: Vec<Float>,
    /// `beta_0..beta_n`
    pub beta: Vec<Float>,
    /// `gamma_0..gamma_n`
    pub gamma: Vec<Float>,
    pub n: usize,
    pub spec: Option<WeightSpec>,
    pub precision_used: u32,
    pub agreement_digits: f64,
}

impl RecurrenceData {
    pub fn bits(&self) -> u32 {
        self.b[0].prec()
    }
}

/// Chebyshev algorithm on ordinary moments `M_0..M_{2n}`. Returns `(a, b)`,
/// or the index of the first monic norm `int pi_k^2 w` that is not positive.
fn chebyshev(
    m: &[Float],
    n: usize,
    bits: u32,
) -> std::result::Result<(Vec<Float>, Vec<Float>), usize> {
    let big = 2 * n;
    if !(m[0] > 0) {
        return Err(0);
    }
    let mut prev: Vec<Float> = vec![Float::new(bits); big + 2];
    let mut cur: Vec<Float> = m.iter().take(big + 1).map(|v| Float::with_val(bits, v)).collect();
    cur.push(Float::new(bits));
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    a.push(Float::with_val(bits, &m[1] / &m[0]));
    let mut beta_prev = Float::new(bits);
    for k in 1..=n {
        let mut next = vec![Float::new(bits); big + 2];
        for l in k..=big - k {
            let mut s = Float::with_val(bits, &cur[l + 1]);
            s -= Float::with_val(bits, &a[k - 1] * &cur[l]);
            if k >= 2 {
                s -= Float::with_val(bits, &beta_prev * &prev[l]);
            }
            next[l] = s;
        }
        if !(next[k] > 0) {
            return Err(k);
        }
        let beta = Float::with_val(bits, &next[k] / &cur[k - 1]);
        b.push(Float::with_val(bits, beta.sqrt_ref()));
        if k < n {
            let ak = Float::with_val(bits, &next[k + 1] / &next[k])
                - Float::with_val(bits, &cur[k] / &cur[k - 1]);
            a.push(ak);
        }
        beta_prev = beta;
        prev = cur;
        cur = next;
    }
    Ok((a, b))
}

/// Largest coefficient change between two passes, relative to `b_j`.
fn pass_difference(lo: &(Vec<Float>, Vec<Float>), a: &[Float], b: &[Float], bits: u32) -> Float {
    let mut worst = Float::new(bits);
    for j in 0..b.len() {
        for (x, y) in [(&lo.1[j], &b[j]), (&lo.0[j], &a[j])] {
            let d = Float::with_val(bits, y - x).abs() / &b[j];
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Recurrence coefficients of the first `n` orthonormal polynomials, plus
/// `kappa`, `beta`, `gamma` up to index `n`. Needs `M_0..M_{2n}`.
pub fn recurrence_from_moments(
    moments: &MomentTable,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<RecurrenceData> {
    if n == 0 {
        return Err(LabError::InvalidSpec("recurrence needs n >= 1".into()));
    }
    moments.require(2 * n)?;
    let tol = ctx.target_tol();
    let mut source = MomentSource::new(moments, 2 * n);
    let mut working = ctx.at_least(working_digits(n, ctx));
    let mut last = String::from("no pass produced positive norms");
    for _ in 0..=MAX_ESCALATIONS {
        let reference = working.scaled(2);
        let hi_moments = source.at(&reference)?;
        let lo = chebyshev(&source.at(&working)?, n, working.bits());
        let hi = chebyshev(&hi_moments, n, reference.bits());
        match (lo, hi) {
            (Ok(lo), Ok((a, b))) => {
                let diff = pass_difference(&lo, &a, &b, reference.bits());
                if diff <= tol {
                    let mut data = assemble(a, b, &hi_moments[0], n, reference.bits());
                    data.spec = moments.spec().cloned();
                    data.precision_used = working.digits;
                    data.agreement_digits = agreement_digits(&diff, f64::from(working.digits));
                    return Ok(data);
                }
                last = format!("relative pass difference {:.3e}", diff.to_f64());
                log::debug!("recurrence n = {n} at {} digits: {last}", working.digits);
            }
            (Err(k), Err(_)) => last = format!("norm {k} not positive at both passes"),
            (Err(k), Ok(_)) | (Ok(_), Err(k)) => last = format!("norm {k} not positive at one pass"),
        }
        working = working.scaled(2);
    }
    Err(LabError::PrecisionUnreachable {
        stage: "moment-to-recurrence",
        reached: format!("{} digits, {last}", working.digits),
    })
}

fn assemble(a: Vec<Float>, b: Vec<Float>, m0: &Float, n: usize, bits: u32) -> RecurrenceData {
    let mut kappa = Vec::with_capacity(n + 1);
    kappa.push(Float::with_val(bits, m0.sqrt_ref()).recip());
    for j in 0..n {
        let next = Float::with_val(bits, &kappa[j] / &b[j]);
        kappa.push(next);
    }
    let mut data = RecurrenceData {
        a,
        b,
        kappa,
        beta: Vec::new(),
        gamma: Vec::new(),
        n,
        spec: None,
        precision_used: 0,
        agreement_digits: 0.0,
    };
    let (beta, gamma) = subleading_coefficients(&data);
    data.beta = beta;
    data.gamma = gamma;
    data
}

/// `-2 sum_{j<n} ln kappa_j`, which equals `ln D_n`.
pub fn kappa_logproduct(r: &RecurrenceData, n: usize) -> Result<Float> {
    if n > r.kappa.len() {
        return Err(LabError::Dimension {
            needed: n,
            available: r.kappa.len(),
        });
    }
    let bits = r.bits();
    let mut s = Float::new(bits);
    for k in &r.kappa[..n] {
        s += Float::with_val(bits, k.ln_ref());
    }
    Ok(s * -2i32)
}

/// `beta_0..beta_n` and `gamma_0..gamma_n` from
/// `beta_{j+1} = beta_j - a_j` and
/// `gamma_{j+1} = gamma_j - beta_j^2 + beta_j beta_{j+1} - b_{j-1}^2`.
pub fn subleading_coefficients(r: &RecurrenceData) -> (Vec<Float>, Vec<Float>) {
    let bits = r.bits();
    let n = r.a.len();
    let mut beta = vec![Float::new(bits)];
    for j in 0..n {
        let next = Float::with_val(bits, &beta[j] - &r.a[j]);
        beta.push(next);
    }
    let mut gamma = vec![Float::new(bits); 2.min(n + 1)];
    for j in 1..n {
        let mut g = Float::with_val(bits, &gamma[j]);
        g -= Float::with_val(bits, beta[j].square_ref());
        g += Float::with_val(bits, &beta[j] * &beta[j + 1]);
        g -= Float::with_val(bits, r.b[j - 1].square_ref());
        gamma.push(g);
    }
    (beta, gamma)
}

/// `p_0(x)..p_upto(x)` and their derivatives by the three-term recurrence.
pub fn eval_basis(r: &RecurrenceData, x: &Float, upto: usize) -> Result<(Vec<Float>, Vec<Float>)> {
    if upto > r.n {
        return Err(LabError::Dimension {
            needed: upto,
            available: r.n,
        });
    }
    let bits = r.bits();
    let x = Float::with_val(bits, x);
    let mut p = vec![r.kappa[0].clone()];
    let mut dp = vec![Float::new(bits)];
    for j in 0..upto {
        let shift = Float::with_val(bits, &x - &r.a[j]);
        let mut v = Float::with_val(bits, &shift * &p[j]);
        let mut dv = Float::with_val(bits, &shift * &dp[j]) + &p[j];
        if j > 0 {
            v -= Float::with_val(bits, &r.b[j - 1] * &p[j - 1]);
            dv -= Float::with_val(bits, &r.b[j - 1] * &dp[j - 1]);
        }
        p.push(v / &r.b[j]);
        dp.push(dv / &r.b[j]);
    }
    Ok((p, dp))
}

/// Relative residual of the Christoffel-Darboux identity
/// `sum_{j<n} p_j(x)^2 = b_{n-1} (p'_n p_{n-1} - p_n p'_{n-1})`.
pub fn christoffel_darboux_residual(r: &RecurrenceData, x: &Float, n: usize) -> Result<Float> {
    if n == 0 {
        return Err(LabError::InvalidSpec("Christoffel-Darboux needs n >= 1".into()));
    }
    let bits = r.bits();
    let (p, dp) = eval_basis(r, x, n)?;
    let mut lhs = Float::new(bits);
    for v in &p[..n] {
        lhs += Float::with_val(bits, v.square_ref());
    }
    let rhs = (Float::with_val(bits, &dp[n] * &p[n - 1]) - Float::with_val(bits, &p[n] * &dp[n - 1]))
        * &r.b[n - 1];
    Ok((Float::with_val(bits, &lhs - &rhs) / &lhs).abs())
}

/// Largest residual of the coefficient identities
/// `b_j = kappa_j / kappa_{j+1}`, `a_j = beta_j - beta_{j+1}` and
/// `b_{j-1}^2 = gamma_j - gamma_{j+1} - beta_j^2 + beta_j beta_{j+1}`,
/// each relative to `max(1, |lhs|)`.
pub fn coefficient_identity_residual(r: &RecurrenceData) -> Float {
    let bits = r.bits();
    let mut worst = Float::new(bits);
    let mut note = |lhs: &Float, rhs: Float| {
        let scale = Float::with_val(bits, lhs.abs_ref()).max(&Float::with_val(bits, 1));
        let d = (Float::with_val(bits, lhs - &rhs) / scale).abs();
        if d > worst {
            worst = d;
        }
    };
    let n = r.a.len();
    for j in 0..n {
        note(&r.b[j], Float::with_val(bits, &r.kappa[j] / &r.kappa[j + 1]));
        note(&r.a[j], Float::with_val(bits, &r.beta[j] - &r.beta[j + 1]));
        if j >= 1 {
            let b2 = Float::with_val(bits, r.b[j - 1].square_ref());
            let mut rhs = Float::with_val(bits, &r.gamma[j] - &r.gamma[j + 1]);
            rhs -= Float::with_val(bits, r.beta[j].square_ref());
            rhs += Float::with_val(bits, &r.beta[j] * &r.beta[j + 1]);
            note(&b2, rhs);
        }
    }
    worst
}

/// Largest `|int p_i p_j w - delta_ij|` over `i <= j < n`, by quadrature.
pub fn orthonormality_residual(
    r: &RecurrenceData,
    spec: &WeightSpec,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let bits = ctx.bits();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let q = integrate_weighted(spec, 2 * n, pairs.len(), ctx, |x, w| {
        let p = match eval_basis(r, x, n.saturating_sub(1)) {
            Ok((p, _)) => p,
            Err(_) => return vec![Float::new(bits); pairs.len()],
        };
        let pw: Vec<Float> = p.iter().map(|v| Float::with_val(bits, v * &w)).collect();
        pairs
            .iter()
            .map(|&(i, j)| Float::with_val(bits, &pw[i] * &p[j]))
            .collect()
    })?;
    let mut worst = Float::new(bits);
    for (v, &(i, j)) in q.values.iter().zip(&pairs) {
        let target = if i == j { 1 } else { 0 };
        let d = Float::with_val(bits, v - target).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}
