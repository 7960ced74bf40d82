//! Closed-form large-n predictions: the product formula for the
//! characteristic-polynomial average inside the bulk, the outside-spectrum
//! formula, equilibrium measure and its log potential, the Szego function,
//! the oscillating phases, the recurrence-coefficient expansions and the
//! right-hand side of the differential identity in `alpha`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::complex::Complex;
use crate::error::{LabError, Result};
use crate::precision::PrecisionContext;
use crate::quadrature::{Segment, TanhSinh};
use crate::specfun::{digamma, log_c, log_gamma};
use crate::weights::WeightSpec;

/// `lambda^2` and `1 - lambda^2` at `bits`.
fn squares(l: f64, bits: u32) -> (Float, Float) {
    let sq = Float::with_val(bits, l).square();
    let one_minus = Float::with_val(bits, 1u32 - &sq);
    (sq, one_minus)
}

/// A log-scale prediction with its additive breakdown.
#[derive(Debug, Clone)]
pub struct AsymptoticPrediction {
    pub log_value: Float,
    pub terms: Vec<(&'static str, Float)>,
    pub error_order: &'static str,
}

impl AsymptoticPrediction {
    fn from_terms(bits: u32, terms: Vec<(&'static str, Float)>, error_order: &'static str) -> Self {
        let mut log_value = Float::new(bits);
        for (_, t) in &terms {
            log_value += t;
        }
        Self {
            log_value,
            terms,
            error_order,
        }
    }

    pub fn term(&self, name: &str) -> Option<&Float> {
        self.terms.iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }
}

/// Semicircle density `psi(x) = (2/pi) sqrt(1 - x^2)` on `[-1, 1]`, its
/// tail mass and the Lagrange constant of the log potential.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumData {
    bits: u32,
}

impl EquilibriumData {
    pub fn new(bits: u32) -> Self {
        Self { bits }
    }

    pub fn psi(&self, x: &Float) -> Float {
        let bits = self.bits;
        let one_minus = Float::with_val(bits, 1u32 - Float::with_val(bits, x.square_ref()));
        if one_minus <= 0 {
            return Float::new(bits);
        }
        one_minus.sqrt() * 2u32 / Float::with_val(bits, Constant::Pi)
    }

    pub fn tail(&self, lambda: &Float) -> Result<Float> {
        equilibrium_tail(lambda)
    }

    /// `l = -1 - 2 ln 2`
    pub fn l_const(&self) -> Float {
        -(Float::with_val(self.bits, Constant::Log2) * 2u32) - 1u32
    }
}

/// `int_lambda^1 psi = 1/2 - (lambda sqrt(1 - lambda^2) + arcsin lambda) / pi`.
pub fn equilibrium_tail(lambda: &Float) -> Result<Float> {
    let bits = lambda.prec();
    if !(lambda.clone().abs() <= 1) {
        return Err(LabError::Domain {
            function: "equilibrium_tail",
            detail: format!("|lambda| = {} > 1", lambda.to_f64().abs()),
        });
    }
    let root = Float::with_val(bits, 1u32 - Float::with_val(bits, lambda.square_ref())).sqrt();
    let inner = root * lambda + Float::with_val(bits, lambda.asin_ref());
    Ok(Float::with_val(bits, 0.5f64) - inner / Float::with_val(bits, Constant::Pi))
}

/// `g(z) = int_{-1}^1 ln(z - s) psi(s) ds` by tanh-sinh quadrature. `z` must
/// be off the cut `(-inf, 1]`.
pub fn g_value(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let bits = ctx.bits();
    if z.im.is_zero() && z.re <= 1 {
        return Err(LabError::Domain {
            function: "g_value",
            detail: "z on the cut (-inf, 1]; use g_boundary".into(),
        });
    }
    let x = Float::with_val(bits, &z.re);
    let y = Float::with_val(bits, &z.im);
    let split = x > -1 && x < 1;
    let one = Float::with_val(bits, 1);
    let mut segments = Vec::new();
    if split {
        segments.push(Segment::new(-one.clone(), x.clone()));
        segments.push(Segment::new(x.clone(), one.clone()));
    } else {
        segments.push(Segment::new(-one.clone(), one.clone()));
    }
    let last = segments.len() - 1;
    segments[0].left_exponent = 0.5;
    segments[last].right_exponent = 0.5;
    let scale = Float::with_val(bits, 2u32) / Float::with_val(bits, Constant::Pi);
    let ts = TanhSinh::new(bits, ctx.tol_digits(), f64::from(ctx.digits + ctx.guard_digits));
    let q = ts.integrate(&segments, 2, |node| {
        let s = &node.x;
        let one_plus = if node.segment == 0 {
            node.from_left.clone()
        } else {
            Float::with_val(bits, s + 1u32)
        };
        let one_minus = if node.segment == last {
            node.from_right.clone()
        } else {
            Float::with_val(bits, 1u32 - s)
        };
        let psi = (one_plus * one_minus).sqrt() * &scale;
        let dx = match (split, node.segment) {
            (true, 0) => node.from_right.clone(),
            (true, _) => -node.from_left.clone(),
            _ => Float::with_val(bits, &x - s),
        };
        let l = Complex::new(dx, y.clone()).ln();
        vec![l.re * &psi, l.im * psi]
    })?;
    let mut it = q.values.into_iter();
    let re = it.next().unwrap_or_else(|| Float::new(bits));
    let im = it.next().unwrap_or_else(|| Float::new(bits));
    Ok(Complex::new(re, im))
}

/// Offsets used for boundary values from above and below the real axis.
pub const BOUNDARY_DELTAS: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// Value at 0 of the quadratic through `(d_i, f_i)`.
fn extrapolate_to_zero(deltas: &[Float], values: &[Complex]) -> Complex {
    let bits = values[0].prec();
    let mut out = Complex::from_f64(bits, 0.0, 0.0);
    for (i, fi) in values.iter().enumerate() {
        let mut c = Float::with_val(bits, 1);
        for (j, dj) in deltas.iter().enumerate() {
            if i != j {
                c *= Float::with_val(bits, dj / Float::with_val(bits, dj - &deltas[i]));
            }
        }
        out = out.add(&fi.scale(&c));
    }
    out
}

/// Boundary value `g_+(x)` (`upper = true`) or `g_-(x)` on the real axis,
/// extrapolated from `x +- i delta`.
pub fn g_boundary(x: &Float, upper: bool, ctx: &PrecisionContext) -> Result<Complex> {
    let bits = ctx.bits();
    let mut deltas = Vec::new();
    let mut values = Vec::new();
    for d in BOUNDARY_DELTAS {
        let delta = Float::with_val(bits, if upper { d } else { -d });
        let z = Complex::new(Float::with_val(bits, x), delta.clone());
        values.push(g_value(&z, ctx)?);
        deltas.push(delta);
    }
    Ok(extrapolate_to_zero(&deltas, &values))
}

fn on_cut(z: &Complex) -> bool {
    z.im.is_zero() && z.re >= -1 && z.re <= 1
}

/// Szego function `D(z) = (z + sqrt(z^2 - 1))^{-A} prod_j (z - lambda_j)^{alpha_j}`
/// for `z` off `[-1, 1]`, principal branches.
pub fn szego_value(z: &Complex, spec: &WeightSpec, bits: u32) -> Result<Complex> {
    if on_cut(z) {
        return Err(LabError::Domain {
            function: "szego_value",
            detail: "z on [-1, 1]; use szego_boundary".into(),
        });
    }
    let one = Complex::from_f64(bits, 1.0, 0.0);
    let root = z.sub(&one).sqrt().mul(&z.add(&one).sqrt());
    let big_a = Float::with_val(bits, spec.big_a());
    let mut out = z.add(&root).powf(&-big_a);
    for (&l, &a) in spec.lambdas().iter().zip(spec.alphas()) {
        if a == 0.0 {
            continue;
        }
        let shifted = z.sub(&Complex::from_f64(bits, l, 0.0));
        out = out.mul(&shifted.powf(&Float::with_val(bits, a)));
    }
    Ok(out)
}

/// `D_inf = 2^{-A}`.
pub fn szego_infinity(spec: &WeightSpec, bits: u32) -> Float {
    let big_a = Float::with_val(bits, -spec.big_a());
    Float::with_val(bits, 2).pow(&big_a)
}

/// Closed-form boundary values `D_+(x)` / `D_-(x)` for `x` in `(-1, 1)`:
/// `(x +- i sqrt(1 - x^2))^{-A} = e^{-+ i A arccos x}` and
/// `(x - lambda)^alpha_+- = |x - lambda|^alpha e^{+- i pi alpha}` for `x < lambda`.
pub fn szego_boundary(x: &Float, spec: &WeightSpec, upper: bool) -> Result<Complex> {
    let bits = x.prec();
    if !(x.clone().abs() < 1) {
        return Err(LabError::Domain {
            function: "szego_boundary",
            detail: "x must lie in (-1, 1)".into(),
        });
    }
    let sign = if upper { 1i32 } else { -1i32 };
    let pi = Float::with_val(bits, Constant::Pi);
    let theta = Float::with_val(bits, x.acos_ref());
    let mut modulus = Float::with_val(bits, 0);
    let mut phase = theta * Float::with_val(bits, -spec.big_a()) * sign;
    for (&l, &a) in spec.lambdas().iter().zip(spec.alphas()) {
        if a == 0.0 {
            continue;
        }
        let d = Float::with_val(bits, x - l);
        if d.is_zero() {
            return Err(LabError::Domain {
                function: "szego_boundary",
                detail: "x coincides with a singular point".into(),
            });
        }
        modulus += Float::with_val(bits, d.abs_ref()).ln() * a;
        if d < 0 {
            phase += Float::with_val(bits, &pi * a) * sign;
        }
    }
    let r = modulus.exp();
    let (s, c) = phase.sin_cos(Float::new(bits));
    Ok(Complex::new(Float::with_val(bits, &r * &c), r * s))
}

/// Phases `t_j` and angles `tau_j = arcsin lambda_j` entering the
/// coefficient expansions.
#[derive(Debug, Clone)]
pub struct PhaseData {
    pub t: Vec<Float>,
    pub tau: Vec<Float>,
    pub big_a: Float,
}

/// `t_j = 2 pi n tail(lambda_j) + pi alpha_j - 2 pi sum_{lambda_i >= lambda_j} alpha_i
/// + A (pi - 2 tau_j)` for every singular point.
pub fn phase_t(spec: &WeightSpec, bits: u32) -> Result<PhaseData> {
    spec.require_bulk()?;
    let pi = Float::with_val(bits, Constant::Pi);
    let big_a = Float::with_val(bits, spec.big_a());
    let n = spec.n() as u64;
    let mut t = Vec::with_capacity(spec.m());
    let mut tau = Vec::with_capacity(spec.m());
    for (j, &lj) in spec.lambdas().iter().enumerate() {
        let lambda = Float::with_val(bits, lj);
        let tail = equilibrium_tail(&lambda)?;
        let tj = Float::with_val(bits, lambda.asin_ref());
        let above: f64 = spec
            .lambdas()
            .iter()
            .zip(spec.alphas())
            .filter(|(&li, _)| li >= lj)
            .map(|(_, &ai)| ai)
            .sum();
        let mut v = Float::with_val(bits, &pi * n) * 2u32 * tail;
        v += Float::with_val(bits, &pi * spec.alphas()[j]);
        v -= Float::with_val(bits, &pi * above) * 2u32;
        v += Float::with_val(bits, &pi - Float::with_val(bits, &tj * 2u32)) * &big_a;
        t.push(v);
        tau.push(tj);
    }
    Ok(PhaseData { t, tau, big_a })
}

/// Bulk product formula for `ln <prod_j |det(H - lambda_j sqrt(2n))|^{2 alpha_j}>`.
pub fn theorem1_log(spec: &WeightSpec, ctx: &PrecisionContext) -> Result<AsymptoticPrediction> {
    spec.require_bulk()?;
    let bits = ctx.bits();
    let n = spec.n() as u64;
    let ln_half_n = (Float::with_val(bits, n) / 2u32).ln();
    let mut c_term = Float::new(bits);
    let mut edge = Float::new(bits);
    let mut power = Float::new(bits);
    let mut expo = Float::new(bits);
    for (&l, &a) in spec.lambdas().iter().zip(spec.alphas()) {
        let alpha = Float::with_val(bits, a);
        let alpha2 = Float::with_val(bits, alpha.square_ref());
        c_term += log_c(&alpha, ctx)?;
        let (sq, one_minus) = squares(l, bits);
        edge += Float::with_val(bits, &alpha2 / 2u32) * one_minus.ln();
        power += (Float::with_val(bits, &alpha * n) + &alpha2) * &ln_half_n;
        expo += (sq * 2u32 - 1u32) * &alpha * n;
    }
    let mut cross = Float::new(bits);
    let (ls, als) = (spec.lambdas(), spec.alphas());
    for i in 0..ls.len() {
        for j in i + 1..ls.len() {
            let d = Float::with_val(bits, ls[i]) - ls[j];
            let ln_dist = (d.abs() * 2u32).ln();
            cross -= ln_dist * Float::with_val(bits, als[i]) * als[j] * 2u32;
        }
    }
    Ok(AsymptoticPrediction::from_terms(
        bits,
        vec![
            ("C(alpha)", c_term),
            ("(1-lambda^2) power", edge),
            ("power of n/2", power),
            ("exponential", expo),
            ("cross terms", cross),
        ],
        "O(ln n/n)",
    ))
}

/// Outside-spectrum formula for one point `|lambda| > 1`.
pub fn johansson_log(
    lambda: f64,
    alpha: f64,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<AsymptoticPrediction> {
    if !(lambda.abs() > 1.0) || !lambda.is_finite() {
        return Err(LabError::Domain {
            function: "johansson_log",
            detail: format!("|lambda| = {} must exceed 1", lambda.abs()),
        });
    }
    if !(alpha > -0.5) {
        return Err(LabError::InvalidSpec(format!("alpha = {alpha} must exceed -1/2")));
    }
    if n == 0 {
        return Err(LabError::InvalidSpec("n must be positive".into()));
    }
    let bits = ctx.bits();
    let n = n as u64;
    let alpha = Float::with_val(bits, alpha);
    let l = Float::with_val(bits, lambda.abs());
    let l2m1 = Float::with_val(bits, l.square_ref()) - 1u32;
    let root = Float::with_val(bits, l2m1.sqrt_ref());
    let scale = (Float::with_val(bits, n) * 2u32).ln() * &alpha * n;
    let edge = -(Float::with_val(bits, l2m1.ln_ref()) * Float::with_val(bits, alpha.square_ref()));
    let radius = (Float::with_val(bits, &l + &root) / 2u32).ln();
    let root_power = radius * (Float::with_val(bits, &alpha + n) * &alpha) * 2u32;
    let bracket = Float::with_val(bits, l.square_ref()) - Float::with_val(bits, &l * &root) - 0.5f64;
    let expo = bracket * &alpha * n * 2u32;
    Ok(AsymptoticPrediction::from_terms(
        bits,
        vec![
            ("(2n)^(alpha n)", scale),
            ("(lambda^2-1) power", edge),
            ("root power", root_power),
            ("exponential", expo),
        ],
        "o(1)",
    ))
}

/// Predicted `kappa_{n-1}^2`, `beta_n` and `gamma_n` for the weight at size
/// `n = spec.n()`.
#[derive(Debug, Clone)]
pub struct CoeffPrediction {
    pub log_kappa2: Float,
    pub kappa2: Float,
    pub beta: Float,
    pub gamma: Float,
    pub phases: PhaseData,
}

pub fn coeff_asym(spec: &WeightSpec, ctx: &PrecisionContext) -> Result<CoeffPrediction> {
    let bits = ctx.bits();
    let phases = phase_t(spec, bits)?;
    let n = spec.n() as u64;
    let nf = Float::with_val(bits, n);
    let big_a = phases.big_a.clone();
    let mut s_kappa = Float::new(bits);
    let mut s_sin = Float::new(bits);
    let mut s_cos = Float::new(bits);
    let mut s_alpha2 = Float::new(bits);
    let mut s_al = Float::new(bits);
    let mut s_al2 = Float::new(bits);
    for (j, (&l, &a)) in spec.lambdas().iter().zip(spec.alphas()).enumerate() {
        let (sq, one_minus) = squares(l, bits);
        let cos_p = Float::with_val(bits, &phases.t[j] + &phases.tau[j]).cos();
        let sin_t = Float::with_val(bits, phases.t[j].sin_ref());
        let alpha = Float::with_val(bits, a);
        let alpha2 = Float::with_val(bits, alpha.square_ref());
        s_kappa += (Float::with_val(bits, &alpha * &cos_p) + &alpha2) / &one_minus;
        s_sin += (Float::with_val(bits, &alpha * &sin_t) - Float::with_val(bits, &alpha2 * l)) / &one_minus;
        s_cos += (Float::with_val(bits, &alpha * &cos_p) + Float::with_val(bits, &alpha2 * &sq))
            / &one_minus;
        s_alpha2 += &alpha2;
        s_al += Float::with_val(bits, &alpha * l);
        s_al2 += Float::with_val(bits, &alpha * &sq);
    }
    let big_a2 = Float::with_val(bits, big_a.square_ref());

    let ln2 = Float::with_val(bits, Constant::Log2);
    let pi = Float::with_val(bits, Constant::Pi);
    let mut log_kappa2 = Float::with_val(bits, &big_a + (n - 1)) * &ln2;
    log_kappa2 -= Float::with_val(bits, &big_a * nf.clone().ln());
    log_kappa2 -= pi.ln() / 2u32;
    log_kappa2 -= log_gamma(&nf, ctx)?;
    let corr = (Float::with_val(bits, &big_a2 - &big_a) + &s_kappa) / Float::with_val(bits, &nf * 2u32);
    log_kappa2 += (1u32 - corr).ln();
    let kappa2 = Float::with_val(bits, log_kappa2.exp_ref());

    let root2n = Float::with_val(bits, &nf * 2u32).sqrt();
    let beta = (Float::with_val(bits, &s_sin / Float::with_val(bits, &nf * 4u32)) + &s_al) * root2n;

    let mut bracket = Float::with_val(bits, &big_a - &big_a2) + &s_alpha2;
    bracket -= &s_cos;
    bracket += Float::with_val(bits, &s_sin * &s_al) * 2u32;
    let mut gamma = -(Float::with_val(bits, n - 1) / 4u32);
    gamma += Float::with_val(bits, s_al.square_ref());
    gamma += &s_al2;
    gamma -= Float::with_val(bits, &big_a / 2u32);
    gamma += bracket / Float::with_val(bits, &nf * 4u32);
    gamma *= &nf;

    Ok(CoeffPrediction {
        log_kappa2,
        kappa2,
        beta,
        gamma,
        phases,
    })
}

/// Leading-order `d/d alpha_nu ln D_n` (`nu` is a 0-based index):
/// `(n + 2 alpha_nu) ln(n/2) + (2 lambda_nu^2 - 1) n + 2 alpha_nu
/// + alpha_nu ln(1 - lambda_nu^2) - 2 alpha_nu psi(alpha_nu + 1/2)
/// - 2 sum_{j != nu} alpha_j ln(2 |lambda_j - lambda_nu|)`.
pub fn diff_identity_rhs(spec: &WeightSpec, nu: usize, ctx: &PrecisionContext) -> Result<Float> {
    spec.require_bulk()?;
    if nu >= spec.m() {
        return Err(LabError::InvalidSpec(format!(
            "index {nu} out of range for {} points",
            spec.m()
        )));
    }
    let bits = ctx.bits();
    let n = spec.n() as u64;
    let l = spec.lambdas()[nu];
    let alpha = Float::with_val(bits, spec.alphas()[nu]);
    let ln_half_n = (Float::with_val(bits, n) / 2u32).ln();
    let mut v = (Float::with_val(bits, &alpha * 2u32) + n) * ln_half_n;
    let (sq, one_minus) = squares(l, bits);
    v += (sq * 2u32 - 1u32) * n;
    v += Float::with_val(bits, &alpha * 2u32);
    v += one_minus.ln() * &alpha;
    let shifted = Float::with_val(bits, &alpha + 0.5f64);
    v -= digamma(&shifted, ctx)? * &alpha * 2u32;
    for (j, (&lj, &aj)) in spec.lambdas().iter().zip(spec.alphas()).enumerate() {
        if j == nu || aj == 0.0 {
            continue;
        }
        let d = (Float::with_val(bits, lj) - l).abs() * 2u32;
        v -= d.ln() * aj * 2u32;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn f(bits: u32, v: f64) -> Float {
        Float::with_val(bits, v)
    }

    #[test]
    fn tail_values() {
        let bits = 200;
        assert_eq!(equilibrium_tail(&f(bits, 0.0)).unwrap(), 0.5);
        assert!(equilibrium_tail(&f(bits, 1.0)).unwrap().abs() < 1e-60);
        assert!((equilibrium_tail(&f(bits, -1.0)).unwrap() - 1u32).abs() < 1e-60);
        assert!(equilibrium_tail(&f(bits, 1.5)).is_err());
        // integrate psi over [0.5, 1] as an oracle
        let eq = EquilibriumData::new(bits);
        let c = ctx();
        let ts = TanhSinh::new(c.bits(), c.tol_digits(), 50.0);
        let mut seg = Segment::new(f(c.bits(), 0.5), f(c.bits(), 1.0));
        seg.right_exponent = 0.5;
        let q = ts.integrate(&[seg], 1, |nd| vec![eq.psi(&nd.x)]).unwrap();
        let t = equilibrium_tail(&f(bits, 0.5)).unwrap();
        assert!((Float::with_val(bits, &q.values[0] - &t)).abs() < 1e-25);
        assert!((t.to_f64() - 0.19550).abs() < 1e-5);
    }

    #[test]
    fn g_jump_relations() {
        let c = ctx();
        let eq = EquilibriumData::new(c.bits());
        for x in [-0.8, -0.1, 0.35, 0.9] {
            let xf = f(c.bits(), x);
            let gp = g_boundary(&xf, true, &c).unwrap();
            let gm = g_boundary(&xf, false, &c).unwrap();
            let sum = gp.add(&gm);
            let expect = Float::with_val(c.bits(), xf.square_ref()) * 2u32 + eq.l_const();
            assert!(Float::with_val(c.bits(), &sum.re - &expect).abs() < 1e-10, "x = {x}");
            assert!(sum.im.clone().abs() < 1e-10);
            let jump = gp.sub(&gm);
            let two_pi_tail = equilibrium_tail(&xf).unwrap() * c.pi() * 2u32;
            assert!(jump.re.clone().abs() < 1e-10);
            assert!(Float::with_val(c.bits(), &jump.im - &two_pi_tail).abs() < 1e-10);
        }
    }

    #[test]
    fn g_at_infinity() {
        let c = ctx();
        let z = Complex::from_f64(c.bits(), 1000.0, 0.0);
        let g = g_value(&z, &c).unwrap();
        let lead = z.ln();
        let rest = Float::with_val(c.bits(), &g.re - &lead.re);
        // g - ln z = -1/(8 z^2) + O(z^-4)
        assert!((rest.to_f64() + 1.25e-7).abs() < 1e-12);
        assert!(g_value(&Complex::from_f64(c.bits(), 0.3, 0.0), &c).is_err());
    }

    #[test]
    fn szego_properties() {
        let bits = 200;
        let trivial = WeightSpec::new(vec![0.2], vec![0.0], 4).unwrap();
        let v = szego_value(&Complex::from_f64(bits, 2.0, 1.0), &trivial, bits).unwrap();
        assert!((v.re.to_f64() - 1.0).abs() < 1e-50 && v.im.to_f64().abs() < 1e-50);
        let one = WeightSpec::new(vec![0.2], vec![1.0], 4).unwrap();
        assert_eq!(szego_infinity(&one, bits).to_f64(), 0.5);
        let far = szego_value(&Complex::from_f64(bits, 1e30, 0.0), &one, bits).unwrap();
        assert!((far.re.to_f64() - 0.5).abs() < 1e-25);

        let spec = WeightSpec::new(vec![-0.4, 0.3], vec![0.5, -0.3], 8).unwrap();
        let x = f(bits, 0.1);
        let p = szego_boundary(&x, &spec, true).unwrap();
        let m = szego_boundary(&x, &spec, false).unwrap();
        let prod = p.mul(&m);
        let d1 = Float::with_val(bits, &x + 0.4f64);
        let d2 = Float::with_val(bits, 0.3f64 - &x);
        let w = d1 * (d2.ln() * -0.6f64).exp();
        assert!(Float::with_val(bits, &prod.re - &w).abs() < 1e-55);
        assert!(prod.im.clone().abs() < 1e-55);
        // closed-form boundary values are the limits of the function
        let eps = 1e-40;
        let above = szego_value(&Complex::from_f64(bits, 0.1, eps), &spec, bits).unwrap();
        let below = szego_value(&Complex::from_f64(bits, 0.1, -eps), &spec, bits).unwrap();
        assert!(Float::with_val(bits, &above.re - &p.re).abs() < 1e-35);
        assert!(Float::with_val(bits, &above.im - &p.im).abs() < 1e-35);
        assert!(Float::with_val(bits, &below.re - &m.re).abs() < 1e-35);
        assert!(Float::with_val(bits, &below.im - &m.im).abs() < 1e-35);
        assert!(szego_value(&Complex::from_f64(bits, 0.5, 0.0), &spec, bits).is_err());
    }

    #[test]
    fn phases() {
        let bits = 200;
        let pi = Float::with_val(bits, Constant::Pi);
        for (alpha, n) in [(0.0, 7usize), (1.0, 10)] {
            let spec = WeightSpec::new(vec![0.0], vec![alpha], n).unwrap();
            let p = phase_t(&spec, bits).unwrap();
            let expect = Float::with_val(bits, &pi * n as u64);
            assert!(Float::with_val(bits, &p.t[0] - &expect).abs() < 1e-50);
        }
        // two points, each term recomputed by hand in double precision
        let spec = WeightSpec::new(vec![0.3, -0.4], vec![0.5, 0.25], 9).unwrap();
        let p = phase_t(&spec, bits).unwrap();
        let tail = |l: f64| 0.5 - (l * (1.0 - l * l).sqrt() + l.asin()) / std::f64::consts::PI;
        let pi = std::f64::consts::PI;
        let t0 = 2.0 * pi * 9.0 * tail(0.3) + pi * 0.5 - 2.0 * pi * 0.5 + 0.75 * (pi - 2.0 * 0.3f64.asin());
        let t1 = 2.0 * pi * 9.0 * tail(-0.4) + pi * 0.25 - 2.0 * pi * 0.75
            + 0.75 * (pi - 2.0 * (-0.4f64).asin());
        assert!((p.t[0].to_f64() - t0).abs() < 1e-12);
        assert!((p.t[1].to_f64() - t1).abs() < 1e-12);
    }

    #[test]
    fn bulk_specializations() {
        let c = ctx();
        let zero = WeightSpec::new(vec![0.1, 0.5], vec![0.0, 0.0], 12).unwrap();
        assert!(theorem1_log(&zero, &c).unwrap().log_value.is_zero());
        let spec = WeightSpec::new(vec![0.0], vec![0.7], 12).unwrap();
        let p = theorem1_log(&spec, &c).unwrap();
        let a = c.float(0.7);
        let power = Float::with_val(c.bits(), &a * 12u32) + Float::with_val(c.bits(), a.square_ref());
        let expect = log_c(&a, &c).unwrap() + power * c.float(6.0).ln() - Float::with_val(c.bits(), &a * 12u32);
        assert!(Float::with_val(c.bits(), &p.log_value - &expect).abs() < 1e-28);
        let mut sum = c.zero();
        for (_, t) in &p.terms {
            sum += t;
        }
        assert_eq!(sum, p.log_value);
    }

    #[test]
    fn bulk_permutation_symmetric() {
        let c = ctx();
        let a = WeightSpec::new(vec![-0.4, 0.3, 0.6], vec![0.5, 1.0, -0.2], 16).unwrap();
        let b = WeightSpec::new(vec![0.6, -0.4, 0.3], vec![-0.2, 0.5, 1.0], 16).unwrap();
        let x = theorem1_log(&a, &c).unwrap().log_value;
        let y = theorem1_log(&b, &c).unwrap().log_value;
        assert!(Float::with_val(c.bits(), &x - &y).abs() < 1e-28);
    }

    #[test]
    fn johansson_basics() {
        let c = ctx();
        assert!(johansson_log(1.5, 0.0, 8, &c).unwrap().log_value.is_zero());
        assert!(johansson_log(0.5, 1.0, 8, &c).is_err());
        let p = johansson_log(-1.5, 1.0, 8, &c).unwrap();
        let q = johansson_log(1.5, 1.0, 8, &c).unwrap();
        assert_eq!(p.log_value, q.log_value);
        // lambda -> infinity: 2 alpha n ln|lambda| dominates
        let big = johansson_log(1e60, 0.5, 8, &c).unwrap().log_value.to_f64();
        assert!((big / (2.0 * 0.5 * 8.0 * 1e60f64.ln()) - 1.0).abs() < 0.03);
    }

    #[test]
    fn hermite_coefficients_exact() {
        let c = ctx();
        let spec = WeightSpec::new(vec![0.3], vec![0.0], 10).unwrap();
        let p = coeff_asym(&spec, &c).unwrap();
        // 2^{n-1} / (sqrt(pi) (n-1)!)
        let expect = c.float(512.0) / (c.pi().sqrt() * 362880u32);
        assert!(Float::with_val(c.bits(), &p.kappa2 - &expect).abs() < 1e-35);
        assert!(p.beta.is_zero());
        assert_eq!(p.gamma.to_f64(), -10.0 * 9.0 / 4.0);
    }

    #[test]
    fn symmetric_point_beta_vanishes() {
        // lambda = 0: t = pi n + pi alpha - 2 pi alpha + alpha pi = pi n
        let c = ctx();
        let spec = WeightSpec::new(vec![0.0], vec![0.5], 16).unwrap();
        let p = coeff_asym(&spec, &c).unwrap();
        assert!(p.beta.clone().abs() < 1e-30);
    }

    #[test]
    fn identity_rhs_integrates_to_bulk_formula() {
        let c = ctx();
        assert!({
            let s = WeightSpec::new(vec![0.3], vec![0.0], 32).unwrap();
            let v = diff_identity_rhs(&s, 0, &c).unwrap();
            let expect = c.float(32.0) * c.float(16.0).ln() + (c.float(0.3).square() * 2u32 - 1u32) * 32u32;
            Float::with_val(c.bits(), &v - &expect).abs() < 1e-30
        });
        let alpha = 0.8;
        let gl = GaussLegendre::new(60, c.bits());
        let integral = gl.integrate(&c.zero(), &c.float(alpha), |a| rhs_at(a, 0.3, 32, &c));
        let spec = WeightSpec::new(vec![0.3], vec![alpha], 32).unwrap();
        let t1 = theorem1_log(&spec, &c).unwrap().log_value;
        assert!(Float::with_val(c.bits(), &integral - &t1).abs() < 1e-25);
    }

    /// `diff_identity_rhs` for one point with an extended-precision alpha.
    fn rhs_at(alpha: &Float, l: f64, n: u64, c: &PrecisionContext) -> Float {
        let bits = c.bits();
        let mut v = (Float::with_val(bits, alpha * 2u32) + n) * (c.float(n as f64) / 2u32).ln();
        let sq = c.float(l).square();
        v += (sq.clone() * 2u32 - 1u32) * n;
        v += Float::with_val(bits, alpha * 2u32);
        v += (1u32 - sq).ln() * alpha;
        v -= digamma(&(Float::with_val(bits, alpha + 0.5f64)), c).unwrap() * alpha * 2u32;
        v
    }
}
