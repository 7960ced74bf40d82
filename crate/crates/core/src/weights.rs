//! The singular Gaussian weight `w(x) = prod_j |x - mu_j|^{2 alpha_j} e^{-x^2}`
//! and its Hankel moments.

use rug::Float;

use crate::error::{LabError, Result};
use crate::precision::PrecisionContext;
use crate::quadrature::{MultiQuadrature, Node, Segment, TanhSinh};
use crate::specfun;

/// Largest gap between consecutive quadrature breakpoints.
const MAX_PIECE: f64 = 3.0;

/// Singular points `lambda_j` (in units of `sqrt(2n)`), exponents `alpha_j`
/// and the matrix size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    lambdas: Vec<f64>,
    alphas: Vec<f64>,
    n: usize,
}

impl WeightSpec {
    pub fn new(lambdas: Vec<f64>, alphas: Vec<f64>, n: usize) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(LabError::InvalidSpec("at least one singular point is required".into()));
        }
        if lambdas.len() != alphas.len() {
            return Err(LabError::InvalidSpec(format!(
                "{} lambdas but {} alphas",
                lambdas.len(),
                alphas.len()
            )));
        }
        if n == 0 {
            return Err(LabError::InvalidSpec("matrix size n must be positive".into()));
        }
        for (j, (&l, &a)) in lambdas.iter().zip(&alphas).enumerate() {
            if !l.is_finite() {
                return Err(LabError::InvalidSpec(format!("lambda[{j}] = {l} is not finite")));
            }
            if !(a > -0.5) || !a.is_finite() {
                return Err(LabError::InvalidSpec(format!(
                    "alpha[{j}] = {a} must be finite and exceed -1/2"
                )));
            }
        }
        for i in 0..lambdas.len() {
            for j in i + 1..lambdas.len() {
                if lambdas[i] == lambdas[j] {
                    return Err(LabError::InvalidSpec(format!(
                        "lambda[{i}] and lambda[{j}] coincide ({})",
                        lambdas[i]
                    )));
                }
            }
        }
        Ok(Self { lambdas, alphas, n })
    }

    /// Pure Gaussian weight (`alpha = 0` at `lambda = 0`).
    pub fn gaussian(n: usize) -> Result<Self> {
        Self::new(vec![0.0], vec![0.0], n)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.lambdas.len()
    }

    /// `A = sum_j alpha_j`.
    pub fn big_a(&self) -> f64 {
        self.alphas.iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.alphas.iter().all(|&a| a == 0.0)
    }

    /// All singular points strictly inside the bulk `(-1, 1)`.
    pub fn require_bulk(&self) -> Result<()> {
        match self.lambdas.iter().position(|l| l.abs() >= 1.0) {
            Some(j) => Err(LabError::InvalidSpec(format!(
                "lambda[{j}] = {} must lie in (-1, 1)",
                self.lambdas[j]
            ))),
            None => Ok(()),
        }
    }

    /// Eigenvalue-scale positions `mu_j = lambda_j sqrt(2n)`.
    pub fn mus(&self, bits: u32) -> Vec<Float> {
        let scale = Float::with_val(bits, 2 * self.n).sqrt();
        self.lambdas
            .iter()
            .map(|&l| Float::with_val(bits, &scale * l))
            .collect()
    }

    /// Invariant under `lambda -> -lambda` together with the exponents.
    pub fn is_symmetric(&self) -> bool {
        // points with alpha = 0 do not change the weight
        self.singular_points().all(|(l, a)| {
            self.singular_points().any(|(l2, a2)| l2 == -l && a2 == a)
        })
    }

    fn singular_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lambdas
            .iter()
            .zip(&self.alphas)
            .filter(|(_, &a)| a != 0.0)
            .map(|(&l, &a)| (l, a))
    }

    /// The weight mirrored through the origin.
    pub fn reflected(&self) -> Self {
        Self {
            lambdas: self.lambdas.iter().map(|l| -l).collect(),
            alphas: self.alphas.clone(),
            n: self.n,
        }
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.lambdas.clone(), self.alphas.clone(), n)
    }

    pub fn with_alpha(&self, index: usize, alpha: f64) -> Result<Self> {
        let mut alphas = self.alphas.clone();
        *alphas.get_mut(index).ok_or_else(|| {
            LabError::InvalidSpec(format!("no singular point with index {index}"))
        })? = alpha;
        Self::new(self.lambdas.clone(), alphas, self.n)
    }

    pub fn with_alphas(&self, alphas: Vec<f64>) -> Result<Self> {
        Self::new(self.lambdas.clone(), alphas, self.n)
    }
}

/// `w(x)`, with or without the Gaussian factor.
pub fn weight_eval(spec: &WeightSpec, x: &Float, include_gaussian: bool) -> Result<Float> {
    let bits = x.prec();
    let mus = spec.mus(bits);
    let mut log_w = Float::new(bits);
    for (j, (mu, &a)) in mus.iter().zip(spec.alphas()).enumerate() {
        if a == 0.0 {
            continue;
        }
        let d = Float::with_val(bits, x - mu).abs();
        if d.is_zero() {
            if a > 0.0 {
                return Ok(Float::new(bits));
            }
            return Err(LabError::SingularPoint { index: j });
        }
        log_w += d.ln() * (2.0 * a);
    }
    if include_gaussian {
        log_w -= Float::with_val(bits, x.square_ref());
    }
    Ok(log_w.exp())
}

/// Where a moment table came from; tables built by quadrature can be
/// recomputed at a higher precision.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentOrigin {
    Quadrature(WeightSpec),
    Supplied,
}

/// Hankel moments `M_0..M_K` of a weight.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub values: Vec<Float>,
    pub origin: MomentOrigin,
    /// Estimated relative accuracy, as `-log10`.
    pub achieved_digits: f64,
    /// Precision the table was computed at.
    pub digits: u32,
}

impl MomentTable {
    /// Wrap externally computed moments.
    pub fn from_values(values: Vec<Float>, digits: u32) -> Self {
        Self {
            values,
            origin: MomentOrigin::Supplied,
            achieved_digits: f64::from(digits),
            digits,
        }
    }

    /// Highest moment index `K`.
    pub fn k_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn spec(&self) -> Option<&WeightSpec> {
        match &self.origin {
            MomentOrigin::Quadrature(s) => Some(s),
            MomentOrigin::Supplied => None,
        }
    }

    pub fn achieved_tol(&self) -> Float {
        crate::precision::pow10(64, -self.achieved_digits)
    }

    pub fn require(&self, highest: usize) -> Result<()> {
        if self.values.len() <= highest {
            return Err(LabError::Dimension {
                needed: highest,
                available: self.k_max(),
            });
        }
        Ok(())
    }
}

/// Cut-off `X` with `e^{-X^2} X^p < 10^{-digits}`.
fn truncation_point(power: f64, digits: f64) -> f64 {
    let target = digits * std::f64::consts::LN_10;
    let mut x = (target + power).sqrt().max(2.0);
    for _ in 0..100 {
        let next = (target + power.max(0.0) * x.ln().max(0.0)).sqrt();
        if (next - x).abs() < 1e-12 {
            x = next;
            break;
        }
        x = next;
    }
    x + 0.5
}

/// Breakpoints for the moment quadrature: every singular point, the two
/// truncation points, and a coarse grid keeping pieces no longer than
/// `MAX_PIECE`.
fn breakpoints(singular: &[f64], cutoff: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = singular.to_vec();
    pts.push(-cutoff);
    pts.push(cutoff);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) / MAX_PIECE).ceil().max(1.0) as usize;
        for i in 1..pieces {
            out.push(a + (b - a) * i as f64 / pieces as f64);
        }
        out.push(b);
    }
    out
}

/// Integrate `g(x) w(x)` for a vector-valued `g` by tanh-sinh quadrature
/// split at the singular points. `degree` bounds the polynomial growth of
/// `g` and sets the truncation of the infinite range. The closure receives
/// the abscissa and the weight value there.
pub fn integrate_weighted<G>(
    spec: &WeightSpec,
    degree: usize,
    nout: usize,
    ctx: &PrecisionContext,
    g: G,
) -> Result<MultiQuadrature>
where
    G: Fn(&Float, Float) -> Vec<Float> + Sync,
{
    let bits = ctx.bits();
    let mus = spec.mus(bits);
    let mu_f64: Vec<f64> = mus.iter().map(|m| m.to_f64()).collect();
    let positive_mass: f64 = spec.alphas().iter().map(|a| a.max(0.0)).sum();
    let max_mu = mu_f64.iter().fold(0.0f64, |acc, m| acc.max(m.abs()));
    let work_digits = f64::from(ctx.digits + ctx.guard_digits);
    let cutoff = truncation_point(degree as f64 + 2.0 * positive_mass + 2.0, work_digits)
        .max(max_mu + 2.0);

    let singular: Vec<(usize, f64)> = spec
        .alphas()
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0.0)
        .map(|(j, _)| (j, mu_f64[j]))
        .collect();
    let singular_x: Vec<f64> = singular.iter().map(|&(_, x)| x).collect();
    let bps = breakpoints(&singular_x, cutoff);
    // singular breakpoints carry the exact extended-precision mu
    let as_point = |x: f64| -> (Float, Option<usize>) {
        match singular.iter().find(|&&(_, s)| s == x) {
            Some(&(j, _)) => (mus[j].clone(), Some(j)),
            None => (Float::with_val(bits, x), None),
        }
    };
    let mut segments = Vec::with_capacity(bps.len());
    let mut owners = Vec::with_capacity(bps.len());
    for w in bps.windows(2) {
        let (a, ja) = as_point(w[0]);
        let (b, jb) = as_point(w[1]);
        let mut seg = Segment::new(a, b);
        if let Some(j) = ja {
            seg.left_exponent = 2.0 * spec.alphas()[j];
        }
        if let Some(j) = jb {
            seg.right_exponent = 2.0 * spec.alphas()[j];
        }
        segments.push(seg);
        owners.push((ja, jb));
    }

    let alphas = spec.alphas();
    let ts = TanhSinh::new(bits, ctx.tol_digits(), work_digits);
    let integrand = |node: &Node| -> Vec<Float> {
        let (left_owner, right_owner) = owners[node.segment];
        let mut log_w = -Float::with_val(bits, node.x.square_ref());
        for (j, mu) in mus.iter().enumerate() {
            let a = alphas[j];
            if a == 0.0 {
                continue;
            }
            let d = if left_owner == Some(j) {
                node.from_left.clone()
            } else if right_owner == Some(j) {
                node.from_right.clone()
            } else {
                Float::with_val(bits, &node.x - mu).abs()
            };
            log_w += d.ln() * (2.0 * a);
        }
        g(&node.x, log_w.exp())
    };
    ts.integrate(&segments, nout, integrand)
}

/// Moments `M_k = int x^k w(x) dx`, `k = 0..=k_max`.
pub fn moment_table(spec: &WeightSpec, k_max: usize, ctx: &PrecisionContext) -> Result<MomentTable> {
    let bits = ctx.bits();
    let nout = k_max + 1;
    let q = integrate_weighted(spec, k_max, nout, ctx, |x, w| {
        let mut out = Vec::with_capacity(nout);
        let mut p = w;
        for _ in 0..nout {
            let next = Float::with_val(bits, &p * x);
            out.push(p);
            p = next;
        }
        out
    })?;
    let work_digits = f64::from(ctx.digits + ctx.guard_digits);
    let achieved_digits = if q.rel_change.is_zero() {
        work_digits
    } else {
        (-q.rel_change.log10().to_f64()).min(work_digits)
    };
    if !(q.values[0] > 0) {
        return Err(LabError::Consistency("zeroth moment is not positive".into()));
    }
    Ok(MomentTable {
        values: q.values,
        origin: MomentOrigin::Quadrature(spec.clone()),
        achieved_digits,
        digits: ctx.digits,
    })
}

/// `int x^k |x|^{2 alpha} e^{-x^2} dx`: `Gamma(alpha + (k+1)/2)` for even `k`,
/// zero for odd `k`.
pub fn symmetric_moment_oracle(alpha: f64, k: usize, ctx: &PrecisionContext) -> Result<Float> {
    if !(alpha > -0.5) {
        return Err(LabError::InvalidSpec(format!("alpha = {alpha} must exceed -1/2")));
    }
    if k % 2 == 1 {
        return Ok(ctx.zero());
    }
    let arg = ctx.float(alpha) + (k as f64 + 1.0) / 2.0;
    Ok(specfun::log_gamma(&arg, ctx)?.exp())
}
