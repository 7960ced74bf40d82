//! Extended-precision quadrature: a nested tanh-sinh (double exponential)
//! rule for integrands with algebraic endpoint singularities, and
//! Gauss-Legendre for analytic integrands on finite intervals.
//!
//! The tanh-sinh driver integrates several integrands sharing one node set
//! (all Hankel moments are accumulated from a single weight evaluation per
//! node). Endpoint distances are handed to the integrand explicitly so that
//! `|x - mu|^p` can be formed without cancellation when `mu` is an endpoint.

use rayon::prelude::*;
use rug::float::Constant;
use rug::Float;

use crate::error::{LabError, Result};

/// Lowest level at which convergence may be declared.
const MIN_LEVEL: u32 = 3;
/// Nodes per parallel work unit. Fixed so that the summation tree does not
/// depend on the number of threads.
const CHUNK: usize = 32;

/// A finite integration interval together with the algebraic exponents of
/// the integrand at its endpoints (`f ~ dist^exponent`, exponent > -1).
#[derive(Debug, Clone)]
pub struct Segment {
    pub a: Float,
    pub b: Float,
    pub left_exponent: f64,
    pub right_exponent: f64,
}

impl Segment {
    pub fn new(a: Float, b: Float) -> Self {
        Self {
            a,
            b,
            left_exponent: 0.0,
            right_exponent: 0.0,
        }
    }
}

/// A quadrature abscissa with its distances to both segment endpoints.
#[derive(Debug, Clone)]
pub struct Node {
    /// Index of the segment the node belongs to.
    pub segment: usize,
    pub x: Float,
    pub from_left: Float,
    pub from_right: Float,
}

#[derive(Debug, Clone)]
pub struct MultiQuadrature {
    pub values: Vec<Float>,
    /// Integrals of the absolute integrands, used as error scales.
    pub abs_values: Vec<Float>,
    /// Largest relative change between the last two levels.
    pub rel_change: Float,
    pub level: u32,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct TanhSinh {
    bits: u32,
    /// `-log10` of the target relative tolerance.
    tol_digits: f64,
    /// `-log10` of the relative size below which endpoint contributions are
    /// dropped.
    cutoff_digits: f64,
    max_level: u32,
}

impl TanhSinh {
    pub fn new(bits: u32, tol_digits: f64, cutoff_digits: f64) -> Self {
        Self {
            bits,
            tol_digits,
            cutoff_digits,
            max_level: 14,
        }
    }

    pub fn with_max_level(mut self, max_level: u32) -> Self {
        self.max_level = max_level;
        self
    }

    /// Largest `|t|` needed on one side: beyond it the transformed integrand
    /// is below `10^-cutoff` relative to the segment scale.
    fn t_max(&self, exponent: f64) -> f64 {
        let ln_delta = -self.cutoff_digits * std::f64::consts::LN_10 / (1.0 + exponent).max(1e-3);
        // 1 - tanh(u) ~ 2 exp(-2u)
        let u = (std::f64::consts::LN_2 - ln_delta) / 2.0;
        (2.0 * u / std::f64::consts::PI).asinh() + 0.25
    }

    fn node(&self, index: usize, seg: &Segment, half: &Float, t: f64) -> (Node, Float) {
        let bits = self.bits;
        let tt = Float::with_val(bits, t.abs());
        let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
        let u = Float::with_val(bits, tt.sinh_ref()) * &half_pi;
        let q = (-(u * 2u32)).exp();
        let one_plus_q = Float::with_val(bits, 1u32 + &q);
        let near = Float::with_val(bits, half * &q) * 2u32 / &one_plus_q;
        let far = Float::with_val(bits, half * 2u32) / &one_plus_q;
        let weight = Float::with_val(bits, half * &half_pi) * tt.cosh() * q * 4u32
            / Float::with_val(bits, one_plus_q.square_ref());
        let node = if t > 0.0 {
            Node {
                segment: index,
                x: Float::with_val(bits, &seg.b - &near),
                from_left: far,
                from_right: near,
            }
        } else if t < 0.0 {
            Node {
                segment: index,
                x: Float::with_val(bits, &seg.a + &near),
                from_left: near,
                from_right: far,
            }
        } else {
            Node {
                segment: index,
                x: Float::with_val(bits, &seg.a + half),
                from_left: half.clone(),
                from_right: half.clone(),
            }
        };
        (node, weight)
    }

    /// Abscissae `t` of one refinement level on one segment.
    fn level_points(level: u32, t_left: f64, t_right: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        if level == 0 {
            let kl = t_left.floor() as i64;
            let kr = t_right.floor() as i64;
            for k in -kl..=kr {
                pts.push(k as f64);
            }
        } else {
            let h = (0.5f64).powi(level as i32);
            let jl = ((t_left / h + 1.0) / 2.0).floor() as i64;
            let jr = ((t_right / h + 1.0) / 2.0).floor() as i64;
            for j in -jl..jr {
                pts.push((2 * j + 1) as f64 * h);
            }
        }
        pts
    }

    /// Integrate `nout` integrands over the union of `segments`.
    pub fn integrate<F>(&self, segments: &[Segment], nout: usize, f: F) -> Result<MultiQuadrature>
    where
        F: Fn(&Node) -> Vec<Float> + Sync,
    {
        let bits = self.bits;
        let halves: Vec<Float> = segments
            .iter()
            .map(|s| Float::with_val(bits, &s.b - &s.a) / 2u32)
            .collect();
        let limits: Vec<(f64, f64)> = segments
            .iter()
            .map(|s| (self.t_max(s.left_exponent), self.t_max(s.right_exponent)))
            .collect();
        let tol = crate::precision::pow10(bits, -self.tol_digits);

        let mut raw = vec![Float::new(bits); nout];
        let mut raw_abs = vec![Float::new(bits); nout];
        let mut previous: Option<Vec<Float>> = None;
        let mut evaluations = 0usize;
        let mut last_change = Float::with_val(bits, rug::float::Special::Infinity);

        for level in 0..=self.max_level {
            let work: Vec<(usize, f64)> = segments
                .iter()
                .enumerate()
                .flat_map(|(i, _)| {
                    Self::level_points(level, limits[i].0, limits[i].1)
                        .into_iter()
                        .map(move |t| (i, t))
                })
                .collect();
            evaluations += work.len();

            let partials: Vec<(Vec<Float>, Vec<Float>)> = work
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let mut s = vec![Float::new(bits); nout];
                    let mut sa = vec![Float::new(bits); nout];
                    for &(i, t) in chunk {
                        let (node, w) = self.node(i, &segments[i], &halves[i], t);
                        if w.is_zero() {
                            continue;
                        }
                        let vals = f(&node);
                        debug_assert_eq!(vals.len(), nout);
                        for (k, v) in vals.iter().enumerate() {
                            let term = Float::with_val(bits, v * &w);
                            sa[k] += term.clone().abs();
                            s[k] += term;
                        }
                    }
                    (s, sa)
                })
                .collect();
            for (s, sa) in partials {
                for k in 0..nout {
                    raw[k] += &s[k];
                    raw_abs[k] += &sa[k];
                }
            }

            let h = Float::with_val(bits, 1u32) >> level;
            let current: Vec<Float> = raw.iter().map(|r| Float::with_val(bits, r * &h)).collect();
            if let Some(prev) = &previous {
                let mut worst = Float::new(bits);
                for k in 0..nout {
                    let scale = Float::with_val(bits, &raw_abs[k] * &h);
                    if scale.is_zero() {
                        continue;
                    }
                    let d = Float::with_val(bits, &current[k] - &prev[k]).abs() / scale;
                    if d > worst {
                        worst = d;
                    }
                }
                let converged = level >= MIN_LEVEL && worst <= tol;
                last_change = worst;
                if converged {
                    let abs_values = raw_abs.iter().map(|r| Float::with_val(bits, r * &h)).collect();
                    return Ok(MultiQuadrature {
                        values: current,
                        abs_values,
                        rel_change: last_change,
                        level,
                        evaluations,
                    });
                }
            }
            previous = Some(current);
        }
        Err(LabError::PrecisionUnreachable {
            stage: "tanh-sinh quadrature",
            reached: format!(
                "level {} with relative change {:.3e}",
                self.max_level,
                last_change.to_f64()
            ),
        })
    }
}

/// Gauss-Legendre rule on [-1, 1] at extended precision.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

impl GaussLegendre {
    pub fn new(order: usize, bits: u32) -> Self {
        assert!(order >= 1);
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        let half = order / 2;
        let tol = Float::with_val(bits, 1u32) >> (bits - 4);
        for i in 0..half {
            let guess =
                (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut x = Float::with_val(bits, guess);
            let mut last_dp = Float::new(bits);
            for _ in 0..200 {
                let (p, dp) = legendre_with_derivative(order, &x);
                let dx = Float::with_val(bits, &p / &dp);
                x -= &dx;
                last_dp = dp;
                if dx.abs() <= tol {
                    let (_, dp) = legendre_with_derivative(order, &x);
                    last_dp = dp;
                    break;
                }
            }
            let one_minus = Float::with_val(bits, 1u32 - Float::with_val(bits, x.square_ref()));
            let w = Float::with_val(bits, 2u32) / (one_minus * Float::with_val(bits, last_dp.square_ref()));
            nodes.push(x.clone());
            weights.push(w.clone());
            nodes.push(-x);
            weights.push(w);
        }
        if order % 2 == 1 {
            let x = Float::new(bits);
            let (_, dp) = legendre_with_derivative(order, &x);
            let w = Float::with_val(bits, 2u32) / Float::with_val(bits, dp.square_ref());
            nodes.push(x);
            weights.push(w);
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F>(&self, a: &Float, b: &Float, mut f: F) -> Float
    where
        F: FnMut(&Float) -> Float,
    {
        let bits = a.prec().max(b.prec());
        let half = Float::with_val(bits, b - a) / 2u32;
        let mid = Float::with_val(bits, b + a) / 2u32;
        let mut sum = Float::new(bits);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = Float::with_val(bits, x * &half) + &mid;
            sum += f(&t) * w;
        }
        sum * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: &Float) -> (Float, Float) {
    let bits = x.prec();
    let mut p0 = Float::with_val(bits, 1u32);
    let mut p1 = x.clone();
    for k in 1..n {
        let kf = k as u32;
        let next = (Float::with_val(bits, x * &p1) * (2 * kf + 1) - Float::with_val(bits, &p0 * kf))
            / (kf + 1);
        p0 = std::mem::replace(&mut p1, next);
    }
    // (x^2 - 1) P_n' = n (x P_n - P_{n-1})
    let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
    let dp = (Float::with_val(bits, x * &p1) - &p0) * (n as u32) / x2m1;
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    const BITS: u32 = 240;

    fn f(v: f64) -> Float {
        Float::with_val(BITS, v)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(9, BITS);
        assert_eq!(gl.order(), 9);
        // degree 17 is the highest exact degree for 9 nodes
        let v = gl.integrate(&f(0.0), &f(1.0), |x| x.clone().pow(17u32));
        let err = (v - Float::with_val(BITS, 1u32) / 18u32).abs();
        assert!(err < 1e-65, "{err}");
    }

    #[test]
    fn gauss_legendre_analytic_integrand() {
        let gl = GaussLegendre::new(60, BITS);
        let v = gl.integrate(&f(0.0), &f(2.0), |x| x.clone().exp());
        let exact = f(2.0).exp() - 1u32;
        assert!((v - exact).abs() < 1e-60);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // int_0^1 x^{-0.75} dx = 4
        let mut seg = Segment::new(f(0.0), f(1.0));
        seg.left_exponent = -0.75;
        let ts = TanhSinh::new(BITS, 50.0, 62.0);
        let r = ts
            .integrate(&[seg], 1, |node| {
                vec![node.from_left.clone().pow(&f(-0.75))]
            })
            .unwrap();
        let err = (r.values[0].clone() - f(4.0)).abs();
        assert!(err < 1e-48, "err {err}, level {}", r.level);
    }

    #[test]
    fn tanh_sinh_several_outputs_share_nodes() {
        // int_{-1}^{1} sqrt(1-x^2) x^k dx for k = 0, 2
        let mut seg = Segment::new(f(-1.0), f(1.0));
        seg.left_exponent = 0.5;
        seg.right_exponent = 0.5;
        let ts = TanhSinh::new(BITS, 40.0, 60.0);
        let r = ts
            .integrate(&[seg], 2, |node| {
                let s = Float::with_val(BITS, &node.from_left * &node.from_right).sqrt();
                let x2 = Float::with_val(BITS, node.x.square_ref());
                vec![s.clone(), s * x2]
            })
            .unwrap();
        let pi = Float::with_val(BITS, Constant::Pi);
        assert!((r.values[0].clone() - pi.clone() / 2u32).abs() < 1e-38);
        assert!((r.values[1].clone() - pi / 8u32).abs() < 1e-38);
    }

    #[test]
    fn tanh_sinh_reports_unreachable() {
        let seg = Segment::new(f(0.0), f(1.0));
        let ts = TanhSinh::new(BITS, 60.0, 62.0).with_max_level(3);
        // oscillatory integrand cannot settle at level 3
        let r = ts.integrate(&[seg], 1, |node| {
            vec![(Float::with_val(BITS, &node.x * 400u32)).sin()]
        });
        assert!(matches!(r, Err(LabError::PrecisionUnreachable { .. })));
    }
}
