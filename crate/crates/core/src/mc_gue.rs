//! Monte Carlo estimate of `<prod_j |det(H - mu_j)|^{2 alpha_j}>` over GUE
//! matrices with weight `e^{-x^2}`, sampled through the tridiagonal
//! beta = 2 Hermite ensemble.
//!
//! Sample `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so every
//! sample is reproducible on its own and the parallel map can be reduced in
//! index order.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::weights::WeightSpec;

pub const MIN_SAMPLES: usize = 1000;
const EIGEN_MAX_ITER: usize = 10_000;
const RESAMPLE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    /// `ln` of the sample mean.
    pub mean_log: f64,
    /// Standard error of the mean divided by the mean.
    pub stderr_rel: f64,
    /// Samples that entered the mean.
    pub samples: usize,
    pub seed: u64,
}

/// Gaussian variates by Box-Muller, one pair per two uniforms.
struct Normals<'a> {
    rng: &'a mut ChaCha8Rng,
    spare: Option<f64>,
}

impl<'a> Normals<'a> {
    fn new(rng: &'a mut ChaCha8Rng) -> Self {
        Self { rng, spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = 1.0 - self.rng.random::<f64>();
        let u2: f64 = self.rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Eigenvalues of one GUE(n) matrix for the weight `e^{-x^2}`: tridiagonal
/// with `N(0, 1/2)` diagonal and `chi_{2k} / 2` off-diagonal, `k = n-1..1`.
pub fn sample_spectrum(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(LabError::InvalidSpec("n must be positive".into()));
    }
    for attempt in 0..RESAMPLE_LIMIT {
        let mut normals = Normals::new(rng);
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = normals.next() * std::f64::consts::FRAC_1_SQRT_2;
        }
        for i in 0..n - 1 {
            let dof = 2 * (n - 1 - i);
            let chi2: f64 = (0..dof).map(|_| normals.next().powi(2)).sum();
            let v = chi2.sqrt() / 2.0;
            m[(i, i + 1)] = v;
            m[(i + 1, i)] = v;
        }
        match SymmetricEigen::try_new(m, f64::EPSILON, EIGEN_MAX_ITER) {
            Some(eig) => return Ok(eig.eigenvalues.iter().copied().collect()),
            None => log::warn!("eigensolver did not converge (attempt {attempt}), resampling"),
        }
    }
    Err(LabError::Consistency(format!(
        "eigensolver failed {RESAMPLE_LIMIT} times in a row"
    )))
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `sum_j 2 alpha_j sum_i ln |x_i - mu_j|`, or `None` when an eigenvalue
/// hits a singular point exactly.
fn log_weight(spectrum: &[f64], mus: &[f64], alphas: &[f64]) -> Option<f64> {
    let mut total = 0.0;
    for (&mu, &a) in mus.iter().zip(alphas) {
        if a == 0.0 {
            continue;
        }
        let mut s = 0.0;
        for &x in spectrum {
            let d = (x - mu).abs();
            if d == 0.0 {
                return None;
            }
            s += d.ln();
        }
        total += 2.0 * a * s;
    }
    Some(total)
}

/// Pairwise sum, fixed tree for a given length.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample mean of `prod_j |det(H - mu_j)|^{2 alpha_j}` in log form.
pub fn mc_average_log(spec: &WeightSpec, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(LabError::InvalidSpec(format!(
            "samples = {samples}, need at least {MIN_SAMPLES}"
        )));
    }
    if spec.is_trivial() {
        return Ok(McEstimate {
            mean_log: 0.0,
            stderr_rel: 0.0,
            samples,
            seed,
        });
    }
    let n = spec.n();
    let mus: Vec<f64> = spec.mus(64).iter().map(|m| m.to_f64()).collect();
    let alphas = spec.alphas().to_vec();
    let logs: Vec<Result<Option<f64>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let spectrum = sample_spectrum(n, &mut rng)?;
            let l = log_weight(&spectrum, &mus, &alphas);
            if l.is_none() {
                log::warn!("sample {i}: eigenvalue at a singular point, discarded");
            }
            Ok(l)
        })
        .collect();
    let mut kept = Vec::with_capacity(samples);
    for l in logs {
        if let Some(v) = l? {
            kept.push(v);
        }
    }
    if kept.len() < 2 {
        return Err(LabError::Consistency("fewer than two usable samples".into()));
    }
    let shift = kept.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = kept.iter().map(|l| (l - shift).exp()).collect();
    let count = scaled.len() as f64;
    let mean = pairwise_sum(&scaled) / count;
    let sq: Vec<f64> = scaled.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (count - 1.0);
    Ok(McEstimate {
        mean_log: shift + mean.ln(),
        stderr_rel: var.sqrt() / (count.sqrt() * mean),
        samples: scaled.len(),
        seed,
    })
}
