//! Seeded random streams and the variate generators the samplers need.
//!
//! Gamma, beta and standard normal variates come from `rand_distr`; the
//! bivariate normal, inverse Wishart and categorical draws are built on top.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

use super::linalg::{Mat2, Vec2};
use crate::error::{invalid, Error, Result};

/// A reproducible random stream. One per chain; never shared.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent sub-stream `stream` of `seed`, used to give concurrent
    /// chains their own generators.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn std_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Gamma variate with the given shape and rate.
pub fn draw_gamma(shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
        return Err(invalid(format!("gamma requires shape, rate > 0, got ({shape}, {rate})")));
    }
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| invalid(e.to_string()))?;
    Ok(g.sample(rng))
}

pub fn draw_beta(a: f64, b: f64, rng: &mut RngStream) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(invalid(format!("beta requires a, b > 0, got ({a}, {b})")));
    }
    let d = Beta::new(a, b).map_err(|e| invalid(e.to_string()))?;
    Ok(d.sample(rng))
}

pub fn draw_normal(mean: f64, sd: f64, rng: &mut RngStream) -> Result<f64> {
    if !(sd >= 0.0 && sd.is_finite() && mean.is_finite()) {
        return Err(invalid(format!("normal requires finite mean and sd >= 0, got ({mean}, {sd})")));
    }
    Ok(mean + sd * rng.std_normal())
}

/// Cholesky factor for sampling; a positive semi-definite matrix that fails
/// the factorization gets `1e-10·trace` added to its diagonal once.
pub fn sampling_factor(cov: &Mat2) -> Result<Mat2> {
    if let Some(l) = cov.cholesky() {
        return Ok(l);
    }
    if cov.is_psd() && cov.trace() > 0.0 {
        let j = 1e-10 * cov.trace();
        if let Some(l) = cov.add(&Mat2::diag(j, j)).cholesky() {
            return Ok(l);
        }
    }
    Err(invalid(format!("covariance {:?} is not positive semi-definite", cov.0)))
}

/// Bivariate normal draw from a precomputed lower Cholesky factor.
pub fn draw_mvn2_chol(mean: &Vec2, chol: &Mat2, rng: &mut RngStream) -> Vec2 {
    let z = [rng.std_normal(), rng.std_normal()];
    let lz = chol.mul_vec(&z);
    [mean[0] + lz[0], mean[1] + lz[1]]
}

pub fn draw_mvn2(mean: &Vec2, cov: &Mat2, rng: &mut RngStream) -> Result<Vec2> {
    let l = sampling_factor(cov)?;
    Ok(draw_mvn2_chol(mean, &l, rng))
}

/// Inverse Wishart `IW(df, scale)` in dimension 2, mean `scale / (df - 3)`.
/// Drawn as the inverse of a Bartlett-decomposed `Wishart(df, scale⁻¹)`.
pub fn draw_inv_wishart2(df: f64, scale: &Mat2, rng: &mut RngStream) -> Result<Mat2> {
    if !(df > 1.0 && df.is_finite()) {
        return Err(invalid(format!("inverse Wishart needs df > 1 in dimension 2, got {df}")));
    }
    let prec = scale
        .inverse()
        .ok_or_else(|| invalid("inverse Wishart scale is singular"))?;
    let l = prec
        .symmetrize()
        .cholesky()
        .ok_or_else(|| invalid("inverse Wishart scale is not positive definite"))?;
    let c1 = 2.0 * draw_gamma(0.5 * df, 1.0, rng)?;
    let c2 = 2.0 * draw_gamma(0.5 * (df - 1.0), 1.0, rng)?;
    let a = Mat2([[c1.sqrt(), 0.0], [rng.std_normal(), c2.sqrt()]]);
    let la = l.mul(&a);
    let w = la.mul(&la.transpose());
    w.inverse()
        .map(|m| m.symmetrize())
        .ok_or_else(|| Error::Numeric("singular Wishart draw".into()))
}

/// Index drawn with probabilities proportional to `exp(log_weights)`.
pub fn draw_categorical_log(log_weights: &[f64], rng: &mut RngStream) -> Result<usize> {
    let max = log_weights
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Numeric(
            "categorical weights are all zero or non-finite".into(),
        ));
    }
    let total: f64 = log_weights.iter().map(|w| (w - max).exp()).sum();
    let target = rng.uniform() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, w) in log_weights.iter().enumerate() {
        let p = (w - max).exp();
        if p > 0.0 {
            last = k;
        }
        acc += p;
        if target < acc {
            return Ok(k);
        }
    }
    Ok(last)
}

/// Index drawn from an explicit probability vector summing to one.
pub fn draw_categorical(probs: &[f64], rng: &mut RngStream) -> Result<usize> {
    if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0)) {
        return Err(invalid("categorical probabilities must be non-negative"));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("categorical probabilities sum to {s}, not 1")));
    }
    let u = rng.uniform();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok(k);
        }
    }
    Ok(probs.iter().rposition(|p| *p > 0.0).unwrap_or(0))
}
