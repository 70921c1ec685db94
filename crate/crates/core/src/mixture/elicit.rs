//! Prior hyperparameters for the gamma DPMM and their elicitation from a
//! rough center and range of the data.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::linalg::{Mat2, Vec2};

/// `μ ~ N₂(a_μ, B_μ)`, `Σ ~ IW(a_Σ, B_Σ)`, `α ~ Gamma(a_α, b_α)` (rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub a_mu: Vec2,
    pub b_mu: Mat2,
    pub a_sigma: f64,
    pub b_sigma: Mat2,
    pub a_alpha: f64,
    pub b_alpha: f64,
}

impl Hyperparams {
    /// Isotropic `B_μ = B_Σ = b'·I`, `a_Σ = 4`, `α ~ Gamma(2, 1)`.
    pub fn isotropic(a_mu: Vec2, b_prime: f64) -> Self {
        Self {
            a_mu,
            b_mu: Mat2::scaled_identity(b_prime),
            a_sigma: 4.0,
            b_sigma: Mat2::scaled_identity(b_prime),
            a_alpha: 2.0,
            b_alpha: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_mu[0].is_finite() && self.a_mu[1].is_finite()) {
            return Err(invalid("a_μ must be finite"));
        }
        if !self.b_mu.is_spd() || !self.b_sigma.is_spd() {
            return Err(invalid("B_μ and B_Σ must be symmetric positive definite"));
        }
        if !(self.a_sigma > 3.0 && self.a_sigma.is_finite()) {
            return Err(invalid(format!(
                "a_Σ must exceed 3 for a finite inverse Wishart mean, got {}",
                self.a_sigma
            )));
        }
        if !(self.a_alpha > 0.0 && self.b_alpha > 0.0) {
            return Err(invalid("a_α and b_α must be positive"));
        }
        Ok(())
    }
}

const T1: Vec2 = [1.0, -2.0];
const T2: Vec2 = [2.0, -2.0];
const T3: Vec2 = [1.0, -1.0];

fn dot(a: &Vec2, b: &Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn exponent(h: &Hyperparams, t: &Vec2) -> f64 {
    let k = h.a_sigma - 3.0;
    dot(t, &h.a_mu) + 0.5 * h.b_mu.quad_form(t) + 0.5 * h.b_sigma.quad_form(t) / k
}

/// First-order approximation to the prior marginal `Var(T)`:
/// `e^{c(t₁)} + e^{c(t₂)} - e^{2c(t₃)}` with
/// `c(t) = t'a_μ + ½t'B_μt + ½t'B_Σt/(a_Σ - 3)`.
pub fn approx_prior_variance(h: &Hyperparams) -> f64 {
    exponent(h, &T1).exp() + exponent(h, &T2).exp() - (2.0 * exponent(h, &T3)).exp()
}

/// Prior marginal `E(T) ≈ e^{c(t₃)}`.
pub fn approx_prior_mean(h: &Hyperparams) -> f64 {
    exponent(h, &T3).exp()
}

/// Elicited hyperparameters with the targets they were solved against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Elicitation {
    pub hyper: Hyperparams,
    pub target_mean: f64,
    pub target_variance: f64,
    pub b_prime: f64,
    /// `approx_prior_variance - target_variance` at the solution.
    pub residual: f64,
}

const B_LO: f64 = 1e-6;
const B_HI: f64 = 10.0;

/// Elicit `a_μ` and `b' = b'_μ = b'_Σ` from a data center and range.
///
/// The prior range is twice the data range, so the variance target is
/// `(2·range/4)²`. A share `q_e` of the mean goes to `e^{a_{μ1}-a_{μ2}}` and
/// a share `q_v` of the variance to `e^{a_{μ1}-2a_{μ2}}`; `b'` then solves the
/// variance approximation by bisection on `(1e-6, 10)`.
pub fn elicit_hyperparameters(center: f64, range: f64, q_e: f64, q_v: f64) -> Result<Elicitation> {
    if !(center > 0.0 && center.is_finite() && range > 0.0 && range.is_finite()) {
        return Err(invalid("center and range must be positive"));
    }
    if !(q_e > 0.0 && q_e <= 1.0 && q_v > 0.0 && q_v < 1.0) {
        return Err(invalid("q_E must lie in (0, 1] and q_V in (0, 1)"));
    }
    let target_mean = center;
    let target_variance = (2.0 * range / 4.0).powi(2);
    let d1 = (q_e * target_mean).ln();
    let d2 = (q_v * target_variance).ln();
    let a_mu = [2.0 * d1 - d2, d1 - d2];
    let resid = |b: f64| approx_prior_variance(&Hyperparams::isotropic(a_mu, b)) - target_variance;

    let (mut lo, mut hi) = (B_LO, B_HI);
    let (r_lo, r_hi) = (resid(lo), resid(hi));
    if !(r_lo <= 0.0 && r_hi >= 0.0) {
        let residual = if r_lo.abs() < r_hi.abs() { r_lo } else { r_hi };
        return Err(Error::NoSolution {
            message: format!(
                "variance target {target_variance} is not reached for b' in ({B_LO}, {B_HI})"
            ),
            residual,
        });
    }
    let mut b = 0.5 * (lo + hi);
    for _ in 0..400 {
        b = 0.5 * (lo + hi);
        let r = resid(b);
        if r.abs() <= 1e-10 || hi - lo <= f64::EPSILON * b {
            break;
        }
        if r < 0.0 {
            lo = b;
        } else {
            hi = b;
        }
    }
    let residual = resid(b);
    if residual.abs() > 1e-10 * target_variance.max(1.0) {
        return Err(Error::NoSolution {
            message: "bisection on b' stalled".into(),
            residual,
        });
    }
    Ok(Elicitation {
        hyper: Hyperparams::isotropic(a_mu, b),
        target_mean,
        target_variance,
        b_prime: b,
        residual,
    })
}
