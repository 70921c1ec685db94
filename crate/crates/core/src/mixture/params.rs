use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::linalg::{Mat2, Vec2};

/// One gamma kernel on the log scale: shape `e^θ`, rate `e^φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub theta: f64,
    pub phi: f64,
}

impl Atom {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Build from shape and rate.
    pub fn from_shape_rate(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
            return Err(invalid(format!("gamma kernel needs shape, rate > 0, got ({shape}, {rate})")));
        }
        Ok(Self::new(shape.ln(), rate.ln()))
    }

    pub fn shape(&self) -> f64 {
        self.theta.exp()
    }

    pub fn rate(&self) -> f64 {
        self.phi.exp()
    }

    /// Kernel mean `e^{θ-φ}`.
    pub fn mean(&self) -> f64 {
        (self.theta - self.phi).exp()
    }

    pub fn as_vec(&self) -> Vec2 {
        [self.theta, self.phi]
    }
}

/// A truncated stick-breaking gamma mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    weights: Vec<f64>,
    atoms: Vec<Atom>,
}

impl MixtureParams {
    pub fn new(weights: Vec<f64>, atoms: Vec<Atom>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("mixture needs at least one component"));
        }
        if weights.len() != atoms.len() {
            return Err(Error::LengthMismatch {
                expected: weights.len(),
                got: atoms.len(),
            });
        }
        if weights.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(invalid("mixture weights must be finite and non-negative"));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("mixture weights sum to {s}, not 1")));
        }
        if atoms.iter().any(|a| !(a.theta.is_finite() && a.phi.is_finite())) {
            return Err(invalid("mixture atoms must be finite"));
        }
        Ok(Self { weights, atoms })
    }

    /// Single gamma kernel with the given shape and rate.
    pub fn single(shape: f64, rate: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![Atom::from_shape_rate(shape, rate)?])
    }

    pub fn truncation(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `E(T; G_L) = Σ p_l e^{θ_l - φ_l}`.
    pub fn mean(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.atoms)
            .map(|(p, a)| p * a.mean())
            .sum()
    }
}

/// Weights from stick-breaking fractions `v_1..v_{L-1}`; the last weight
/// takes whatever remains.
pub fn stick_break(v: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = v.iter().find(|x| !(**x >= 0.0 && **x <= 1.0)) {
        return Err(invalid(format!("stick fractions must lie in [0, 1], got {bad}")));
    }
    let mut p = Vec::with_capacity(v.len() + 1);
    let mut rest = 1.0;
    for &vr in v {
        p.push(vr * rest);
        rest *= 1.0 - vr;
    }
    let used: f64 = p.iter().sum();
    p.push((1.0 - used).max(0.0));
    Ok(p)
}

/// Smallest `L` with `(α/(α+1))^L <= ε`, together with the expected
/// captured mass `1 - (α/(α+1))^L`.
pub fn truncation_level(alpha: f64, eps: f64) -> Result<(usize, f64)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("DP precision must be positive, got {alpha}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("tail mass must lie in (0, 1), got {eps}")));
    }
    let r = alpha / (alpha + 1.0);
    let mut l = ((eps.ln() / r.ln()).ceil() as usize).max(1);
    while r.powi(l as i32) > eps {
        l += 1;
    }
    while l > 1 && r.powi(l as i32 - 1) <= eps {
        l -= 1;
    }
    Ok((l, 1.0 - r.powi(l as i32)))
}

/// `A(ψ) = exp((1,-1)μ + ½(1,-1)Σ(1,-1)')`, the prior mean of the kernel mean.
pub fn finiteness_a(mu: &Vec2, sigma: &Mat2) -> Result<f64> {
    if !sigma.is_psd() || !sigma.is_finite() {
        return Err(invalid("Σ must be symmetric positive semi-definite"));
    }
    let t = [1.0, -1.0];
    Ok((mu[0] - mu[1] + 0.5 * sigma.quad_form(&t)).exp())
}

/// `α log((α + n)/α)`, the usual approximation to the expected number of
/// distinct clusters among `n` draws.
pub fn expected_clusters(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) || n == 0 {
        return Err(invalid("expected_clusters needs α > 0 and n >= 1"));
    }
    Ok(alpha * ((alpha + n as f64) / alpha).ln())
}
