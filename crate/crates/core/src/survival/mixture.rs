//! Finite mixtures of parametric laws, mainly for checking tail behaviour.

use serde::{Deserialize, Serialize};

use super::dist::DistSpec;
use crate::error::{invalid, Result};
use crate::numeric::log_sum_exp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricMixture {
    pub weights: Vec<f64>,
    pub components: Vec<DistSpec>,
}

impl ParametricMixture {
    pub fn new(weights: Vec<f64>, components: Vec<DistSpec>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(invalid("mixture needs matching, non-empty weights and components"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(invalid("mixture weights must be non-negative and sum to 1"));
        }
        for c in &components {
            c.validate()?;
        }
        Ok(Self { weights, components })
    }

    pub fn survival(&self, t: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.components)
            .map(|(w, c)| w * c.survival(t))
            .sum()
    }

    pub fn mean(&self) -> Result<f64> {
        self.mrl(0.0)
    }

    /// `Σ p_l S_l(t) m_l(t) / Σ p_l S_l(t)`, with the conditional weights
    /// formed in log space; 0 once every component's survival has underflowed.
    pub fn mrl(&self, t: f64) -> Result<f64> {
        let mut ls = Vec::with_capacity(self.weights.len());
        let mut ms = Vec::with_capacity(self.weights.len());
        for (w, c) in self.weights.iter().zip(&self.components) {
            let v = w.ln() + c.ln_survival(t);
            if v == f64::NEG_INFINITY {
                continue;
            }
            ls.push(v);
            ms.push(c.mrl(t)?);
        }
        if ls.is_empty() {
            return Ok(0.0);
        }
        let norm = log_sum_exp(&ls);
        Ok(ls.iter().zip(&ms).map(|(l, m)| (l - norm).exp() * m).sum())
    }
}
