use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Right-censored lifetimes for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub group: String,
    times: Vec<f64>,
    /// `δ_i`: true when `t_i` is right censored.
    censored: Vec<bool>,
}

impl Dataset {
    pub fn new(group: impl Into<String>, times: Vec<f64>, censored: Vec<bool>) -> Result<Self> {
        if times.len() != censored.len() {
            return Err(Error::LengthMismatch {
                expected: times.len(),
                got: censored.len(),
            });
        }
        if let Some((i, t)) = times.iter().enumerate().find(|(_, t)| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid(format!("time {i} must be positive and finite, got {t}")));
        }
        Ok(Self {
            group: group.into(),
            times,
            censored,
        })
    }

    /// All times observed.
    pub fn observed(group: impl Into<String>, times: Vec<f64>) -> Result<Self> {
        let n = times.len();
        Self::new(group, times, vec![false; n])
    }

    /// No observations; the sampler then draws from the prior.
    pub fn empty(group: impl Into<String>) -> Self {
        Self {
            group: group.into(),
            times: Vec::new(),
            censored: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn censored(&self) -> &[bool] {
        &self.censored
    }

    /// `δ_i ∈ {0, 1}`.
    pub fn delta(&self, i: usize) -> u8 {
        self.censored[i] as u8
    }

    pub fn n_censored(&self) -> usize {
        self.censored.iter().filter(|c| **c).count()
    }

    /// Replace the times, keeping the censoring pattern. Used when data are
    /// redrawn from the model.
    pub fn set_times(&mut self, times: Vec<f64>) -> Result<()> {
        *self = Self::new(std::mem::take(&mut self.group), times, std::mem::take(&mut self.censored))?;
        Ok(())
    }
}
