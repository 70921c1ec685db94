use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Strictly increasing, strictly positive evaluation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if !points.iter().all(|t| t.is_finite()) {
            return Err(invalid("grid points must be finite"));
        }
        if points[0] <= 0.0 {
            return Err(invalid(format!("grid must start above 0, got {}", points[0])));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(invalid(format!(
                "grid must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    /// `n` points equally spaced on the log scale from `lo` to `hi` inclusive.
    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || n < 2 {
            return Err(invalid(format!("bad log grid ({lo}, {hi}, {n})")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let step = (b - a) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
        points[0] = lo;
        points[n - 1] = hi;
        Self::new(points)
    }

    /// `n` equally spaced points from `lo` to `hi` inclusive.
    pub fn linear(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || n < 2 {
            return Err(invalid(format!("bad linear grid ({lo}, {hi}, {n})")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        points[n - 1] = hi;
        Self::new(points)
    }

    /// Default analysis grid for a sample: 512 log-spaced points from a tenth
    /// of the smallest observation to 1.5 times the largest.
    pub fn for_data(times: &[f64]) -> Result<Self> {
        let lo = times.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(invalid("cannot build a grid from an empty or non-positive sample"));
        }
        Self::log_spaced(lo / 10.0, 1.5 * hi, 512)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Grid::new(v)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Self {
        g.points
    }
}
