//! Two-group MRL comparisons, paired by draw index.

use serde::{Deserialize, Serialize};

use super::par_map;
use crate::error::{invalid, Error, Result};
use crate::mixture::MixtureParams;
use crate::numeric::Grid;
use crate::sampler::Draw;

/// `corr(θ, φ)` of the baseline covariance in each draw.
pub fn atom_correlation(draws: &[Draw]) -> Vec<f64> {
    draws.iter().map(Draw::correlation).collect()
}

fn check_paired(a: &[MixtureParams], b: &[MixtureParams]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Err(invalid("no draws to compare"));
    }
    Ok(())
}

/// `m[b][j]`: MRL of draw `b` at `ts[j]`.
fn mrl_matrix(draws: &[MixtureParams], ts: &[f64], floor: f64) -> Vec<Vec<Option<f64>>> {
    par_map(draws, |p| p.mrl_points(ts, floor))
}

/// Samples of `m_A(t) - m_B(t)` at each requested `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSamples {
    pub t: Vec<f64>,
    /// Differences over the pairs where both MRLs are defined.
    pub values: Vec<Vec<f64>>,
    /// Pairs dropped at each `t` because a group's MRL was missing.
    pub missing: Vec<usize>,
}

impl DifferenceSamples {
    pub fn is_flagged(&self, j: usize) -> bool {
        self.missing[j] > 0
    }
}

pub fn mrl_difference(
    a: &[MixtureParams],
    b: &[MixtureParams],
    t_points: &[f64],
    survival_floor: f64,
) -> Result<DifferenceSamples> {
    check_paired(a, b)?;
    if let Some(t) = t_points.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(invalid(format!("difference points must be finite and >= 0, got {t}")));
    }
    let (ma, mb) = (mrl_matrix(a, t_points, survival_floor), mrl_matrix(b, t_points, survival_floor));
    let cols = (0..t_points.len()).map(|j| {
        let mut d = Vec::with_capacity(ma.len());
        let mut missing = 0;
        for (x, y) in ma.iter().zip(&mb) {
            match (x[j], y[j]) {
                (Some(x), Some(y)) => d.push(x - y),
                _ => missing += 1,
            }
        }
        (d, missing)
    });
    let (values, missing) = cols.unzip();
    Ok(DifferenceSamples {
        t: t_points.to_vec(),
        values,
        missing,
    })
}

/// Whether the draws behind a curve came from the prior or the posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    Prior,
    Posterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityCurve {
    pub source: CurveSource,
    pub grid: Grid,
    /// NaN where no pair was usable.
    pub prob: Vec<f64>,
    /// Usable pairs at each point.
    pub pairs: Vec<usize>,
}

/// Fraction of paired draws with `m_A(t) > m_B(t)`; ties count one half.
pub fn prob_mrl_greater(
    a: &[MixtureParams],
    b: &[MixtureParams],
    grid: &Grid,
    source: CurveSource,
    survival_floor: f64,
) -> Result<ProbabilityCurve> {
    check_paired(a, b)?;
    let ts = grid.points();
    let (ma, mb) = (mrl_matrix(a, ts, survival_floor), mrl_matrix(b, ts, survival_floor));
    prob_greater_from_values(&ma, &mb, grid, source)
}

/// As [`prob_mrl_greater`], from MRL values already computed on `grid`
/// (`m[b][j]`, `None` where missing).
pub fn prob_greater_from_values(
    ma: &[Vec<Option<f64>>],
    mb: &[Vec<Option<f64>>],
    grid: &Grid,
    source: CurveSource,
) -> Result<ProbabilityCurve> {
    if ma.len() != mb.len() {
        return Err(Error::LengthMismatch {
            expected: ma.len(),
            got: mb.len(),
        });
    }
    let ts = grid.points();
    if let Some(bad) = ma.iter().chain(mb).find(|r| r.len() != ts.len()) {
        return Err(Error::LengthMismatch {
            expected: ts.len(),
            got: bad.len(),
        });
    }
    let cols = (0..ts.len()).map(|j| {
        let (mut halves, mut n) = (0usize, 0usize);
        for (x, y) in ma.iter().zip(mb) {
            if let (Some(x), Some(y)) = (x[j], y[j]) {
                n += 1;
                halves += if x > y {
                    2
                } else if x == y {
                    1
                } else {
                    0
                };
            }
        }
        let p = if n == 0 {
            f64::NAN
        } else {
            halves as f64 / (2 * n) as f64
        };
        (p, n)
    });
    let (prob, pairs) = cols.unzip();
    Ok(ProbabilityCurve {
        source,
        grid: grid.clone(),
        prob,
        pairs,
    })
}
