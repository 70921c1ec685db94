use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::Grid;

/// Quantile of sorted data by linear interpolation between order statistics:
/// with `h = (n - 1)p`, `x₍⌊h⌋₎ + (h - ⌊h⌋)(x₍⌊h⌋+1₎ - x₍⌊h⌋₎)` (zero-based).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = (h.floor() as usize).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Pointwise posterior median and equal-tailed band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalGrid {
    pub grid: Grid,
    pub level: f64,
    /// NaN at flagged points.
    pub median: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Draws that contributed at each point.
    pub valid: Vec<usize>,
}

impl FunctionalGrid {
    /// Fewer than two usable draws at point `j`.
    pub fn is_flagged(&self, j: usize) -> bool {
        self.valid[j] < 2
    }

    pub fn n_flagged(&self) -> usize {
        (0..self.valid.len()).filter(|j| self.is_flagged(*j)).count()
    }
}

/// Bands from draw-indexed values `values[b][j]`; `None` marks a draw that is
/// missing at point `j` and is left out there.
pub fn pointwise_bands(values: &[Vec<Option<f64>>], grid: &Grid, level: f64) -> Result<FunctionalGrid> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("band level must lie in (0, 1), got {level}")));
    }
    if values.len() < 2 {
        return Err(invalid("bands need at least two draws"));
    }
    let m = grid.len();
    if let Some(bad) = values.iter().find(|v| v.len() != m) {
        return Err(Error::LengthMismatch {
            expected: m,
            got: bad.len(),
        });
    }
    let (pl, pu) = ((1.0 - level) / 2.0, 1.0 - (1.0 - level) / 2.0);
    let mut out = FunctionalGrid {
        grid: grid.clone(),
        level,
        median: Vec::with_capacity(m),
        lower: Vec::with_capacity(m),
        upper: Vec::with_capacity(m),
        valid: Vec::with_capacity(m),
    };
    let mut col = Vec::with_capacity(values.len());
    for j in 0..m {
        col.clear();
        col.extend(values.iter().filter_map(|v| v[j]).filter(|x| x.is_finite()));
        out.valid.push(col.len());
        if col.len() < 2 {
            out.median.push(f64::NAN);
            out.lower.push(f64::NAN);
            out.upper.push(f64::NAN);
            continue;
        }
        col.sort_by(f64::total_cmp);
        out.lower.push(quantile_sorted(&col, pl));
        out.median.push(quantile_sorted(&col, 0.5));
        out.upper.push(quantile_sorted(&col, pu));
    }
    Ok(out)
}
