//! Qualitative shape of the mean residual life function.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::dist::DistSpec;
use crate::error::{invalid, Error, Result};
use crate::numeric::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ShapeLabel {
    Inc,
    Dcr,
    Constant,
    /// Bathtub: decreasing, then increasing.
    Bt,
    /// Upside-down bathtub: increasing, then decreasing.
    Ubt,
    Undefined,
}

impl ShapeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShapeLabel::Inc => "INC",
            ShapeLabel::Dcr => "DCR",
            ShapeLabel::Constant => "CONSTANT",
            ShapeLabel::Bt => "BT",
            ShapeLabel::Ubt => "UBT",
            ShapeLabel::Undefined => "UNDEFINED",
        }
    }
}

impl fmt::Display for ShapeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShapeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "INC" => ShapeLabel::Inc,
            "DCR" => ShapeLabel::Dcr,
            "CONSTANT" => ShapeLabel::Constant,
            "BT" => ShapeLabel::Bt,
            "UBT" => ShapeLabel::Ubt,
            "UNDEFINED" => ShapeLabel::Undefined,
            _ => return Err(invalid(format!("unknown shape label {s:?}"))),
        })
    }
}

fn by_shape(g: f64) -> ShapeLabel {
    if g < 1.0 {
        ShapeLabel::Inc
    } else if g > 1.0 {
        ShapeLabel::Dcr
    } else {
        ShapeLabel::Constant
    }
}

/// Tabulated MRL shape for a parametric law.
pub fn classify_mrl_shape(dist: &DistSpec) -> ShapeLabel {
    if dist.validate().is_err() {
        return ShapeLabel::Undefined;
    }
    match *dist {
        DistSpec::Gamma { shape, .. } | DistSpec::Weibull { shape, .. } => by_shape(shape),
        DistSpec::Gompertz { .. } => ShapeLabel::Dcr,
        DistSpec::Lognormal { .. } => ShapeLabel::Bt,
        DistSpec::Loglogistic { shape, .. } => {
            if shape > 1.0 {
                ShapeLabel::Bt
            } else {
                ShapeLabel::Undefined
            }
        }
        DistSpec::LinearMrl { a, .. } => {
            if a > 0.0 {
                ShapeLabel::Inc
            } else if a < 0.0 {
                ShapeLabel::Dcr
            } else {
                ShapeLabel::Constant
            }
        }
        DistSpec::ExpWeibull { alpha, theta, .. } => {
            let at = alpha * theta;
            if theta == 1.0 {
                by_shape(alpha)
            } else if alpha < 1.0 && at <= 1.0 {
                ShapeLabel::Inc
            } else if alpha > 1.0 && at >= 1.0 {
                ShapeLabel::Dcr
            } else if alpha > 1.0 {
                // θ < 1, αθ < 1
                ShapeLabel::Ubt
            } else if alpha < 1.0 {
                // θ > 1, αθ > 1
                ShapeLabel::Bt
            } else if theta < 1.0 {
                ShapeLabel::Inc
            } else {
                ShapeLabel::Dcr
            }
        }
    }
}

/// Shape read off the signs of successive differences of `values`.
/// Differences smaller than `1e-10·scale` in magnitude count as flat.
pub fn detect_shape(values: &[f64], scale: f64) -> ShapeLabel {
    let tol = 1e-10 * scale.abs();
    let mut runs: Vec<i8> = Vec::new();
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if !d.is_finite() {
            return ShapeLabel::Undefined;
        }
        let s = if d > tol {
            1
        } else if d < -tol {
            -1
        } else {
            continue;
        };
        if runs.last() != Some(&s) {
            runs.push(s);
        }
    }
    match runs.as_slice() {
        [] => ShapeLabel::Constant,
        [1] => ShapeLabel::Inc,
        [-1] => ShapeLabel::Dcr,
        [-1, 1] => ShapeLabel::Bt,
        [1, -1] => ShapeLabel::Ubt,
        _ => ShapeLabel::Undefined,
    }
}

/// 500 log-spaced probe points between the `1e-12` and `1 - 1e-12` quantiles.
pub fn shape_probe_grid(dist: &DistSpec) -> Result<Grid> {
    let lo = dist.quantile(1e-12)?;
    let hi = dist.quantile(1.0 - 1e-12)?;
    Grid::log_spaced(lo.max(1e-300), hi, 500)
}

/// Shape found numerically from the MRL on [`shape_probe_grid`].
pub fn detect_mrl_shape(dist: &DistSpec) -> Result<ShapeLabel> {
    let m0 = match dist.mrl(0.0) {
        Ok(v) => v,
        Err(Error::UndefinedMrl(_)) => return Ok(ShapeLabel::Undefined),
        Err(e) => return Err(e),
    };
    let grid = shape_probe_grid(dist)?;
    let mut values = Vec::with_capacity(grid.len() + 1);
    values.push(m0);
    for &t in grid.points() {
        values.push(dist.mrl(t)?);
    }
    Ok(detect_shape(&values, m0))
}
