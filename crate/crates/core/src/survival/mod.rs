//! Parametric lifetime laws, their mean residual life, and the conversions
//! between survival, MRL and moments.

mod dist;
mod empirical;
mod inversion;
mod mixture;
mod shape;

pub use dist::{CoreValues, DistSpec};
pub use empirical::empirical_mrl;
pub use inversion::{moment_from_survival, survival_from_mrl, SurvivalSource};
pub use mixture::ParametricMixture;
pub use shape::{
    classify_mrl_shape, detect_mrl_shape, detect_shape, shape_probe_grid, ShapeLabel,
};

pub(crate) use dist::{ew_ln_density, ew_ln_survival};

use crate::error::Result;

/// Density, survival and hazard of `dist` at `t > 0`.
pub fn eval_core(dist: &DistSpec, t: f64) -> Result<CoreValues> {
    dist.eval_core(t)
}

/// Mean residual life of `dist` at `t >= 0`.
pub fn parametric_mrl(dist: &DistSpec, t: f64) -> Result<f64> {
    dist.mrl(t)
}
