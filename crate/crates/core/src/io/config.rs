//! Run configuration, read from JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::dataset::load_dataset;
use super::simulate::{simulate, SimSpec};
use crate::analytics::{default_k_grid, K, PRIOR_CURVE_DRAWS};
use crate::error::{Error, Result};
use crate::mixture::{elicit_hyperparameters, Hyperparams, MrlOptions};
use crate::numeric::linalg::Vec2;
use crate::numeric::Grid;
use crate::sampler::{ew_prior_from_quantiles, Dataset, EwConfig, EwPrior, SamplerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Dpmm,
    ExpWeibull,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Dpmm => "dpmm",
            Model::ExpWeibull => "exp_weibull",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Csv { path: PathBuf },
    /// One simulated group per spec.
    Simulate { specs: Vec<SimSpec> },
    /// `sim1` or `sim2`.
    Preset { name: String, seed: u64 },
}

/// DPMM prior settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DpmmPrior {
    Hyperparams { hyper: Hyperparams },
    /// `B_μ = B_Σ = b'·I`, `a_Σ = 4`, `α ~ Gamma(2, 1)`.
    Isotropic { a_mu: Vec2, b_prime: f64 },
    Elicit { center: f64, range: f64, q_e: f64, q_v: f64 },
    /// Elicitation with the group's sample mean as center and its range.
    ElicitFromData { q_e: f64, q_v: f64 },
}

impl Default for DpmmPrior {
    fn default() -> Self {
        DpmmPrior::ElicitFromData { q_e: 0.6, q_v: 0.025 }
    }
}

impl DpmmPrior {
    pub fn resolve(&self, data: &Dataset) -> Result<Hyperparams> {
        let h = match *self {
            DpmmPrior::Hyperparams { hyper } => hyper,
            DpmmPrior::Isotropic { a_mu, b_prime } => Hyperparams::isotropic(a_mu, b_prime),
            DpmmPrior::Elicit { center, range, q_e, q_v } => {
                elicit_hyperparameters(center, range, q_e, q_v)?.hyper
            }
            DpmmPrior::ElicitFromData { q_e, q_v } => {
                let t = data.times();
                if t.len() < 2 {
                    return Err(Error::Config(format!(
                        "group {:?} is too small to elicit a prior from",
                        data.group
                    )));
                }
                let center = t.iter().sum::<f64>() / t.len() as f64;
                let lo = t.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                elicit_hyperparameters(center, hi - lo, q_e, q_v)?.hyper
            }
        };
        h.validate()?;
        Ok(h)
    }
}

/// Exponentiated Weibull prior settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EwPriorSpec {
    Explicit { prior: EwPrior },
    /// Exponential priors with these means.
    Means { alpha: f64, theta: f64, sigma: f64 },
    /// Exponential priors centered on the EW law matching three quantiles.
    Quantiles { p: [f64; 3], q: [f64; 3] },
    /// As `Quantiles`, using the group's sample quantiles at `p`.
    DataQuantiles { p: [f64; 3] },
}

impl Default for EwPriorSpec {
    fn default() -> Self {
        EwPriorSpec::DataQuantiles { p: [0.1, 0.5, 0.9] }
    }
}

impl EwPriorSpec {
    pub fn resolve(&self, data: &Dataset) -> Result<EwPrior> {
        let prior = match self {
            EwPriorSpec::Explicit { prior } => *prior,
            EwPriorSpec::Means { alpha, theta, sigma } => EwPrior::exponential(*alpha, *theta, *sigma),
            EwPriorSpec::Quantiles { p, q } => EwPrior::from_means(&ew_prior_from_quantiles(*p, *q)?),
            EwPriorSpec::DataQuantiles { p } => {
                let mut t = data.times().to_vec();
                if t.len() < 3 {
                    return Err(Error::Config(format!(
                        "group {:?} is too small for data quantiles",
                        data.group
                    )));
                }
                t.sort_by(f64::total_cmp);
                let q = p.map(|v| crate::analytics::quantile_sorted(&t, v));
                match ew_prior_from_quantiles(*p, q) {
                    Ok(m) => EwPrior::from_means(&m),
                    // e.g. multimodal samples: fall back to the Weibull through the outer quantiles
                    Err(Error::NoSolution { .. }) => {
                        let y = |p: f64| (-(-p).ln_1p()).ln();
                        let alpha = (y(p[2]) - y(p[0])) / (q[2] / q[0]).ln();
                        let sigma = (q[0].ln() - y(p[0]) / alpha).exp();
                        EwPrior::exponential(alpha, 1.0, sigma)
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        prior.validate()?;
        Ok(prior)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// Evaluation grid. Unset ends default to a tenth of the smallest and 1.5
/// times the largest time over all groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSettings {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub n: usize,
    pub spacing: Spacing,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            lo: None,
            hi: None,
            n: 512,
            spacing: Spacing::Log,
        }
    }
}

impl GridSettings {
    pub fn build<'a>(&self, data: impl IntoIterator<Item = &'a Dataset>) -> Result<Grid> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for d in data {
            for &t in d.times() {
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        let lo = self.lo.unwrap_or(lo / 10.0);
        let hi = self.hi.unwrap_or(1.5 * hi);
        match self.spacing {
            Spacing::Log => Grid::log_spaced(lo, hi, self.n),
            Spacing::Linear => Grid::linear(lo, hi, self.n),
        }
    }
}

/// Two-group comparison of `a` against `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoGroup {
    pub a: String,
    pub b: String,
    /// Times at which difference samples are written.
    #[serde(default)]
    pub t_points: Vec<f64>,
    #[serde(default = "default_prior_draws")]
    pub prior_draws: usize,
}

fn default_prior_draws() -> usize {
    PRIOR_CURVE_DRAWS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub data: DataSource,
    #[serde(default = "default_model")]
    pub model: Model,
    /// Seeds every chain; each group and model runs on its own sub-stream.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub ew_sampler: EwConfig,
    #[serde(default)]
    pub dpmm_prior: DpmmPrior,
    #[serde(default)]
    pub ew_prior: EwPriorSpec,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub mrl: MrlOptions,
    #[serde(default = "default_level")]
    pub band_level: f64,
    #[serde(default)]
    pub two_group: Option<TwoGroup>,
    /// `"inf"` stands for the `k → ∞` limit.
    #[serde(default = "default_ks")]
    pub k_grid: Vec<K>,
    pub output_dir: PathBuf,
}

fn default_ks() -> Vec<K> {
    default_k_grid().into_iter().map(K).collect()
}

fn default_model() -> Model {
    Model::Dpmm
}

fn default_seed() -> u64 {
    1
}

fn default_level() -> f64 {
    0.95
}

impl RunConfig {
    /// Reads a config; relative paths resolve against the config's folder.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: RunConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let DataSource::Csv { path } = &mut cfg.data {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    /// Every check that can run before sampling.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        self.sampler.validate()?;
        self.ew_sampler.validate()?;
        if !(self.band_level > 0.0 && self.band_level < 1.0) {
            return cfg(format!("band_level must lie in (0, 1), got {}", self.band_level));
        }
        if self.grid.n < 2 {
            return cfg("grid.n must be at least 2".into());
        }
        if !(self.mrl.survival_floor >= 0.0 && self.mrl.survival_floor < 1.0) {
            return cfg("mrl.survival_floor must lie in [0, 1)".into());
        }
        if self.k_grid.iter().any(|k| !(k.0 >= 0.0)) {
            return cfg("k_grid entries must be >= 0".into());
        }
        match &self.data {
            DataSource::Csv { path } if !path.is_file() => {
                return cfg(format!("data file {} does not exist", path.display()));
            }
            DataSource::Simulate { specs } => {
                if specs.is_empty() {
                    return cfg("simulate needs at least one spec".into());
                }
                specs.iter().try_for_each(SimSpec::validate)?;
            }
            DataSource::Preset { name, .. } if name != "sim1" && name != "sim2" => {
                return cfg(format!("unknown preset {name:?}"));
            }
            _ => {}
        }
        if let Some(tg) = &self.two_group {
            if tg.a == tg.b {
                return cfg("two_group needs two different groups".into());
            }
            if tg.prior_draws == 0 {
                return cfg("two_group.prior_draws must be at least 1".into());
            }
            if tg.t_points.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                return cfg("two_group.t_points must be finite and >= 0".into());
            }
        }
        Ok(())
    }

    pub fn load_data(&self) -> Result<BTreeMap<String, Dataset>> {
        let sets = match &self.data {
            DataSource::Csv { path } => load_dataset(path)?,
            DataSource::Simulate { specs } => {
                let mut m = BTreeMap::new();
                for spec in specs {
                    let d = simulate(spec)?;
                    if m.insert(d.group.clone(), d).is_some() {
                        return Err(Error::Config(format!("group {:?} simulated twice", spec.group)));
                    }
                }
                m
            }
            DataSource::Preset { name, seed } => {
                let d = simulate(&SimSpec::preset(name, *seed)?)?;
                BTreeMap::from([(d.group.clone(), d)])
            }
        };
        if let Some(tg) = &self.two_group {
            for g in [&tg.a, &tg.b] {
                if !sets.contains_key(g) {
                    return Err(Error::Config(format!("two_group names missing group {g:?}")));
                }
            }
        }
        Ok(sets)
    }
}
