//! Gamma mixture data generators.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::random::{draw_categorical, draw_gamma};
use crate::numeric::RngStream;
use crate::sampler::Dataset;

/// One mixture component; the second gamma parameter is a rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimComponent {
    pub weight: f64,
    pub shape: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Censoring {
    /// Every time beyond `time` is recorded as censored at `time`.
    Fixed { time: f64 },
    /// An independent `Exp(rate)` censoring time competes with each event.
    Exponential { rate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub components: Vec<SimComponent>,
    pub n: usize,
    #[serde(default)]
    pub censoring: Option<Censoring>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_group")]
    pub group: String,
}

fn default_seed() -> u64 {
    1
}

fn default_group() -> String {
    super::DEFAULT_GROUP.to_string()
}

fn comps(v: &[(f64, f64, f64)]) -> Vec<SimComponent> {
    v.iter()
        .map(|&(weight, shape, rate)| SimComponent { weight, shape, rate })
        .collect()
}

impl SimSpec {
    /// `sim1`: n = 200 from 0.35Γ(10, 0.5) + 0.4Γ(20, 1) + 0.15Γ(30, 5) + 0.1Γ(40, 8).
    /// `sim2`: n = 100 from 0.3Γ(15, 0.2) + 0.25Γ(12, 0.5) + 0.35Γ(8, 2) + 0.1Γ(3, 6).
    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        let (components, n) = match name {
            "sim1" => (
                comps(&[(0.35, 10.0, 0.5), (0.4, 20.0, 1.0), (0.15, 30.0, 5.0), (0.1, 40.0, 8.0)]),
                200,
            ),
            "sim2" => (
                comps(&[(0.3, 15.0, 0.2), (0.25, 12.0, 0.5), (0.35, 8.0, 2.0), (0.1, 3.0, 6.0)]),
                100,
            ),
            _ => return Err(invalid(format!("unknown preset {name:?} (expected sim1 or sim2)"))),
        };
        Ok(Self {
            components,
            n,
            censoring: None,
            seed,
            group: name.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(invalid("simulation needs at least one component"));
        }
        for c in &self.components {
            if !(c.weight >= 0.0 && c.shape > 0.0 && c.rate > 0.0)
                || !(c.shape.is_finite() && c.rate.is_finite())
            {
                return Err(invalid(format!("bad component {c:?}")));
            }
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("component weights sum to {total}, not 1")));
        }
        if self.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        match self.censoring {
            Some(Censoring::Fixed { time }) if !(time > 0.0 && time.is_finite()) => {
                Err(invalid("fixed censoring time must be positive"))
            }
            Some(Censoring::Exponential { rate }) if !(rate > 0.0 && rate.is_finite()) => {
                Err(invalid("censoring rate must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Draws the component by weight, then the gamma variate, then applies any
/// censoring.
pub fn simulate(spec: &SimSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = RngStream::new(spec.seed);
    let w: Vec<f64> = spec.components.iter().map(|c| c.weight).collect();
    let mut times = Vec::with_capacity(spec.n);
    let mut cens = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let c = spec.components[draw_categorical(&w, &mut rng)?];
        let t = draw_gamma(c.shape, c.rate, &mut rng)?.max(f64::MIN_POSITIVE);
        let (t, censored) = match spec.censoring {
            None => (t, false),
            Some(Censoring::Fixed { time }) => {
                if t > time {
                    (time, true)
                } else {
                    (t, false)
                }
            }
            Some(Censoring::Exponential { rate }) => {
                let u = draw_gamma(1.0, rate, &mut rng)?.max(f64::MIN_POSITIVE);
                if u < t {
                    (u, true)
                } else {
                    (t, false)
                }
            }
        };
        times.push(t);
        cens.push(censored);
    }
    Dataset::new(spec.group.clone(), times, cens)
}
