//! Posterior predictive loss (Gelfand–Ghosh) model comparison.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::numeric::random::draw_gamma;
use crate::numeric::RngStream;
use crate::sampler::{Dataset, Draw, EwState};

/// Per-observation mean and variance of the replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replicates {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

#[derive(Clone, Copy, Default)]
struct Welford {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn var(&self) -> f64 {
        if self.n < 2.0 {
            0.0
        } else {
            (self.m2 / (self.n - 1.0)).max(0.0)
        }
    }
}

fn finish(acc: Vec<Welford>) -> Replicates {
    Replicates {
        mean: acc.iter().map(|w| w.mean).collect(),
        var: acc.iter().map(Welford::var).collect(),
    }
}

/// One replicate per observation and draw from the gamma kernel the
/// observation is allocated to in that draw.
pub fn gg_replicates_dpmm(draws: &[Draw], data: &Dataset, rng: &mut RngStream) -> Result<Replicates> {
    if draws.is_empty() {
        return Err(invalid("no draws for replicates"));
    }
    let n = data.len();
    let mut acc = vec![Welford::default(); n];
    for d in draws {
        if d.labels.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: d.labels.len(),
            });
        }
        for (w, &l) in acc.iter_mut().zip(&d.labels) {
            let a = d
                .atoms
                .get(l as usize)
                .ok_or_else(|| invalid(format!("label {l} beyond truncation")))?;
            w.push(draw_gamma(a.shape(), a.rate(), rng)?);
        }
    }
    Ok(finish(acc))
}

/// Replicates from exponentiated Weibull draws by inverse CDF.
pub fn gg_replicates_ew(draws: &[EwState], n: usize, rng: &mut RngStream) -> Result<Replicates> {
    if draws.is_empty() {
        return Err(invalid("no draws for replicates"));
    }
    let mut acc = vec![Welford::default(); n];
    for s in draws {
        s.validate()?;
        for w in acc.iter_mut() {
            w.push(ew_inverse_cdf(s, rng.uniform()));
        }
    }
    Ok(finish(acc))
}

/// `σ(-ln(1 - u^{1/θ}))^{1/α}`.
pub fn ew_inverse_cdf(s: &EwState, u: f64) -> f64 {
    let y = -(-(u.ln() / s.theta).exp_m1()).ln();
    s.sigma * y.powf(1.0 / s.alpha)
}

/// A `k` value; `∞` is written as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K(pub f64);

impl Serialize for K {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for K {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(K(x)),
            Raw::Text(t) if t == "inf" => Ok(K(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad k value {t:?}"))),
        }
    }
}

impl std::fmt::Display for K {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

pub fn default_k_grid() -> Vec<f64> {
    vec![1.0, 2.0, 5.0, 10.0, 100.0, f64::INFINITY]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DkPoint {
    pub k: K,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    /// Goodness of fit `Σ(E_i - t_i)²`.
    pub g: f64,
    /// Penalty `ΣV_i`.
    pub p: f64,
    pub curve: Vec<DkPoint>,
}

impl ComparisonResult {
    /// `D_k = P + k/(k+1) G`, with `D_∞ = P + G`.
    pub fn d(&self, k: f64) -> f64 {
        if k.is_infinite() {
            self.p + self.g
        } else {
            self.p + k / (k + 1.0) * self.g
        }
    }
}

pub fn gelfand_ghosh(e: &[f64], v: &[f64], t_obs: &[f64], k_grid: &[f64]) -> Result<ComparisonResult> {
    for other in [v.len(), t_obs.len()] {
        if other != e.len() {
            return Err(Error::LengthMismatch {
                expected: e.len(),
                got: other,
            });
        }
    }
    if let Some(k) = k_grid.iter().find(|k| !(**k >= 0.0)) {
        return Err(invalid(format!("k must be >= 0, got {k}")));
    }
    let g = e.iter().zip(t_obs).map(|(e, t)| (e - t) * (e - t)).sum();
    let p = v.iter().sum();
    let mut out = ComparisonResult { g, p, curve: Vec::new() };
    out.curve = k_grid.iter().map(|&k| DkPoint { k: K(k), d: out.d(k) }).collect();
    Ok(out)
}

/// Gelfand–Ghosh criterion from replicates against the observed times.
pub fn compare_replicates(rep: &Replicates, t_obs: &[f64], k_grid: &[f64]) -> Result<ComparisonResult> {
    gelfand_ghosh(&rep.mean, &rep.var, t_obs, k_grid)
}
