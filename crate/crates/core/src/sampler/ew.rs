//! Random-walk Metropolis-Hastings for the exponentiated Weibull model
//! `F(t) = [1 - exp(-(t/σ)^α)]^θ`, and prior elicitation from three quantiles.

use serde::{Deserialize, Serialize};

use super::data::Dataset;
use super::gibbs::MhStats;
use crate::error::{invalid, Error, Result};
use crate::numeric::RngStream;
use crate::survival::{ew_ln_density, ew_ln_survival};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwState {
    pub alpha: f64,
    pub theta: f64,
    pub sigma: f64,
}

impl EwState {
    pub fn new(alpha: f64, theta: f64, sigma: f64) -> Result<Self> {
        let s = Self { alpha, theta, sigma };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !(ok(self.alpha) && ok(self.theta) && ok(self.sigma)) {
            return Err(invalid(format!("EW parameters must be positive, got {self:?}")));
        }
        Ok(())
    }

    fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.theta, self.sigma]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Self {
            alpha: a[0],
            theta: a[1],
            sigma: a[2],
        }
    }

    /// Log-likelihood of right-censored data.
    pub fn log_likelihood(&self, data: &Dataset) -> f64 {
        let (a, th, s) = (self.alpha, self.theta, self.sigma);
        data.times()
            .iter()
            .zip(data.censored())
            .map(|(&t, &c)| {
                if c {
                    ew_ln_survival(t, a, th, s)
                } else {
                    ew_ln_density(t, a, th, s)
                }
            })
            .sum()
    }

    pub fn quantile_triple(&self, p: [f64; 3]) -> [f64; 3] {
        p.map(|v| self.quantile(v))
    }

    /// Quantile `σ(-ln(1 - p^{1/θ}))^{1/α}`.
    pub fn quantile(&self, p: f64) -> f64 {
        let inner = -(-(p.ln() / self.theta).exp_m1()).ln();
        self.sigma * inner.powf(1.0 / self.alpha)
    }
}

/// Prior on one EW parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamPrior {
    Exponential { mean: f64 },
    /// Degenerate prior: the parameter is held at this value.
    Fixed { value: f64 },
}

impl ParamPrior {
    fn is_fixed(&self) -> bool {
        matches!(self, ParamPrior::Fixed { .. })
    }

    fn start(&self) -> f64 {
        match *self {
            ParamPrior::Exponential { mean } => mean,
            ParamPrior::Fixed { value } => value,
        }
    }

    /// Log density on the log scale, Jacobian included.
    fn ln_density_log_scale(&self, x: f64) -> f64 {
        match *self {
            ParamPrior::Exponential { mean } => -mean.ln() - x / mean + x.ln(),
            ParamPrior::Fixed { .. } => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let v = self.start();
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("EW prior location must be positive, got {v}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwPrior {
    pub alpha: ParamPrior,
    pub theta: ParamPrior,
    pub sigma: ParamPrior,
}

impl EwPrior {
    /// Independent exponential priors with the given means.
    pub fn exponential(a_alpha: f64, a_theta: f64, a_sigma: f64) -> Self {
        Self {
            alpha: ParamPrior::Exponential { mean: a_alpha },
            theta: ParamPrior::Exponential { mean: a_theta },
            sigma: ParamPrior::Exponential { mean: a_sigma },
        }
    }

    pub fn from_means(m: &EwState) -> Self {
        Self::exponential(m.alpha, m.theta, m.sigma)
    }

    fn parts(&self) -> [ParamPrior; 3] {
        [self.alpha, self.theta, self.sigma]
    }

    pub fn validate(&self) -> Result<()> {
        self.parts().iter().try_for_each(ParamPrior::validate)
    }

    fn ln_density_log_scale(&self, s: &EwState) -> f64 {
        self.parts()
            .iter()
            .zip(s.as_array())
            .map(|(p, x)| p.ln_density_log_scale(x))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EwConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub n_save: usize,
    pub seed: u64,
    pub stream: u64,
    /// Proposal standard deviations on `(ln α, ln θ, ln σ)`.
    pub proposal_sd: [f64; 3],
    /// Scale the proposal toward ~30% acceptance during burn-in only.
    pub adapt: bool,
}

impl Default for EwConfig {
    fn default() -> Self {
        Self {
            burn_in: 5000,
            thin: 5,
            n_save: 2000,
            seed: 1,
            stream: 0,
            proposal_sd: [0.1; 3],
            adapt: true,
        }
    }
}

impl EwConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 || self.n_save == 0 {
            return Err(Error::Config("thin and n_save must be at least 1".into()));
        }
        if self.proposal_sd.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::Config("proposal_sd entries must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EwDraws {
    pub draws: Vec<EwState>,
    pub config: EwConfig,
    pub prior: EwPrior,
    /// Proposal standard deviations used after burn-in.
    pub proposal_sd: [f64; 3],
    pub acceptance: MhStats,
    pub warnings: Vec<String>,
}

const ADAPT_BATCH: usize = 100;
const ADAPT_TARGET: f64 = 0.3;

/// Log posterior on the log-parameter scale.
pub fn ew_log_posterior(s: &EwState, data: &Dataset, prior: &EwPrior) -> f64 {
    s.log_likelihood(data) + prior.ln_density_log_scale(s)
}

pub fn fit_exp_weibull(data: &Dataset, prior: &EwPrior, config: &EwConfig) -> Result<EwDraws> {
    config.validate()?;
    prior.validate()?;
    let fixed = prior.parts().map(|p| p.is_fixed());
    let mut warnings = Vec::new();
    let free_sd: Vec<f64> = (0..3).filter(|j| !fixed[*j]).map(|j| config.proposal_sd[j]).collect();
    if free_sd.iter().all(|s| *s == 0.0) {
        warnings.push("proposal scale is zero for every free parameter; the chain cannot move".into());
    }

    let mut rng = RngStream::with_stream(config.seed, config.stream);
    let mut cur = EwState::from_array(prior.parts().map(|p| p.start()));
    let mut lp = ew_log_posterior(&cur, data, prior);
    if !lp.is_finite() {
        return Err(Error::Numeric(format!(
            "EW log posterior is not finite at the starting point {cur:?}"
        )));
    }
    let mut log_scale = 0.0f64;
    let mut batch = MhStats::default();
    let mut total = MhStats::default();
    let mut draws = Vec::with_capacity(config.n_save);
    let n_iter = config.burn_in + config.n_save * config.thin;
    for it in 0..n_iter {
        let mult = log_scale.exp();
        let u = cur.as_array().map(f64::ln);
        let mut v = u;
        for j in 0..3 {
            if !fixed[j] {
                v[j] = u[j] + mult * config.proposal_sd[j] * rng.std_normal();
            }
        }
        let cand = EwState::from_array(v.map(f64::exp));
        let lc = if cand.validate().is_ok() {
            ew_log_posterior(&cand, data, prior)
        } else {
            f64::NEG_INFINITY
        };
        let eta = rng.uniform();
        let step = MhStats {
            proposed: 1,
            accepted: (eta.ln() < lc - lp) as u64,
        };
        if step.accepted == 1 {
            cur = cand;
            lp = lc;
        }
        total.add(step);
        if it < config.burn_in {
            batch.add(step);
            if config.adapt && batch.proposed as usize == ADAPT_BATCH {
                let k = ((it + 1) / ADAPT_BATCH) as f64;
                log_scale += (batch.rate() - ADAPT_TARGET) / k.sqrt();
                batch = MhStats::default();
            }
        } else if (it + 1 - config.burn_in).is_multiple_of(config.thin) {
            draws.push(cur);
        }
    }
    let mult = log_scale.exp();
    Ok(EwDraws {
        draws,
        config: *config,
        prior: *prior,
        proposal_sd: config.proposal_sd.map(|s| s * mult),
        acceptance: total,
        warnings,
    })
}

/// `(ln α, ln θ, ln σ)` residuals `θ·ln(1 - e^{-x_k}) - ln P_k` and Jacobian.
fn quantile_system(u: &[f64; 3], lp: &[f64; 3], lq: &[f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let (alpha, theta) = (u[0].exp(), u[1].exp());
    let mut r = [0.0; 3];
    let mut j = [[0.0; 3]; 3];
    for k in 0..3 {
        let z = lq[k] - u[2];
        let x = (alpha * z).exp();
        let g = if x > std::f64::consts::LN_2 {
            (-(-x).exp()).ln_1p()
        } else {
            (-(-x).exp_m1()).ln()
        };
        let dg = 1.0 / x.exp_m1();
        r[k] = theta * g - lp[k];
        j[k] = [theta * dg * x * alpha * z, theta * g, -theta * dg * alpha * x];
    }
    (r, j)
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for c in 0..3 {
        let p = (c..3).max_by(|x, y| m[*x][c].abs().total_cmp(&m[*y][c].abs()))?;
        if !(m[p][c].abs() > 1e-300) {
            return None;
        }
        m.swap(c, p);
        for r in c + 1..3 {
            let f = m[r][c] / m[c][c];
            for k in c..4 {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][3] - s) / m[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn max_abs(r: &[f64; 3]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn newton(mut u: [f64; 3], lp: &[f64; 3], lq: &[f64; 3]) -> ([f64; 3], f64) {
    let (mut r, mut jac) = quantile_system(&u, lp, lq);
    let mut norm = max_abs(&r);
    for _ in 0..200 {
        if !(norm > 1e-13) {
            break;
        }
        let Some(mut d) = solve3(jac, r.map(|v| -v)) else {
            break;
        };
        let big = max_abs(&d);
        if big > 2.0 {
            d = d.map(|v| v * 2.0 / big);
        }
        let mut lam = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let v = [u[0] + lam * d[0], u[1] + lam * d[1], u[2] + lam * d[2]];
            let (rv, jv) = quantile_system(&v, lp, lq);
            let nv = max_abs(&rv);
            if nv.is_finite() && nv < norm {
                (u, r, jac, norm, moved) = (v, rv, jv, nv, true);
                break;
            }
            lam *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (u, norm)
}

const QUANTILE_TOL: f64 = 1e-10;
const STARTS: usize = 50;

/// Solve `P_k = [1 - exp(-(Q_k/σ)^α)]^θ`, `k = 1, 2, 3`, for `(α, θ, σ)`; the
/// solution serves as the exponential prior means `(a_α, a_θ, a_σ)`.
pub fn ew_prior_from_quantiles(p: [f64; 3], q: [f64; 3]) -> Result<EwState> {
    let inc = |v: &[f64; 3]| v[0] < v[1] && v[1] < v[2];
    if !(inc(&p) && p[0] > 0.0 && p[2] < 1.0) {
        return Err(invalid("probabilities must be strictly increasing inside (0, 1)"));
    }
    if !(inc(&q) && q[0] > 0.0 && q[2].is_finite()) {
        return Err(invalid("quantiles must be positive and strictly increasing"));
    }
    let lp = p.map(f64::ln);
    let lq = q.map(f64::ln);
    // Weibull (θ = 1) through the outer quantiles
    let y = p.map(|v| (-(-v).ln_1p()).ln());
    let a0 = (y[2] - y[0]) / (lq[2] - lq[0]);
    let c0 = lq[0] - y[0] / a0;
    let mut rng = RngStream::new(0x00e7_5eed);
    let mut best = ([0.0; 3], f64::INFINITY);
    for s in 0..STARTS {
        let start = if s == 0 {
            [a0.ln(), 0.0, c0]
        } else {
            [
                (0.2f64.ln() + rng.uniform() * 50f64.ln()),
                (0.05f64.ln() + rng.uniform() * 400f64.ln()),
                lq[1] + 0.5 * rng.std_normal(),
            ]
        };
        let (u, norm) = newton(start, &lp, &lq);
        if norm < best.1 {
            best = (u, norm);
        }
        if best.1 <= QUANTILE_TOL {
            break;
        }
    }
    let (u, norm) = best;
    if !(norm <= QUANTILE_TOL) {
        return Err(Error::NoSolution {
            message: format!("no exponentiated Weibull matches quantiles {q:?} at {p:?}"),
            residual: norm,
        });
    }
    EwState::new(u[0].exp(), u[1].exp(), u[2].exp())
}
