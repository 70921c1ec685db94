//! Blocked Gibbs sampler for the gamma DPMM with right censoring.
//!
//! The updates cycle through atoms (Metropolis-Hastings for active components,
//! prior draws for the rest), stick-breaking weights, labels, then `μ`, `Σ`,
//! `α`. The `μ` and `Σ` steps condition on the active atoms only, so a sweep
//! starts with them: the unused atoms are then redrawn under the new `μ`, `Σ`
//! before the state is read.

use serde::{Deserialize, Serialize};

use super::data::Dataset;
use crate::error::{invalid, Error, Result};
use crate::mixture::{stick_break, Atom, GammaKernel, Hyperparams, MixtureParams};
use crate::numeric::linalg::{ln_mvn2, Mat2, Vec2};
use crate::numeric::random::{
    draw_beta, draw_categorical_log, draw_gamma, draw_inv_wishart2, draw_mvn2, draw_mvn2_chol,
    sampling_factor,
};
use crate::numeric::RngStream;

/// Largest stick fraction kept, so `ln(1 - V)` stays finite.
const V_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub weights: Vec<f64>,
    pub atoms: Vec<Atom>,
    /// Zero-based component of each observation.
    pub labels: Vec<usize>,
    pub mu: Vec2,
    pub sigma: Mat2,
    pub alpha: f64,
    /// `V*_1..V*_{L-1}`.
    pub sticks: Vec<f64>,
}

impl ChainState {
    pub fn truncation(&self) -> usize {
        self.atoms.len()
    }

    /// `M_l`, the number of observations in each component.
    pub fn counts(&self) -> Vec<usize> {
        let mut m = vec![0; self.truncation()];
        for &w in &self.labels {
            m[w] += 1;
        }
        m
    }

    /// Components with at least one observation, in index order.
    pub fn active(&self) -> Vec<usize> {
        self.counts()
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0)
            .map(|(l, _)| l)
            .collect()
    }

    pub fn mixture(&self) -> Result<MixtureParams> {
        MixtureParams::new(self.weights.clone(), self.atoms.clone())
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.truncation();
        if l == 0 || self.weights.len() != l || self.sticks.len() + 1 != l {
            return Err(invalid("chain state has inconsistent truncation"));
        }
        if self.labels.iter().any(|w| *w >= l) {
            return Err(invalid("label points past the last component"));
        }
        if !self.sigma.is_spd() {
            return Err(invalid("Σ is not positive definite"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(invalid("α must be positive"));
        }
        let p = stick_break(&self.sticks)?;
        if p.iter().zip(&self.weights).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(invalid("weights disagree with the stick fractions"));
        }
        Ok(())
    }
}

/// Metropolis-Hastings proposal counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MhStats {
    pub proposed: u64,
    pub accepted: u64,
}

impl MhStats {
    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn add(&mut self, o: MhStats) {
        self.proposed += o.proposed;
        self.accepted += o.accepted;
    }
}

#[inline]
fn ln_lik(k: &GammaKernel, t: f64, censored: bool) -> f64 {
    if censored {
        k.ln_survival(t)
    } else {
        k.ln_density(t)
    }
}

struct Normal2 {
    mean: Vec2,
    prec: Mat2,
    ln_det: f64,
}

impl Normal2 {
    fn new(mean: Vec2, cov: &Mat2) -> Result<Self> {
        let prec = cov
            .inverse()
            .ok_or_else(|| Error::Numeric("Σ is singular".into()))?;
        Ok(Self {
            mean,
            prec,
            ln_det: cov.det().ln(),
        })
    }

    fn ln_pdf(&self, x: &Vec2) -> f64 {
        ln_mvn2(x, &self.mean, &self.prec, self.ln_det)
    }
}

fn target(atom: &Atom, members: &[usize], data: &Dataset, base: &Normal2) -> f64 {
    let k = GammaKernel::new(1.0, atom);
    let (t, c) = (data.times(), data.censored());
    let lik: f64 = members.iter().map(|&i| ln_lik(&k, t[i], c[i])).sum();
    base.ln_pdf(&atom.as_vec()) + lik
}

/// Unnormalized log full conditional of an active atom whose members are the
/// observation indices `members`.
pub fn atom_log_target(
    atom: &Atom,
    members: &[usize],
    data: &Dataset,
    mu: &Vec2,
    sigma: &Mat2,
) -> Result<f64> {
    Ok(target(atom, members, data, &Normal2::new(*mu, sigma)?))
}

/// Log acceptance ratio for moving an active atom from `from` to `to` under
/// the symmetric random-walk proposal.
pub fn atom_log_ratio(
    from: &Atom,
    to: &Atom,
    members: &[usize],
    data: &Dataset,
    mu: &Vec2,
    sigma: &Mat2,
) -> Result<f64> {
    let base = Normal2::new(*mu, sigma)?;
    Ok(target(to, members, data, &base) - target(from, members, data, &base))
}

fn members_of(state: &ChainState) -> Vec<Vec<usize>> {
    let mut m = vec![Vec::new(); state.truncation()];
    for (i, &w) in state.labels.iter().enumerate() {
        m[w].push(i);
    }
    m
}

/// Atom update with proposal `N₂(current, c·S²)`.
pub fn update_atoms(
    state: &mut ChainState,
    data: &Dataset,
    c: f64,
    s2: &Mat2,
    rng: &mut RngStream,
) -> Result<MhStats> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(invalid(format!("proposal multiplier c must exceed 1, got {c}")));
    }
    if !s2.is_spd() {
        return Err(invalid("proposal covariance must be positive definite"));
    }
    let prop = sampling_factor(&s2.scale(c))?;
    let prior = sampling_factor(&state.sigma)?;
    let base = Normal2::new(state.mu, &state.sigma)?;
    let members = members_of(state);
    let mut stats = MhStats::default();
    for (l, mem) in members.iter().enumerate() {
        if mem.is_empty() {
            let x = draw_mvn2_chol(&state.mu, &prior, rng);
            state.atoms[l] = Atom::new(x[0], x[1]);
            continue;
        }
        let cur = state.atoms[l];
        let y = draw_mvn2_chol(&cur.as_vec(), &prop, rng);
        let cand = Atom::new(y[0], y[1]);
        let log_r = target(&cand, mem, data, &base) - target(&cur, mem, data, &base);
        let eta = rng.uniform();
        stats.proposed += 1;
        if eta.ln() < log_r {
            state.atoms[l] = cand;
            stats.accepted += 1;
        }
    }
    Ok(stats)
}

/// `V*_l ~ Beta(1 + M_l, α + Σ_{r>l} M_r)`, then `p` by stick-breaking.
pub fn update_weights(state: &mut ChainState, rng: &mut RngStream) -> Result<()> {
    let m = state.counts();
    let l = state.truncation();
    let mut tail: usize = m.iter().sum();
    let mut v = Vec::with_capacity(l.saturating_sub(1));
    for &ml in &m[..l - 1] {
        tail -= ml;
        v.push(draw_beta(1.0 + ml as f64, state.alpha + tail as f64, rng)?.min(V_MAX));
    }
    state.weights = stick_break(&v)?;
    state.sticks = v;
    Ok(())
}

/// Log label probabilities `ln p̃_{li}` (unnormalized) for observation `i`.
pub fn label_log_weights(state: &ChainState, data: &Dataset, i: usize) -> Vec<f64> {
    let (t, c) = (data.times()[i], data.censored()[i]);
    state
        .weights
        .iter()
        .zip(&state.atoms)
        .map(|(p, a)| {
            if *p > 0.0 {
                ln_lik(&GammaKernel::new(*p, a), t, c) + p.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

pub fn update_labels(state: &mut ChainState, data: &Dataset, rng: &mut RngStream) -> Result<()> {
    let ks: Vec<GammaKernel> = state
        .weights
        .iter()
        .zip(&state.atoms)
        .map(|(p, a)| GammaKernel::new(*p, a))
        .collect();
    let (times, cens) = (data.times(), data.censored());
    let mut lw = vec![0.0; ks.len()];
    for i in 0..data.len() {
        for (w, k) in lw.iter_mut().zip(&ks) {
            *w = if k.ln_w == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                k.ln_w + ln_lik(k, times[i], cens[i])
            };
        }
        state.labels[i] = draw_categorical_log(&lw, rng).map_err(|_| {
            Error::Numeric(format!(
                "every component has zero weight at observation {i} (t = {})",
                times[i]
            ))
        })?;
    }
    Ok(())
}

/// `μ`, then `Σ`, then `α` from their full conditionals given the active atoms.
pub fn update_hypers(state: &mut ChainState, hyper: &Hyperparams, rng: &mut RngStream) -> Result<()> {
    let active = state.active();
    let n_star = active.len() as f64;
    let sig_inv = state
        .sigma
        .inverse()
        .ok_or_else(|| Error::Numeric("Σ is singular".into()))?;
    let b_inv = hyper
        .b_mu
        .inverse()
        .ok_or_else(|| Error::Numeric("B_μ is singular".into()))?;
    let s_mu = b_inv
        .add(&sig_inv.scale(n_star))
        .inverse()
        .filter(|m| m.is_finite())
        .ok_or_else(|| Error::Numeric("posterior covariance of μ is singular".into()))?
        .symmetrize();
    let mut sum = [0.0; 2];
    for &l in &active {
        sum[0] += state.atoms[l].theta;
        sum[1] += state.atoms[l].phi;
    }
    let a = b_inv.mul_vec(&hyper.a_mu);
    let b = sig_inv.mul_vec(&sum);
    let m_mu = s_mu.mul_vec(&[a[0] + b[0], a[1] + b[1]]);
    state.mu = draw_mvn2(&m_mu, &s_mu, rng)?;

    let mut scatter = Mat2::ZERO;
    for &l in &active {
        let x = state.atoms[l].as_vec();
        scatter = scatter.add(&Mat2::outer(&[x[0] - state.mu[0], x[1] - state.mu[1]]));
    }
    state.sigma = draw_inv_wishart2(n_star + hyper.a_sigma, &hyper.b_sigma.add(&scatter), rng)?;

    let rate = hyper.b_alpha - state.sticks.iter().map(|v| (-v).ln_1p()).sum::<f64>();
    let shape = state.truncation() as f64 + hyper.a_alpha - 1.0;
    state.alpha = draw_gamma(shape, rate, rng)?;
    Ok(())
}

/// One full sweep: hyperparameters, atoms, weights, labels.
pub fn gibbs_sweep(
    state: &mut ChainState,
    data: &Dataset,
    hyper: &Hyperparams,
    c: f64,
    s2: &Mat2,
    rng: &mut RngStream,
) -> Result<MhStats> {
    update_hypers(state, hyper, rng)?;
    let st = update_atoms(state, data, c, s2, rng)?;
    update_weights(state, rng)?;
    update_labels(state, data, rng)?;
    Ok(st)
}

fn moment_atom(xs: &[f64]) -> Option<Atom> {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    let shape = if xs.len() >= 2 && v > 0.0 {
        (m * m / v).clamp(1e-2, 1e4)
    } else {
        1.0
    };
    Atom::from_shape_rate(shape, shape / m).ok()
}

/// Starting state: labels by quantile bins of the times (at most 10 bins),
/// bin atoms by moment matching, `μ, Σ, α` at their prior means.
pub fn initial_state(
    data: &Dataset,
    hyper: &Hyperparams,
    truncation: usize,
    rng: &mut RngStream,
) -> Result<ChainState> {
    if truncation == 0 {
        return Err(invalid("truncation level must be at least 1"));
    }
    let n = data.len();
    let mu = hyper.a_mu;
    let mut atoms = vec![Atom::new(mu[0], mu[1]); truncation];
    let mut labels = vec![0; n];
    let bins = truncation.min(10).min(n);
    if bins > 0 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|a, b| data.times()[*a].total_cmp(&data.times()[*b]));
        for k in 0..bins {
            let (lo, hi) = (k * n / bins, (k + 1) * n / bins);
            let xs: Vec<f64> = order[lo..hi].iter().map(|&i| data.times()[i]).collect();
            if let Some(a) = moment_atom(&xs) {
                atoms[k] = a;
            }
            for &i in &order[lo..hi] {
                labels[i] = k;
            }
        }
    }
    let mut state = ChainState {
        weights: vec![1.0 / truncation as f64; truncation],
        atoms,
        labels,
        mu,
        sigma: hyper.b_sigma.scale(1.0 / (hyper.a_sigma - 3.0)),
        alpha: hyper.a_alpha / hyper.b_alpha,
        sticks: vec![0.0; truncation - 1],
    };
    update_weights(&mut state, rng)?;
    Ok(state)
}
