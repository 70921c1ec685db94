use serde::{Deserialize, Serialize};

use super::data::Dataset;
use super::gibbs::{gibbs_sweep, initial_state, ChainState, MhStats};
use crate::error::{Error, Result};
use crate::mixture::{Atom, Hyperparams, MixtureParams};
use crate::numeric::linalg::{Mat2, Vec2};
use crate::numeric::RngStream;

/// Blocked Gibbs settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Truncation level `L`.
    pub truncation: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub n_save: usize,
    pub seed: u64,
    /// Sub-stream of `seed`; lets concurrent chains share a seed.
    pub stream: u64,
    pub pilot_iters: usize,
    /// Multiplier `c` on the pilot covariance `S²`.
    pub proposal_c: f64,
    pub pilot_scale: PilotScale,
}

/// How the pilot run turns into the frozen proposal covariance `S²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotScale {
    /// Average sample covariance across the active atoms of each pilot sweep.
    AtomSpread,
    /// Average covariance of each atom's own pilot trajectory while it stays
    /// active.
    #[default]
    Trajectory,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            truncation: 40,
            burn_in: 5000,
            thin: 5,
            n_save: 2000,
            seed: 1,
            stream: 0,
            pilot_iters: 1000,
            proposal_c: 2.0,
            pilot_scale: PilotScale::default(),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truncation == 0 {
            return Err(Error::Config("truncation L must be at least 1".into()));
        }
        if self.thin == 0 || self.n_save == 0 {
            return Err(Error::Config("thin and n_save must be at least 1".into()));
        }
        if !(self.proposal_c > 1.0 && self.proposal_c.is_finite()) {
            return Err(Error::Config(format!(
                "proposal_c must exceed 1, got {}",
                self.proposal_c
            )));
        }
        Ok(())
    }
}

/// One retained state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub alpha: f64,
    pub mu: Vec2,
    pub sigma: Mat2,
    pub weights: Vec<f64>,
    pub atoms: Vec<Atom>,
    pub labels: Vec<u32>,
}

impl Draw {
    pub fn from_state(s: &ChainState) -> Self {
        Self {
            alpha: s.alpha,
            mu: s.mu,
            sigma: s.sigma,
            weights: s.weights.clone(),
            atoms: s.atoms.clone(),
            labels: s.labels.iter().map(|w| *w as u32).collect(),
        }
    }

    pub fn mixture(&self) -> MixtureParams {
        MixtureParams::new(self.weights.clone(), self.atoms.clone())
            .expect("stick-breaking weights form a simplex")
    }

    /// `corr(θ, φ)` under the baseline `Σ`.
    pub fn correlation(&self) -> f64 {
        self.sigma.get(0, 1) / (self.sigma.get(0, 0) * self.sigma.get(1, 1)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub draws: Vec<Draw>,
    pub config: SamplerConfig,
    /// `S²` frozen after the pilot.
    pub proposal_cov: Mat2,
    pub pilot_acceptance: MhStats,
    pub acceptance: MhStats,
}

impl PosteriorDraws {
    pub fn mixtures(&self) -> Vec<MixtureParams> {
        self.draws.iter().map(Draw::mixture).collect()
    }
}

/// Sample covariance of the active atoms, if there are at least two.
fn active_spread(s: &ChainState) -> Option<Mat2> {
    let act = s.active();
    if act.len() < 2 {
        return None;
    }
    let n = act.len() as f64;
    let mut m = [0.0; 2];
    for &l in &act {
        m[0] += s.atoms[l].theta / n;
        m[1] += s.atoms[l].phi / n;
    }
    let mut c = Mat2::ZERO;
    for &l in &act {
        let a = s.atoms[l];
        c = c.add(&Mat2::outer(&[a.theta - m[0], a.phi - m[1]]));
    }
    Some(c.scale(1.0 / (n - 1.0)))
}

/// Running moments of one atom's trajectory while it stays active.
#[derive(Clone, Default)]
struct Segment {
    n: f64,
    s: [f64; 2],
    ss: [f64; 3],
}

impl Segment {
    fn push(&mut self, x: &[f64; 2]) {
        self.n += 1.0;
        self.s[0] += x[0];
        self.s[1] += x[1];
        self.ss[0] += x[0] * x[0];
        self.ss[1] += x[0] * x[1];
        self.ss[2] += x[1] * x[1];
    }

    /// Scatter matrix about the segment mean and its degrees of freedom.
    fn scatter(&self) -> Option<(Mat2, f64)> {
        if self.n < 10.0 {
            return None;
        }
        let m = [self.s[0] / self.n, self.s[1] / self.n];
        let c = Mat2::sym(
            self.ss[0] - self.n * m[0] * m[0],
            self.ss[1] - self.n * m[0] * m[1],
            self.ss[2] - self.n * m[1] * m[1],
        );
        Some((c, self.n - 1.0))
    }
}

#[derive(Default)]
struct Trajectories {
    open: Vec<Segment>,
    scatter: Mat2,
    df: f64,
}

impl Trajectories {
    fn close(&mut self, l: usize) {
        if let Some((c, df)) = std::mem::take(&mut self.open[l]).scatter() {
            self.scatter = self.scatter.add(&c);
            self.df += df;
        }
    }

    fn observe(&mut self, s: &ChainState) {
        if self.open.is_empty() {
            self.open = vec![Segment::default(); s.truncation()];
        }
        let counts = s.counts();
        for (l, m) in counts.iter().enumerate() {
            if *m > 0 {
                self.open[l].push(&s.atoms[l].as_vec());
            } else {
                self.close(l);
            }
        }
    }

    fn finish(mut self) -> Option<Mat2> {
        for l in 0..self.open.len() {
            self.close(l);
        }
        let c = self.scatter.scale(1.0 / self.df);
        (self.df > 0.0 && c.is_spd()).then_some(c)
    }
}

/// Pilot run, burn-in, then `n_save` draws kept every `thin` sweeps.
///
/// During the pilot the proposal covariance is the current `Σ`; afterwards it
/// is frozen at the pilot estimate chosen by `config.pilot_scale`, falling
/// back to the final pilot `Σ` when the pilot gives no estimate.
pub fn run_chain(data: &Dataset, hyper: &Hyperparams, config: &SamplerConfig) -> Result<PosteriorDraws> {
    config.validate()?;
    hyper.validate()?;
    let mut rng = RngStream::with_stream(config.seed, config.stream);
    let mut state = initial_state(data, hyper, config.truncation, &mut rng)?;
    let c = config.proposal_c;

    let mut pilot = MhStats::default();
    let (mut acc, mut k) = (Mat2::ZERO, 0usize);
    let mut traj = Trajectories::default();
    for _ in 0..config.pilot_iters {
        let s2 = state.sigma;
        pilot.add(gibbs_sweep(&mut state, data, hyper, c, &s2, &mut rng)?);
        match config.pilot_scale {
            PilotScale::AtomSpread => {
                if let Some(cv) = active_spread(&state).filter(|m| m.is_spd()) {
                    acc = acc.add(&cv);
                    k += 1;
                }
            }
            PilotScale::Trajectory => traj.observe(&state),
        }
    }
    let est = match config.pilot_scale {
        PilotScale::AtomSpread => (k > 0).then(|| acc.scale(1.0 / k as f64)),
        PilotScale::Trajectory => traj.finish(),
    };
    let s2 = est.unwrap_or(state.sigma);

    let mut main = MhStats::default();
    for _ in 0..config.burn_in {
        main.add(gibbs_sweep(&mut state, data, hyper, c, &s2, &mut rng)?);
    }
    let mut draws = Vec::with_capacity(config.n_save);
    for _ in 0..config.n_save {
        for _ in 0..config.thin {
            main.add(gibbs_sweep(&mut state, data, hyper, c, &s2, &mut rng)?);
        }
        draws.push(Draw::from_state(&state));
    }
    Ok(PosteriorDraws {
        draws,
        config: *config,
        proposal_cov: s2,
        pilot_acceptance: pilot,
        acceptance: main,
    })
}
