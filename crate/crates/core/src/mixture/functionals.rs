//! Density, survival, hazard and mean residual life of a gamma mixture.

use serde::{Deserialize, Serialize};

use super::params::{Atom, MixtureParams};
use crate::error::{invalid, Result};
use crate::numeric::special::{ln_gamma, ln_reg_gamma_q_with};
use crate::numeric::{log_sum_exp, trapezoid_cumint, Grid};

/// A weighted gamma kernel with its normalizing constants cached.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GammaKernel {
    pub ln_w: f64,
    pub shape: f64,
    pub rate: f64,
    ln_rate: f64,
    ln_gamma_shape: f64,
}

impl GammaKernel {
    pub fn new(weight: f64, atom: &Atom) -> Self {
        let shape = atom.shape();
        Self {
            ln_w: weight.ln(),
            shape,
            rate: atom.rate(),
            ln_rate: atom.phi,
            ln_gamma_shape: ln_gamma(shape),
        }
    }

    pub fn ln_density(&self, t: f64) -> f64 {
        self.shape * self.ln_rate - self.ln_gamma_shape + (self.shape - 1.0) * t.ln()
            - self.rate * t
    }

    pub fn ln_survival(&self, t: f64) -> f64 {
        ln_reg_gamma_q_with(self.shape, self.rate * t, self.ln_gamma_shape)
    }

    /// Kernel MRL at `t` given `ln S(t)`, via `Q(a+1,x) = Q(a,x) + x^a e^{-x}/Γ(a+1)`.
    pub fn mrl_given(&self, t: f64, ln_s: f64) -> f64 {
        let x = self.rate * t;
        if x <= 0.0 {
            return self.shape / self.rate;
        }
        let extra = (self.shape * x.ln() - x - self.ln_gamma_shape - ln_s).exp() / self.rate;
        self.shape / self.rate - t + extra
    }
}

pub(crate) fn kernels(params: &MixtureParams) -> Vec<GammaKernel> {
    params
        .weights()
        .iter()
        .zip(params.atoms())
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, a)| GammaKernel::new(*p, a))
        .collect()
}

/// Mixture functionals on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureFunctionals {
    pub density: Vec<f64>,
    pub survival: Vec<f64>,
    /// `+∞` where survival underflowed.
    pub hazard: Vec<f64>,
    pub underflow: Vec<bool>,
}

pub fn mixture_functionals(params: &MixtureParams, grid: &Grid) -> MixtureFunctionals {
    let ks = kernels(params);
    let n = grid.len();
    let mut out = MixtureFunctionals {
        density: Vec::with_capacity(n),
        survival: Vec::with_capacity(n),
        hazard: Vec::with_capacity(n),
        underflow: Vec::with_capacity(n),
    };
    let mut lf = Vec::with_capacity(ks.len());
    let mut ls = Vec::with_capacity(ks.len());
    for &t in grid.points() {
        lf.clear();
        ls.clear();
        for k in &ks {
            lf.push(k.ln_w + k.ln_density(t));
            ls.push(k.ln_w + k.ln_survival(t));
        }
        let (ln_f, ln_s) = (log_sum_exp(&lf), log_sum_exp(&ls));
        let (f, s) = (ln_f.exp(), ln_s.exp().min(1.0));
        out.density.push(f);
        out.survival.push(s);
        if s > 0.0 {
            out.hazard.push((ln_f - ln_s).exp());
            out.underflow.push(false);
        } else {
            out.hazard.push(f64::INFINITY);
            out.underflow.push(true);
        }
    }
    out
}

impl MixtureParams {
    /// `(f(t), S(t))` of the mixture.
    pub fn density_survival(&self, t: f64) -> (f64, f64) {
        let ks = kernels(self);
        let lf: Vec<f64> = ks.iter().map(|k| k.ln_w + k.ln_density(t)).collect();
        let ls: Vec<f64> = ks.iter().map(|k| k.ln_w + k.ln_survival(t)).collect();
        (log_sum_exp(&lf).exp(), log_sum_exp(&ls).exp().min(1.0))
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        let ls: Vec<f64> = kernels(self)
            .iter()
            .map(|k| k.ln_w + k.ln_survival(t))
            .collect();
        log_sum_exp(&ls).exp().min(1.0)
    }

    /// Mixture MRL at one point; `None` where `S(t) < floor`.
    pub fn mrl(&self, t: f64, floor: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(self.mean());
        }
        analytic_point(&kernels(self), t, floor, &mut Vec::new(), &mut Vec::new())
    }
}

fn analytic_point(
    ks: &[GammaKernel],
    t: f64,
    floor: f64,
    ls: &mut Vec<f64>,
    ms: &mut Vec<f64>,
) -> Option<f64> {
    ls.clear();
    ms.clear();
    for k in ks {
        let l = k.ln_survival(t);
        if l == f64::NEG_INFINITY {
            continue;
        }
        ls.push(k.ln_w + l);
        ms.push(k.mrl_given(t, l));
    }
    if ls.is_empty() {
        return None;
    }
    weighted_mrl(ls, ms, log_sum_exp(ls), floor)
}

/// Density, survival, hazard and MRL of one mixture on a grid, sharing each
/// kernel's survival between the functionals and the analytic MRL.
pub fn mixture_summary(
    params: &MixtureParams,
    grid: &Grid,
    opts: &MrlOptions,
) -> Result<(MixtureFunctionals, MrlGrid)> {
    if opts.method == MrlMethod::Trapezoid {
        return Ok((mixture_functionals(params, grid), mixture_mrl_grid(params, grid, opts)?));
    }
    if !(opts.survival_floor >= 0.0 && opts.survival_floor < 1.0) {
        return Err(invalid("survival floor must lie in [0, 1)"));
    }
    let ks = kernels(params);
    let n = grid.len();
    let mut f_out = MixtureFunctionals {
        density: Vec::with_capacity(n),
        survival: Vec::with_capacity(n),
        hazard: Vec::with_capacity(n),
        underflow: Vec::with_capacity(n),
    };
    let mut values = Vec::with_capacity(n);
    let (mut lf, mut ls, mut ms) = (Vec::new(), Vec::new(), Vec::new());
    for &t in grid.points() {
        lf.clear();
        ls.clear();
        ms.clear();
        for k in &ks {
            lf.push(k.ln_w + k.ln_density(t));
            let l = k.ln_survival(t);
            if l > f64::NEG_INFINITY {
                ls.push(k.ln_w + l);
                ms.push(k.mrl_given(t, l));
            }
        }
        let ln_f = log_sum_exp(&lf);
        let ln_s = if ls.is_empty() { f64::NEG_INFINITY } else { log_sum_exp(&ls) };
        let (f, s) = (ln_f.exp(), ln_s.exp().min(1.0));
        f_out.density.push(f);
        f_out.survival.push(s);
        f_out.underflow.push(s <= 0.0);
        f_out.hazard.push(if s > 0.0 { (ln_f - ln_s).exp() } else { f64::INFINITY });
        values.push(weighted_mrl(&ls, &ms, ln_s, opts.survival_floor));
    }
    Ok((
        f_out,
        MrlGrid {
            grid: grid.clone(),
            values,
        },
    ))
}

fn weighted_mrl(ls: &[f64], ms: &[f64], norm: f64, floor: f64) -> Option<f64> {
    if ls.is_empty() || !(norm.exp() >= floor) {
        return None;
    }
    let m: f64 = ls.iter().zip(ms).map(|(l, m)| (l - norm).exp() * m).sum();
    (m > 0.0 && m.is_finite()).then_some(m)
}

impl MixtureParams {
    /// MRL at arbitrary points; `t = 0` gives the mean.
    pub fn mrl_points(&self, ts: &[f64], floor: f64) -> Vec<Option<f64>> {
        let ks = kernels(self);
        let (mut ls, mut ms) = (Vec::new(), Vec::new());
        ts.iter()
            .map(|&t| {
                if t <= 0.0 {
                    Some(self.mean())
                } else {
                    analytic_point(&ks, t, floor, &mut ls, &mut ms)
                }
            })
            .collect()
    }
}

/// How the mixture MRL is evaluated on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MrlMethod {
    /// Trapezoid recursion on the mixture survival:
    /// `m(t_j) = [E(T) - ∫_0^{t_j} S] / S(t_j)` with the integral by trapezoids
    /// anchored at `S(0) = 1`.
    Trapezoid,
    /// Survival-weighted average of the closed-form kernel MRLs.
    #[default]
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MrlOptions {
    pub method: MrlMethod,
    /// Points with mixture survival below this are reported missing.
    pub survival_floor: f64,
}

impl Default for MrlOptions {
    fn default() -> Self {
        Self {
            method: MrlMethod::Analytic,
            survival_floor: 1e-10,
        }
    }
}

/// Mixture MRL over a grid; `None` marks points reported missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrlGrid {
    pub grid: Grid,
    pub values: Vec<Option<f64>>,
}

impl MrlGrid {
    /// First index `j` (among reported points) where `m + t` drops by more
    /// than `tol` relative to the previous reported point.
    pub fn characterization_violation(&self, tol: f64) -> Option<usize> {
        let mut prev: Option<f64> = None;
        for (j, (v, t)) in self.values.iter().zip(self.grid.points()).enumerate() {
            if let Some(m) = v {
                let cur = m + t;
                if let Some(p) = prev {
                    if cur < p - tol {
                        return Some(j);
                    }
                }
                prev = Some(cur);
            }
        }
        None
    }
}

pub fn mixture_mrl_grid(params: &MixtureParams, grid: &Grid, opts: &MrlOptions) -> Result<MrlGrid> {
    if !(opts.survival_floor >= 0.0 && opts.survival_floor < 1.0) {
        return Err(invalid("survival floor must lie in [0, 1)"));
    }
    let values = match opts.method {
        MrlMethod::Analytic => {
            let ks = kernels(params);
            let (mut ls, mut ms) = (Vec::new(), Vec::new());
            grid.points()
                .iter()
                .map(|&t| analytic_point(&ks, t, opts.survival_floor, &mut ls, &mut ms))
                .collect()
        }
        MrlMethod::Trapezoid => {
            let s: Vec<f64> = grid.points().iter().map(|&t| params.survival(t)).collect();
            let cum = trapezoid_cumint(grid, &s, 1.0)?;
            let mean = params.mean();
            s.iter()
                .zip(&cum)
                .map(|(&sj, &cj)| {
                    let m = (mean - cj) / sj;
                    (sj >= opts.survival_floor && sj > 0.0 && m > 0.0).then_some(m)
                })
                .collect()
        }
    };
    Ok(MrlGrid {
        grid: grid.clone(),
        values,
    })
}
