//! Per-draw functional curves on a grid.

use serde::{Deserialize, Serialize};

use super::bands::{pointwise_bands, FunctionalGrid};
use super::par_map;
use crate::error::Result;
use crate::mixture::{mixture_summary, MixtureParams, MrlOptions};
use crate::numeric::Grid;
use crate::sampler::EwState;
use crate::survival::DistSpec;

/// `values[b][j]` for each functional; `None` marks a missing point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalDraws {
    pub grid: Grid,
    pub density: Vec<Vec<Option<f64>>>,
    pub survival: Vec<Vec<Option<f64>>>,
    pub hazard: Vec<Vec<Option<f64>>>,
    pub mrl: Vec<Vec<Option<f64>>>,
}

/// Bands for the four functionals at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalBands {
    pub density: FunctionalGrid,
    pub survival: FunctionalGrid,
    pub hazard: FunctionalGrid,
    pub mrl: FunctionalGrid,
}

impl FunctionalDraws {
    pub fn len(&self) -> usize {
        self.mrl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mrl.is_empty()
    }

    pub fn bands(&self, level: f64) -> Result<FunctionalBands> {
        Ok(FunctionalBands {
            density: pointwise_bands(&self.density, &self.grid, level)?,
            survival: pointwise_bands(&self.survival, &self.grid, level)?,
            hazard: pointwise_bands(&self.hazard, &self.grid, level)?,
            mrl: pointwise_bands(&self.mrl, &self.grid, level)?,
        })
    }

    fn collect(grid: &Grid, rows: Vec<[Vec<Option<f64>>; 4]>) -> Self {
        let mut out = FunctionalDraws {
            grid: grid.clone(),
            density: Vec::with_capacity(rows.len()),
            survival: Vec::with_capacity(rows.len()),
            hazard: Vec::with_capacity(rows.len()),
            mrl: Vec::with_capacity(rows.len()),
        };
        for [f, s, h, m] in rows {
            out.density.push(f);
            out.survival.push(s);
            out.hazard.push(h);
            out.mrl.push(m);
        }
        out
    }
}

/// Density, survival, hazard and MRL of every mixture draw.
pub fn dpmm_functional_draws(
    mixtures: &[MixtureParams],
    grid: &Grid,
    opts: &MrlOptions,
) -> Result<FunctionalDraws> {
    let rows = par_map(mixtures, |p| -> Result<[Vec<Option<f64>>; 4]> {
        let (f, m) = mixture_summary(p, grid, opts)?;
        let hazard = f
            .hazard
            .iter()
            .zip(&f.underflow)
            .map(|(h, u)| (!u).then_some(*h))
            .collect();
        Ok([
            f.density.into_iter().map(Some).collect(),
            f.survival.into_iter().map(Some).collect(),
            hazard,
            m.values,
        ])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(FunctionalDraws::collect(grid, rows))
}

/// The same four functionals for exponentiated Weibull draws. The MRL is
/// reported missing where `S(t)` falls below `survival_floor`.
pub fn ew_functional_draws(draws: &[EwState], grid: &Grid, survival_floor: f64) -> Result<FunctionalDraws> {
    let rows = par_map(draws, |s| -> Result<[Vec<Option<f64>>; 4]> {
        s.validate()?;
        let d = DistSpec::ExpWeibull {
            alpha: s.alpha,
            theta: s.theta,
            sigma: s.sigma,
        };
        let n = grid.len();
        let mrl = d.mrl_on_grid(grid)?;
        let mut row: [Vec<Option<f64>>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
        for (&t, m) in grid.points().iter().zip(mrl) {
            let (lf, ls) = (d.ln_density(t), d.ln_survival(t));
            row[0].push(Some(lf.exp()));
            row[1].push(Some(ls.exp()));
            row[2].push((ls > f64::NEG_INFINITY).then(|| (lf - ls).exp()));
            let usable = ls > f64::NEG_INFINITY && ls.exp() >= survival_floor;
            row[3].push((usable && m > 0.0 && m.is_finite()).then_some(m));
        }
        Ok(row)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(FunctionalDraws::collect(grid, rows))
}
