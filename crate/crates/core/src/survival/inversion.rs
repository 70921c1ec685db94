//! From a mean residual life back to survival, and moments from survival.

use std::cell::Cell;

use super::dist::DistSpec;
use crate::error::{invalid, Error, Result};
use crate::numeric::quadrature::{integrate, QuadTol};
use crate::numeric::Grid;

/// `S(t) = m(0)/m(t) · exp(-∫_0^t du/m(u))`.
pub fn survival_from_mrl<M: Fn(f64) -> f64>(m: M, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("survival_from_mrl requires t > 0, got {t}")));
    }
    let m0 = m(0.0);
    let mt = m(t);
    for (u, v) in [(0.0, m0), (t, mt)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveMrl { t: u, value: v });
        }
    }
    let bad: Cell<Option<(f64, f64)>> = Cell::new(None);
    let res = integrate(
        |u| {
            let v = m(u);
            if !(v > 0.0 && v.is_finite()) {
                if bad.get().is_none() {
                    bad.set(Some((u, v)));
                }
                return f64::NAN;
            }
            1.0 / v
        },
        0.0,
        t,
        QuadTol::default(),
    );
    if let Some((u, v)) = bad.get() {
        return Err(Error::NonPositiveMrl { t: u, value: v });
    }
    let int = res?;
    if !int.converged && int.abs_error > 1e-9 * int.value.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "∫ 1/m over [0, {t}] did not converge (error {})",
            int.abs_error
        )));
    }
    Ok((m0 / mt * (-int.value).exp()).min(1.0))
}

/// Where survival comes from for [`moment_from_survival`].
#[derive(Debug, Clone, Copy)]
pub enum SurvivalSource<'a> {
    Dist(&'a DistSpec),
    /// Survival tabulated on a grid; `S(0) = 1` is implied.
    Tabulated { grid: &'a Grid, survival: &'a [f64] },
}

const TAIL_LEVEL: f64 = 1e-12;

/// `r`-th moment `E(T^r) = r ∫ t^{r-1} S(t) dt`.
///
/// The integral runs to `t_max` with `S(t_max) < 1e-12`; the remainder is
/// closed with a tail that matches the local hazard `h` at `t_max`, written
/// through the local log-slope `k = t·h` as `r t^r S / (k - r)`. A tail with
/// `k <= r` cannot be closed and is reported as divergent.
pub fn moment_from_survival(src: SurvivalSource<'_>, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(invalid("moment order must be positive"));
    }
    let rf = r as f64;
    match src {
        SurvivalSource::Dist(d) => {
            d.validate()?;
            let t_max = tail_point(d)?;
            let body = geometric_panels(|t| rf * t.powi(r as i32 - 1) * d.survival(t), t_max)?;
            let c = d.eval_core(t_max)?;
            let k = t_max * c.hazard;
            Ok(body + tail_term(rf, t_max, c.survival, k)?)
        }
        SurvivalSource::Tabulated { grid, survival } => {
            let t = grid.points();
            if survival.len() != t.len() {
                return Err(Error::LengthMismatch {
                    expected: t.len(),
                    got: survival.len(),
                });
            }
            if survival.iter().any(|s| !(0.0..=1.0).contains(s)) {
                return Err(invalid("tabulated survival must lie in [0, 1]"));
            }
            let g = |j: usize| rf * t[j].powi(r as i32 - 1) * survival[j];
            let g0 = if r == 1 { 1.0 } else { 0.0 };
            let mut acc = 0.5 * t[0] * (g0 + g(0));
            for j in 1..t.len() {
                acc += 0.5 * (t[j] - t[j - 1]) * (g(j) + g(j - 1));
            }
            let n = t.len();
            let (s1, s0) = (survival[n - 1], survival[n - 2]);
            if s1 == 0.0 {
                return Ok(acc);
            }
            let h = (s0 / s1).ln() / (t[n - 1] - t[n - 2]);
            Ok(acc + tail_term(rf, t[n - 1], s1, t[n - 1] * h)?)
        }
    }
}

fn tail_term(r: f64, t: f64, s: f64, k: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    if !(k > r * (1.0 + 1e-9)) || !k.is_finite() {
        return Err(Error::Divergent(format!(
            "moment of order {r} does not settle: local tail index {k:.4} at t = {t:.4e}"
        )));
    }
    Ok(r * t.powf(r) * s / (k - r))
}

/// Smallest power-of-two multiple bracket with `S(t) < 1e-12`.
fn tail_point(d: &DistSpec) -> Result<f64> {
    let below = |t: f64| d.survival(t) < TAIL_LEVEL;
    let mut t = 1.0;
    if below(t) {
        while below(t / 2.0) {
            t /= 2.0;
            if t < 1e-300 {
                return Err(Error::Numeric("survival collapses at 0".into()));
            }
        }
        return Ok(t);
    }
    while !below(t) {
        t *= 2.0;
        if !t.is_finite() {
            return Err(Error::Divergent(format!(
                "survival of {d:?} never falls below {TAIL_LEVEL}"
            )));
        }
    }
    Ok(t)
}

/// `∫_0^b g` split into geometric panels `[b 2^{-k-1}, b 2^{-k}]` so that
/// mass concentrated near 0 is never missed.
fn geometric_panels<G: FnMut(f64) -> f64>(mut g: G, b: f64) -> Result<f64> {
    let tol = QuadTol {
        rel: 1e-13,
        ..QuadTol::default()
    };
    let mut total = 0.0;
    let mut hi = b;
    for _ in 0..80 {
        let lo = hi / 2.0;
        total += integrate(&mut g, lo, hi, tol)?.value;
        hi = lo;
    }
    total += integrate(&mut g, 0.0, hi, tol)?.value;
    Ok(total)
}
