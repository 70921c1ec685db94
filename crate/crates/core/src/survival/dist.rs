//! Parametric survival families and their mean residual life functions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::numeric::quadrature::{integrate, integrate_to_infinity, QuadTol};
use crate::numeric::Grid;
use crate::numeric::special::{
    exp_e1_unchecked, ln_gamma, ln_norm_sf, ln_reg_gamma_q, reg_beta_pair,
};

/// A parametric lifetime distribution.
///
/// Parameterizations: gamma uses rate; Weibull, loglogistic and the
/// exponentiated Weibull use scale; lognormal takes the log-scale variance
/// `sigma2`; Gompertz has survival `exp(γ(1 - e^{λt}))`; the linear family
/// is defined by its mean residual life `m(t) = A·t + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistSpec {
    Gamma { shape: f64, rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Lognormal { mu: f64, sigma2: f64 },
    Loglogistic { shape: f64, scale: f64 },
    Gompertz { shape: f64, scale: f64 },
    ExpWeibull { alpha: f64, theta: f64, sigma: f64 },
    LinearMrl { a: f64, b: f64 },
}

/// Density, survival and hazard at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreValues {
    pub density: f64,
    pub survival: f64,
    /// `+∞` when `survival_underflow` is set.
    pub hazard: f64,
    pub survival_underflow: bool,
}

fn pos(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl DistSpec {
    pub fn family(&self) -> &'static str {
        match self {
            DistSpec::Gamma { .. } => "gamma",
            DistSpec::Weibull { .. } => "weibull",
            DistSpec::Lognormal { .. } => "lognormal",
            DistSpec::Loglogistic { .. } => "loglogistic",
            DistSpec::Gompertz { .. } => "gompertz",
            DistSpec::ExpWeibull { .. } => "exp_weibull",
            DistSpec::LinearMrl { .. } => "linear_mrl",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            DistSpec::Gamma { shape, rate } => vec![shape, rate],
            DistSpec::Weibull { shape, scale }
            | DistSpec::Loglogistic { shape, scale }
            | DistSpec::Gompertz { shape, scale } => vec![shape, scale],
            DistSpec::Lognormal { mu, sigma2 } => vec![mu, sigma2],
            DistSpec::ExpWeibull {
                alpha,
                theta,
                sigma,
            } => vec![alpha, theta, sigma],
            DistSpec::LinearMrl { a, b } => vec![a, b],
        }
    }

    /// Build from a family name and positional parameters.
    pub fn from_parts(family: &str, p: &[f64]) -> Result<Self> {
        let need = |n: usize| -> Result<()> {
            if p.len() == n {
                Ok(())
            } else {
                Err(invalid(format!(
                    "{family} takes {n} parameters, got {}",
                    p.len()
                )))
            }
        };
        let d = match family {
            "gamma" => {
                need(2)?;
                DistSpec::Gamma { shape: p[0], rate: p[1] }
            }
            "weibull" => {
                need(2)?;
                DistSpec::Weibull { shape: p[0], scale: p[1] }
            }
            "lognormal" => {
                need(2)?;
                DistSpec::Lognormal { mu: p[0], sigma2: p[1] }
            }
            "loglogistic" => {
                need(2)?;
                DistSpec::Loglogistic { shape: p[0], scale: p[1] }
            }
            "gompertz" => {
                need(2)?;
                DistSpec::Gompertz { shape: p[0], scale: p[1] }
            }
            "exp_weibull" | "expweibull" => {
                need(3)?;
                DistSpec::ExpWeibull {
                    alpha: p[0],
                    theta: p[1],
                    sigma: p[2],
                }
            }
            "linear_mrl" | "linear" => {
                need(2)?;
                DistSpec::LinearMrl { a: p[0], b: p[1] }
            }
            other => return Err(invalid(format!("unknown family {other:?}"))),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DistSpec::Gamma { shape, rate } => pos(shape) && pos(rate),
            DistSpec::Weibull { shape, scale }
            | DistSpec::Loglogistic { shape, scale }
            | DistSpec::Gompertz { shape, scale } => pos(shape) && pos(scale),
            DistSpec::Lognormal { mu, sigma2 } => mu.is_finite() && pos(sigma2),
            DistSpec::ExpWeibull {
                alpha,
                theta,
                sigma,
            } => pos(alpha) && pos(theta) && pos(sigma),
            DistSpec::LinearMrl { a, b } => a > -1.0 && a.is_finite() && pos(b),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid parameters for {self:?}")))
        }
    }

    /// `ln S(t)` for `t >= 0`.
    pub fn ln_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            DistSpec::Gamma { shape, rate } => ln_reg_gamma_q(shape, rate * t),
            DistSpec::Weibull { shape, scale } => -(t / scale).powf(shape),
            DistSpec::Lognormal { mu, sigma2 } => ln_norm_sf((t.ln() - mu) / sigma2.sqrt()),
            DistSpec::Loglogistic { shape, scale } => -(t / scale).powf(shape).ln_1p(),
            DistSpec::Gompertz { shape, scale } => -shape * (scale * t).exp_m1(),
            DistSpec::ExpWeibull {
                alpha,
                theta,
                sigma,
            } => ew_ln_survival(t, alpha, theta, sigma),
            DistSpec::LinearMrl { a, b } => {
                if a == 0.0 {
                    -t / b
                } else {
                    let d = a * t + b;
                    if d <= 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        (1.0 / a + 1.0) * (b / d).ln()
                    }
                }
            }
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        match *self {
            DistSpec::ExpWeibull {
                alpha,
                theta,
                sigma,
            } if t > 0.0 => ew_survival(t, alpha, theta, sigma),
            _ => self.ln_survival(t).exp(),
        }
    }

    /// `ln f(t)` for `t > 0`.
    pub fn ln_density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            DistSpec::Gamma { shape, rate } => {
                shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * t.ln() - rate * t
            }
            DistSpec::Weibull { shape, scale } => {
                let z = t / scale;
                (shape / scale).ln() + (shape - 1.0) * z.ln() - z.powf(shape)
            }
            DistSpec::Lognormal { mu, sigma2 } => {
                let z = t.ln() - mu;
                -0.5 * (2.0 * PI * sigma2).ln() - t.ln() - z * z / (2.0 * sigma2)
            }
            DistSpec::Loglogistic { shape, scale } => {
                let z = t / scale;
                (shape / scale).ln() + (shape - 1.0) * z.ln() - 2.0 * z.powf(shape).ln_1p()
            }
            DistSpec::Gompertz { shape, scale } => {
                (scale * shape).ln() + scale * t - shape * (scale * t).exp_m1()
            }
            DistSpec::ExpWeibull {
                alpha,
                theta,
                sigma,
            } => ew_ln_density(t, alpha, theta, sigma),
            DistSpec::LinearMrl { a, b } => {
                let d = a * t + b;
                if d <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (1.0 + a).ln() - d.ln() + self.ln_survival(t)
                }
            }
        }
    }

    pub fn density(&self, t: f64) -> f64 {
        self.ln_density(t).exp()
    }

    /// Density, survival and hazard at `t > 0`.
    pub fn eval_core(&self, t: f64) -> Result<CoreValues> {
        self.validate()?;
        if !(t > 0.0) {
            return Err(invalid(format!("eval_core requires t > 0, got {t}")));
        }
        let ln_f = self.ln_density(t);
        let ln_s = self.ln_survival(t);
        let survival = self.survival(t);
        let density = ln_f.exp();
        if survival <= 0.0 {
            return Ok(CoreValues {
                density,
                survival: 0.0,
                hazard: f64::INFINITY,
                survival_underflow: true,
            });
        }
        Ok(CoreValues {
            density,
            survival,
            hazard: (ln_f - ln_s).exp(),
            survival_underflow: false,
        })
    }

    /// `E(T)`; `None` where the mean is infinite.
    pub fn mean(&self) -> Option<f64> {
        match *self {
            DistSpec::Gamma { shape, rate } => Some(shape / rate),
            DistSpec::Weibull { shape, scale } => Some(scale * ln_gamma(1.0 + 1.0 / shape).exp()),
            DistSpec::Lognormal { mu, sigma2 } => Some((mu + 0.5 * sigma2).exp()),
            DistSpec::Loglogistic { shape, scale } => {
                if shape <= 1.0 {
                    None
                } else {
                    Some(scale * (PI / shape) / (PI / shape).sin())
                }
            }
            DistSpec::Gompertz { shape, scale } => Some(exp_e1_unchecked(shape) / scale),
            DistSpec::ExpWeibull { .. } => self.tail_integral(0.0).ok(),
            DistSpec::LinearMrl { b, .. } => Some(b),
        }
    }

    /// `∫_t^∞ S(u) du` by quadrature (used for the exponentiated Weibull).
    fn tail_integral(&self, t: f64) -> Result<f64> {
        let scale = match *self {
            DistSpec::ExpWeibull { sigma, .. } => sigma,
            _ => self.mean().unwrap_or(1.0),
        };
        let r = integrate_to_infinity(|u| self.survival(u), t, scale, QuadTol::default())?;
        if !r.converged {
            return Err(Error::Numeric(format!(
                "tail integral of {self:?} from {t} did not converge"
            )));
        }
        Ok(r.value)
    }

    /// Mean residual life `m(t) = E(T - t | T > t)` for `t >= 0`.
    pub fn mrl(&self, t: f64) -> Result<f64> {
        self.validate()?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(invalid(format!("mrl requires finite t >= 0, got {t}")));
        }
        match *self {
            DistSpec::Loglogistic { shape, .. } if shape <= 1.0 => {
                return Err(Error::UndefinedMrl(format!(
                    "loglogistic shape {shape} <= 1 has infinite mean"
                )))
            }
            _ => {}
        }
        if t == 0.0 {
            return self
                .mean()
                .ok_or_else(|| Error::UndefinedMrl(format!("{self:?} has no finite mean")));
        }
        let m = match *self {
            DistSpec::Gamma { shape, rate } => {
                let x = rate * t;
                let ratio = (ln_reg_gamma_q(shape + 1.0, x) - ln_reg_gamma_q(shape, x)).exp();
                shape / rate * ratio - t
            }
            DistSpec::Weibull { shape, scale } => {
                let z = (t / scale).powf(shape);
                weibull_mrl(shape, scale, z)
            }
            DistSpec::Lognormal { mu, sigma2 } => {
                let sd = sigma2.sqrt();
                let lt = t.ln();
                let ln_ratio = ln_norm_sf((lt - mu - sigma2) / sd) - ln_norm_sf((lt - mu) / sd);
                (mu + 0.5 * sigma2 + ln_ratio).exp() - t
            }
            DistSpec::Loglogistic { shape, scale } => {
                let y = (t / scale).powf(shape);
                let (w, one_minus_w) = (y / (1.0 + y), 1.0 / (1.0 + y));
                let (a, b) = (1.0 / shape, 1.0 - 1.0 / shape);
                let upper = reg_beta_pair(a, b, w, one_minus_w).1;
                scale / shape * (PI / (PI / shape).sin()) * upper * (1.0 + y)
            }
            DistSpec::Gompertz { shape, scale } => {
                let z = shape * (scale * t).exp();
                exp_e1_unchecked(z) / scale
            }
            DistSpec::ExpWeibull {
                alpha,
                theta,
                sigma,
            } => {
                let x = (t / sigma).powf(alpha);
                if x > 40.0 {
                    // S(t) = θe^{-x}(1 + O(e^{-x})): the Weibull tail ratio
                    weibull_mrl(alpha, sigma, x)
                } else {
                    self.tail_integral(t)? / ew_survival(t, alpha, theta, sigma)
                }
            }
            DistSpec::LinearMrl { a, b } => (a * t + b).max(0.0),
        };
        Ok(m)
    }

    /// MRL at every grid point. For the exponentiated Weibull the tail
    /// integral is accumulated right to left over the grid intervals.
    pub fn mrl_on_grid(&self, grid: &Grid) -> Result<Vec<f64>> {
        let DistSpec::ExpWeibull {
            alpha,
            theta,
            sigma,
        } = *self
        else {
            return grid.points().iter().map(|&t| self.mrl(t)).collect();
        };
        self.validate()?;
        let ts = grid.points();
        let mut out = vec![0.0; ts.len()];
        let mut acc = 0.0;
        for j in (0..ts.len()).rev() {
            let t = ts[j];
            let x = (t / sigma).powf(alpha);
            let s = ew_survival(t, alpha, theta, sigma);
            if x > 40.0 {
                out[j] = weibull_mrl(alpha, sigma, x);
                acc = out[j] * s;
                continue;
            }
            if j + 1 == ts.len() {
                acc = self.tail_integral(t)?;
            } else {
                let r = integrate(|u| ew_survival(u, alpha, theta, sigma), t, ts[j + 1], QuadTol::default())?;
                if !r.converged {
                    return Err(Error::Numeric(format!("survival integral on [{t}, {}] did not converge", ts[j + 1])));
                }
                acc += r.value;
            }
            out[j] = acc / s;
        }
        Ok(out)
    }

    /// Quantile `t` with `S(t) = 1 - p`, by bisection on `ln S`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("quantile level must be in (0, 1), got {p}")));
        }
        let target = (-p).ln_1p();
        let mut hi = 1.0;
        let mut k = 0;
        while self.ln_survival(hi) > target {
            hi *= 2.0;
            k += 1;
            if k > 2000 {
                return Err(Error::Numeric("quantile bracket overflow".into()));
            }
        }
        let mut lo = hi / 2.0;
        k = 0;
        while self.ln_survival(lo) <= target {
            lo /= 2.0;
            k += 1;
            if k > 2000 {
                return Ok(0.0);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.ln_survival(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn weibull_mrl(shape: f64, scale: f64, z: f64) -> f64 {
    let a = 1.0 / shape;
    ((scale / shape).ln() + ln_gamma(a) + ln_reg_gamma_q(a, z) + z).exp()
}

/// `S(t) = 1 - [1 - e^{-x}]^θ`, `x = (t/σ)^α`, without cancellation at
/// either end.
pub(crate) fn ew_survival(t: f64, alpha: f64, theta: f64, sigma: f64) -> f64 {
    let x = (t / sigma).powf(alpha);
    -(theta * ln_one_minus_exp_neg(x)).exp_m1()
}

/// `ln S(t)` of the exponentiated Weibull, finite far into the tail.
pub(crate) fn ew_ln_survival(t: f64, alpha: f64, theta: f64, sigma: f64) -> f64 {
    let x = (t / sigma).powf(alpha);
    if x > 700.0 {
        return theta.ln() - x;
    }
    (-(theta * ln_one_minus_exp_neg(x)).exp_m1()).ln()
}

/// `ln(1 - e^{-x})` for `x > 0`.
pub(crate) fn ln_one_minus_exp_neg(x: f64) -> f64 {
    if x > std::f64::consts::LN_2 {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

pub(crate) fn ew_ln_density(t: f64, alpha: f64, theta: f64, sigma: f64) -> f64 {
    let z = t / sigma;
    let x = z.powf(alpha);
    theta.ln() + (theta - 1.0) * ln_one_minus_exp_neg(x) - x + (alpha / sigma).ln()
        + (alpha - 1.0) * z.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn exponential_survival() {
        let d = DistSpec::Gamma { shape: 1.0, rate: 2.0 };
        let c = d.eval_core(1.0).unwrap();
        assert!(rel(c.survival, 0.135_335_283_236_612_7) < 1e-14);
        assert!(rel(c.hazard, 2.0) < 1e-13);
    }

    #[test]
    fn lognormal_median() {
        let d = DistSpec::Lognormal { mu: 0.0, sigma2: 1.0 };
        assert!((d.eval_core(1.0).unwrap().survival - 0.5).abs() < 1e-15);
        assert!(rel(d.mrl(0.0).unwrap(), 0.5f64.exp()) < 1e-15);
    }

    #[test]
    fn ew_with_unit_theta_is_weibull() {
        let ew = DistSpec::ExpWeibull { alpha: 1.7, theta: 1.0, sigma: 2.0 };
        let wb = DistSpec::Weibull { shape: 1.7, scale: 2.0 };
        for &t in &[0.1, 1.0, 2.5, 6.0] {
            let (a, b) = (ew.eval_core(t).unwrap(), wb.eval_core(t).unwrap());
            assert!(rel(a.survival, b.survival) < 1e-12);
            assert!(rel(a.density, b.density) < 1e-12);
        }
    }

    #[test]
    fn constant_gamma_mrl() {
        let d = DistSpec::Gamma { shape: 1.0, rate: 0.5 };
        for &t in &[0.0, 0.3, 4.0, 50.0] {
            assert!(rel(d.mrl(t).unwrap(), 2.0) < 1e-12);
        }
    }

    #[test]
    fn gamma_two_one_mrl_closed_form() {
        // Q(3,1)/Q(2,1) * 2 - 1 = (5/2 e^-1)/(2 e^-1) * 2 - 1 = 1.5
        let d = DistSpec::Gamma { shape: 2.0, rate: 1.0 };
        assert!(rel(d.mrl(1.0).unwrap(), 1.5) < 1e-13);
    }

    #[test]
    fn gompertz_mrl_at_zero() {
        let d = DistSpec::Gompertz { shape: 1.0, scale: 1.0 };
        assert!(rel(d.mrl(0.0).unwrap(), 0.596_347_362_323_194_6) < 1e-12);
        assert!(rel(d.mrl(1e-12).unwrap(), 0.596_347_362_323_194_6) < 1e-9);
    }

    #[test]
    fn loglogistic_requires_shape_above_one() {
        let d = DistSpec::Loglogistic { shape: 0.8, scale: 1.0 };
        assert!(matches!(d.mrl(1.0), Err(Error::UndefinedMrl(_))));
        let d = DistSpec::Loglogistic { shape: 1.0, scale: 1.0 };
        assert!(d.mrl(0.5).is_err());
    }

    #[test]
    fn linear_family_is_exact() {
        let d = DistSpec::LinearMrl { a: 0.5, b: 2.0 };
        for &t in &[0.0, 1.0, 7.5] {
            assert_eq!(d.mrl(t).unwrap(), 0.5 * t + 2.0);
        }
        let d = DistSpec::LinearMrl { a: 0.0, b: 3.0 };
        assert!(rel(d.survival(2.0), (-2.0f64 / 3.0).exp()) < 1e-15);
    }

    #[test]
    fn survival_underflow_is_flagged() {
        let d = DistSpec::Weibull { shape: 3.0, scale: 1.0 };
        let c = d.eval_core(100.0).unwrap();
        assert!(c.survival_underflow);
        assert!(c.hazard.is_infinite());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DistSpec::Gamma { shape: -1.0, rate: 1.0 }.eval_core(1.0).is_err());
        assert!(DistSpec::LinearMrl { a: -1.0, b: 1.0 }.validate().is_err());
        assert!(DistSpec::from_parts("gamma", &[1.0]).is_err());
        assert!(DistSpec::from_parts("cauchy", &[1.0, 1.0]).is_err());
        assert!(DistSpec::Gamma { shape: 1.0, rate: 1.0 }.eval_core(0.0).is_err());
    }

    #[test]
    fn quantile_inverts_survival() {
        let d = DistSpec::Gamma { shape: 2.0, rate: 1.0 };
        let q = d.quantile(0.8).unwrap();
        assert!((d.survival(q) - 0.2).abs() < 1e-12);
    }
}
