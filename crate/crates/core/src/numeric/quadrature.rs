//! Trapezoid cumulative integration on a grid and adaptive Gauss–Kronrod
//! quadrature (finite and semi-infinite ranges).

use super::grid::Grid;
use crate::error::{Error, Result};

/// Cumulative trapezoid integrals `∫_0^{t_j} f` over `grid`, with the leading
/// segment `[0, t_1]` closed by the caller-supplied `f(0)`.
pub fn trapezoid_cumint(grid: &Grid, f_values: &[f64], f_at_zero: f64) -> Result<Vec<f64>> {
    let t = grid.points();
    if f_values.len() != t.len() {
        return Err(Error::LengthMismatch {
            expected: t.len(),
            got: f_values.len(),
        });
    }
    if !f_at_zero.is_finite() || f_values.iter().any(|v| !v.is_finite()) {
        return Err(crate::error::invalid("trapezoid integrand must be finite"));
    }
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.5 * t[0] * (f_at_zero + f_values[0]);
    out.push(acc);
    for j in 1..t.len() {
        acc += 0.5 * (t[j] - t[j - 1]) * (f_values[j] + f_values[j - 1]);
        out.push(acc);
    }
    Ok(out)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self {
            abs: 1e-300,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut bad = !fc.is_finite();
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        bad |= !s.is_finite();
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    if bad {
        return Err(Error::Numeric(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    Ok(Segment {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    })
}

/// Globally adaptive G7/K15 quadrature of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: QuadTol) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            converged: true,
        });
    }
    let mut segs = vec![kronrod15(&mut f, a, b)?];
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(Integral {
                value: total,
                abs_error: err,
                converged: true,
            });
        }
        if segs.len() >= tol.max_intervals {
            return Ok(Integral {
                value: total,
                abs_error: err,
                converged: false,
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval exhausted at machine precision
            segs.push(s);
            let total: f64 = segs.iter().map(|s| s.value).sum();
            let err: f64 = segs.iter().map(|s| s.error).sum();
            return Ok(Integral {
                value: total,
                abs_error: err,
                converged: false,
            });
        }
        segs.push(kronrod15(&mut f, s.a, mid)?);
        segs.push(kronrod15(&mut f, mid, s.b)?);
    }
}

/// `∫_a^∞ f(u) du` through the map `u = a + scale·s/(1 - s)`, `s ∈ [0, 1)`.
/// `scale` should be of the order of the integrand's decay length.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    tol: QuadTol,
) -> Result<Integral> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(crate::error::invalid(format!("bad integration scale {scale}")));
    }
    integrate(
        |s| {
            let om = 1.0 - s;
            let u = a + scale * s / om;
            if u.is_infinite() {
                return 0.0;
            }
            let v = f(u);
            if v == 0.0 {
                0.0
            } else {
                v * scale / (om * om)
            }
        },
        0.0,
        1.0,
        tol,
    )
}
