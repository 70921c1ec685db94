//! Brute-force reference values built only from unnormalized log densities
//! and composite adaptive Simpson quadrature.

/// Unnormalized log density of a named family at `u > 0`.
pub fn ln_density_unnorm(family: &str, p: &[f64], u: f64) -> f64 {
    match family {
        "gamma" => (p[0] - 1.0) * u.ln() - p[1] * u,
        "weibull" => (p[0] - 1.0) * u.ln() - (u / p[1]).powf(p[0]),
        "lognormal" => {
            let z = u.ln() - p[0];
            -u.ln() - z * z / (2.0 * p[1])
        }
        "loglogistic" => {
            let y = (u / p[1]).powf(p[0]);
            (p[0] - 1.0) * u.ln() - 2.0 * (1.0 + y).ln()
        }
        "gompertz" => p[1] * u - p[0] * ((p[1] * u).exp() - 1.0),
        "exp_weibull" => {
            let (a, th, s) = (p[0], p[1], p[2]);
            let x = (u / s).powf(a);
            (th - 1.0) * (-(-x).exp_m1()).ln() - x + (a - 1.0) * u.ln()
        }
        "linear_mrl" => {
            let (a, b) = (p[0], p[1]);
            if a == 0.0 {
                -u / b
            } else if a * u + b <= 0.0 {
                f64::NEG_INFINITY
            } else {
                -(1.0 / a + 2.0) * (a * u + b).ln()
            }
        }
        _ => panic!("unknown family {family}"),
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_adapt(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
        + simpson_adapt(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// `∫_a^b f` as adaptive Simpson over `panels` equal sub-intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, rel: f64) -> f64 {
    let h = (b - a) / panels as f64;
    let rough: f64 = (0..panels)
        .map(|i| {
            let (x0, x1) = (a + h * i as f64, a + h * (i + 1) as f64);
            h / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1))
        })
        .sum();
    let eps = (rel * rough.abs() / panels as f64).max(1e-300);
    (0..panels)
        .map(|i| {
            let (x0, x1) = (a + h * i as f64, a + h * (i + 1) as f64);
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = h / 6.0 * (f0 + 4.0 * fm + f1);
            simpson_adapt(&f, x0, x1, f0, fm, f1, whole, eps, 40)
        })
        .sum()
}

/// Tail integrals of `e^{ln_f}` beyond `t`, both scaled by `e^{-shift}`.
pub struct Tail {
    pub shift: f64,
    /// `∫_t^∞ f`
    pub mass: f64,
    /// `∫_t^∞ (u - t) f`
    pub excess: f64,
}

impl Tail {
    pub fn ln_mass(&self) -> f64 {
        self.shift + self.mass.ln()
    }

    pub fn mrl(&self) -> f64 {
        self.excess / self.mass
    }
}

/// Substitution `u = t + c(e^x - 1)`, `x = y^6` (which smooths integrable
/// endpoint singularities of `f`), with a common shift of the log integrand.
pub fn tail_integrals<F: Fn(f64) -> f64>(ln_f: F, t: f64, c: f64, panels: usize, rel: f64) -> Tail {
    const Q: f64 = 6.0;
    let y_max = 700f64.powf(1.0 / Q);
    let lg = |y: f64| {
        let x = y.powf(Q);
        let u = t + c * x.exp_m1();
        if y <= 0.0 || u <= 0.0 || !u.is_finite() {
            f64::NEG_INFINITY
        } else {
            ln_f(u) + x + Q.ln() + (Q - 1.0) * y.ln()
        }
    };
    let shift = (1..=4 * panels)
        .map(|i| lg(y_max * i as f64 / (4 * panels) as f64))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let w = |y: f64| {
        let v = lg(y) - shift;
        if v.is_finite() {
            v.exp()
        } else {
            0.0
        }
    };
    let mass = simpson(|y| c * w(y), 0.0, y_max, panels, rel);
    let excess = simpson(|y| c * y.powf(Q).exp_m1() * c * w(y), 0.0, y_max, panels, rel);
    Tail {
        shift,
        mass,
        excess,
    }
}

/// `E(T - t | T > t)` as `∫_t^∞ (u - t) f / ∫_t^∞ f`.
pub fn mrl_oracle<F: Fn(f64) -> f64>(ln_f: F, t: f64, c: f64) -> f64 {
    tail_integrals(ln_f, t, c, 400, 1e-10).mrl()
}

/// Log density of a gamma mixture `Σ p_l Gamma(shape_l, rate_l)`, with each
/// normalizing constant found by quadrature.
pub fn gamma_mixture_ln_density(components: &[(f64, f64, f64)]) -> impl Fn(f64) -> f64 {
    let parts: Vec<(f64, f64, f64)> = components
        .iter()
        .map(|&(p, a, b)| {
            let ln_g = |u: f64| (a - 1.0) * u.ln() - b * u;
            let z = tail_integrals(ln_g, 0.0, 1e-3 * a / b, 400, 1e-11).ln_mass();
            (p.ln() - z, a, b)
        })
        .collect();
    move |u: f64| {
        let terms: Vec<f64> = parts
            .iter()
            .map(|&(lw, a, b)| lw + (a - 1.0) * u.ln() - b * u)
            .collect();
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + terms.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
    }
}

/// MRL at `t` for a density supported on `(0, upper)`, given as a function of
/// the gap `upper - u` (exact under `u = upper - (upper - t)·y^6`, which also
/// tames integrable singularities at `upper`).
pub fn bounded_mrl_oracle<F: Fn(f64) -> f64>(ln_f_gap: F, t: f64, upper: f64) -> f64 {
    const Q: f64 = 6.0;
    let w = upper - t;
    let lg = |y: f64| {
        let gap = w * y.powf(Q);
        if y <= 0.0 || gap >= upper {
            f64::NEG_INFINITY
        } else {
            ln_f_gap(gap) + (Q - 1.0) * y.ln()
        }
    };
    let shift = (1..=1600)
        .map(|i| lg(i as f64 / 1600.0))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let g = |y: f64| {
        let v = lg(y) - shift;
        if v.is_finite() {
            v.exp()
        } else {
            0.0
        }
    };
    let mass = simpson(g, 0.0, 1.0, 400, 1e-11);
    let excess = simpson(|y| w * (1.0 - y.powf(Q)) * g(y), 0.0, 1.0, 400, 1e-11);
    excess / mass
}

/// Reference MRL for a family at `t`, with `c` a small length scale.
pub fn family_mrl(family: &str, p: &[f64], t: f64, c: f64) -> f64 {
    if family == "linear_mrl" && p[0] < 0.0 {
        // f ∝ (a u + b)^{-(1/a + 2)} = (|a| gap)^{-(1/a + 2)}
        let (a, b) = (p[0], p[1]);
        return bounded_mrl_oracle(|gap| -(1.0 / a + 2.0) * (-a * gap).ln(), t, -b / a);
    }
    mrl_oracle(|u| ln_density_unnorm(family, p, u), t, c)
}
