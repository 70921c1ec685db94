use crate::error::{invalid, Result};

/// Empirical mean residual life of a fully observed sample:
/// the average excess `x - t` over observations beyond `t`, or 0 when none are.
pub fn empirical_mrl(times: &[f64], t: f64) -> Result<f64> {
    if times.is_empty() {
        return Err(invalid("empirical_mrl needs a non-empty sample"));
    }
    if times.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(invalid("sample times must be finite and non-negative"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("empirical_mrl requires finite t >= 0, got {t}")));
    }
    let (sum, n) = times
        .iter()
        .filter(|&&x| x > t)
        .fold((0.0, 0usize), |(s, n), &x| (s + (x - t), n + 1));
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}
