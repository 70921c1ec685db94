#![allow(dead_code)]

pub mod oracle;

/// Relative difference `|a - b| / |b|`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean of an autocorrelated series by batch means
/// (50 batches).
pub fn batch_means_se(xs: &[f64]) -> f64 {
    let nb = 50;
    let size = xs.len() / nb;
    let means: Vec<f64> = (0..nb).map(|b| mean(&xs[b * size..(b + 1) * size])).collect();
    (variance(&means) / nb as f64).sqrt()
}
