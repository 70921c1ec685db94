//! Special functions, quadrature, grids and random-variate generation.

pub mod grid;
pub mod linalg;
pub mod quadrature;
pub mod random;
pub mod special;

pub use grid::Grid;
pub use linalg::{Mat2, Vec2};
pub use quadrature::{integrate, integrate_to_infinity, trapezoid_cumint, Integral, QuadTol};
pub use random::RngStream;

/// `ln Σ exp(x_i)`; `-∞` for an empty or all `-∞` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
