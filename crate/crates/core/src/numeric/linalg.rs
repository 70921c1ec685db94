//! Just enough 2×2 linear algebra for the bivariate-normal baseline.

use serde::{Deserialize, Serialize};

pub type Vec2 = [f64; 2];

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2([[a, 0.0], [0.0, b]])
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self::diag(s, s)
    }

    pub fn sym(a11: f64, a12: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a12, a22]])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Mat2([
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ]))
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let a = &self.0;
        Mat2([[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[0.0; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        let a = &self.0;
        [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
    }

    /// `v' M v`
    pub fn quad_form(&self, v: &Vec2) -> f64 {
        let mv = self.mul_vec(v);
        v[0] * mv[0] + v[1] * mv[1]
    }

    pub fn outer(v: &Vec2) -> Mat2 {
        Mat2([[v[0] * v[0], v[0] * v[1]], [v[1] * v[0], v[1] * v[1]]])
    }

    /// Symmetrized copy, `(M + M') / 2`.
    pub fn symmetrize(&self) -> Mat2 {
        self.add(&self.transpose()).scale(0.5)
    }

    /// Lower Cholesky factor of a symmetric positive definite matrix.
    pub fn cholesky(&self) -> Option<Mat2> {
        let m = &self.0;
        let a = m[0][0];
        if !(a > 0.0) {
            return None;
        }
        let l11 = a.sqrt();
        let l21 = m[1][0] / l11;
        let r = m[1][1] - l21 * l21;
        if !(r > 0.0) {
            return None;
        }
        Some(Mat2([[l11, 0.0], [l21, r.sqrt()]]))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn is_spd(&self) -> bool {
        (self.0[0][1] - self.0[1][0]).abs() <= 1e-12 * (self.0[0][1].abs() + 1.0)
            && self.cholesky().is_some()
    }

    pub fn is_psd(&self) -> bool {
        let m = &self.0;
        (m[0][1] - m[1][0]).abs() <= 1e-12 * (m[0][1].abs() + 1.0)
            && m[0][0] >= 0.0
            && m[1][1] >= 0.0
            && self.det() >= -1e-12 * (m[0][0] * m[1][1]).max(1e-300)
    }
}

/// Log density of `N₂(x; mean, cov)` given the precision and `ln det cov`.
pub fn ln_mvn2(x: &Vec2, mean: &Vec2, precision: &Mat2, ln_det_cov: f64) -> f64 {
    let d = [x[0] - mean[0], x[1] - mean[1]];
    -(2.0 * std::f64::consts::PI).ln() - 0.5 * ln_det_cov - 0.5 * precision.quad_form(&d)
}
