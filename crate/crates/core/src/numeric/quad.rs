//! Quadrature rules on [-1, 1].

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights, computed by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Chebyshev (first kind) nodes for `∫ h(t) / sqrt(1 - t²) dt`; all
/// weights equal `π / n`. Nodes are returned in ascending order.
pub fn gauss_chebyshev(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| -((2 * j + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// A tanh–sinh node: abscissa, its distance `1 - |x|` to the nearer endpoint
/// (computed without cancellation) and the weight (step included).
#[derive(Debug, Clone, Copy)]
pub struct DeNode {
    pub x: f64,
    pub edge: f64,
    pub w: f64,
}

/// Tanh–sinh rule with step `h` and truncation `|k h| <= kmax`.
pub fn tanh_sinh(h: f64, kmax: f64) -> Vec<DeNode> {
    let kmax_i = (kmax / h).ceil() as i64;
    (-kmax_i..=kmax_i)
        .filter_map(|k| {
            let t = k as f64 * h;
            let s = 0.5 * PI * t.sinh();
            let w = h * 0.5 * PI * t.cosh() / s.cosh().powi(2);
            let edge = (-s.abs()).exp() / s.cosh();
            (edge > 0.0 && w > 1e-300).then(|| DeNode { x: s.tanh(), edge, w })
        })
        .collect()
}
