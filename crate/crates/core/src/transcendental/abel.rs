//! Numerical Abel map with base point at infinity.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::curve::{CurveModel, C64};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::numeric::quad::gauss_legendre;
use crate::numeric::Poly;

use super::periods::{branch_points, branch_polynomial};

const SERIES_ORDER: usize = 80;
const NODES: usize = 20;

struct AbelContext {
    p: Poly,
    du: Vec<Poly>,
    branch: Vec<C64>,
    series: crate::curve::InfinitySeries,
    radius: f64,
    gl: (Vec<f64>, Vec<f64>),
}

impl AbelContext {
    fn new(curve: &CurveModel) -> Result<Self> {
        let branch = branch_points(curve)?;
        let p = branch_polynomial(curve)?;
        let du = curve
            .basis_monomials()
            .iter()
            .map(|m| Poly::monomial(C64::new(1.0, 0.0), m.i as usize))
            .collect();
        let emax = branch.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let conv = if emax > 0.0 { emax.powf(-0.5) } else { f64::INFINITY };
        let radius = (0.5 * conv).min(0.5);
        Ok(AbelContext {
            p,
            du,
            branch,
            series: curve.infinity_series(SERIES_ORDER)?,
            radius,
            gl: gauss_legendre(NODES),
        })
    }

    fn dist_to_branch(&self, x: C64) -> f64 {
        self.branch.iter().map(|e| (x - e).norm()).fold(f64::INFINITY, f64::min)
    }

    /// `∫_0^{ξ₀}` of the first-kind differentials written in the local
    /// parameter at infinity.
    fn infinity_part(&self, xi0: C64) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); self.du.len()];
        let (nodes, weights) = &self.gl;
        for (t, w) in nodes.iter().zip(weights) {
            let xi = xi0 * (0.5 * (t + 1.0));
            let (x, y) = self.series.eval(xi);
            let dx = -(self.series.n as f64) * xi.powi(-(self.series.n as i32) - 1) * xi0 * 0.5;
            for (k, num) in self.du.iter().enumerate() {
                acc[k] += num.eval(x) * dx / (-2.0 * y) * *w;
            }
        }
        acc
    }

    fn segment_distance(&self, a: C64, b: C64) -> f64 {
        let d = b - a;
        self.branch
            .iter()
            .map(|&e| {
                let t = ((e - a) * d.conj()).re / d.norm_sqr();
                let t = t.clamp(0.0, 1.0);
                (a + d * t - e).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `∫` of `du` along the straight segment `a → b`, continuing `y` from
    /// `ya`. Returns the integrals and the continued `y` at `b`.
    fn segment_part(&self, a: C64, ya: C64, b: C64) -> Result<(Vec<C64>, C64)> {
        let mut acc = vec![C64::new(0.0, 0.0); self.du.len()];
        let len = (b - a).norm();
        let (nodes, weights) = &self.gl;
        let mut t = 0.0;
        let mut y = ya;
        let mut guard = 0;
        while t < 1.0 {
            let x0 = a + (b - a) * t;
            let mut step = (0.2 * self.dist_to_branch(x0) / len).min(1.0 - t);
            loop {
                guard += 1;
                if guard > 200_000 || step < 1e-14 {
                    return Err(Error::Path(format!("continuation stalled near {x0:.6}")));
                }
                let mut local = vec![C64::new(0.0, 0.0); self.du.len()];
                let mut yt = y;
                let mut ok = true;
                let half = (b - a) * (0.5 * step);
                let track = |yprev: C64, x: C64| -> Option<C64> {
                    let r = self.p.eval(x).sqrt();
                    let (near, far) = if (r - yprev).norm() <= (r + yprev).norm() { (r, -r) } else { (-r, r) };
                    ((near - yprev).norm() < 0.5 * (far - yprev).norm()).then_some(near)
                };
                for (s, w) in nodes.iter().zip(weights) {
                    let x = x0 + half * (s + 1.0);
                    match track(yt, x) {
                        Some(v) => yt = v,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                    for (k, num) in self.du.iter().enumerate() {
                        local[k] += num.eval(x) * half / (-2.0 * yt) * *w;
                    }
                }
                let xe = x0 + (b - a) * step;
                if ok {
                    if let Some(v) = track(yt, xe) {
                        for k in 0..acc.len() {
                            acc[k] += local[k];
                        }
                        y = v;
                        t += step;
                        break;
                    }
                }
                step *= 0.5;
            }
        }
        Ok((acc, y))
    }

    /// `∫_∞^P du` for a finite point `P = (x, y)` off the branch points.
    fn point(&self, x: C64, y: C64) -> Result<Vec<C64>> {
        let scale = self.branch.iter().map(|e| e.norm()).fold(1.0, f64::max);
        if self.dist_to_branch(x) < 1e-9 * scale {
            return Err(Error::Path(format!("point {x:.6} is a branch point")));
        }
        let base = if x.norm() > 0.0 { x.arg() } else { 0.0 };
        let mut best = None;
        for k in 0..16 {
            let phi = base + PI * k as f64 / 8.0 * if k % 2 == 0 { 1.0 } else { -1.0 };
            let xi0 = Complex64::from_polar(self.radius, -phi / 2.0);
            let x0 = xi0.powi(-(self.series.n as i32));
            let clearance = self.segment_distance(x0, x);
            if clearance > 0.05 * scale.min(1.0) || (k == 15 && clearance > 1e-9 * scale) {
                best = Some(xi0);
                break;
            }
        }
        let xi0 = best.ok_or_else(|| Error::Path(format!("no clear path from infinity to {x:.6}")))?;
        let (x0, y0) = self.series.eval(xi0);
        let inf = self.infinity_part(xi0);
        let (seg, yend) = self.segment_part(x0, y0, x)?;
        let sign = if (yend - y).norm() <= (yend + y).norm() { 1.0 } else { -1.0 };
        let miss = (yend - y * sign).norm();
        if miss > 1e-6 * (1.0 + y.norm()) {
            return Err(Error::Path(format!("continued y misses the target by {miss:e}")));
        }
        Ok(inf.iter().zip(&seg).map(|(a, b)| (a + b) * sign).collect())
    }
}

/// `A(D) = Σ_k ∫_∞^{P_k} du`.
pub fn abel(curve: &CurveModel, d: &Divisor) -> Result<Vec<C64>> {
    let ctx = AbelContext::new(curve)?;
    let mut u = vec![C64::new(0.0, 0.0); curve.genus];
    for (x, y) in d.coords() {
        let a = ctx.point(x, y)?;
        for k in 0..u.len() {
            u[k] += a[k];
        }
    }
    Ok(u)
}
