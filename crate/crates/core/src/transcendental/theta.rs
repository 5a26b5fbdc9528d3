//! Riemann theta functions with characteristics.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::C64;
use crate::error::{Error, Result};
use crate::numeric::CMatrix;

use super::periods::im_part;

const I: C64 = Complex64::new(0.0, 1.0);
const MAX_TERMS: usize = 4_000_000;

/// Characteristic `[ε′; ε]`, components in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    #[serde(rename = "epsP")]
    pub eps_p: Vec<f64>,
    pub eps: Vec<f64>,
}

impl Characteristic {
    pub fn zero(g: usize) -> Self {
        Characteristic { eps_p: vec![0.0; g], eps: vec![0.0; g] }
    }

    /// All `4^g` half-integer characteristics.
    pub fn half_integers(g: usize) -> Vec<Self> {
        (0..1usize << (2 * g))
            .map(|bits| Characteristic {
                eps_p: (0..g).map(|i| 0.5 * ((bits >> i) & 1) as f64).collect(),
                eps: (0..g).map(|i| 0.5 * ((bits >> (g + i)) & 1) as f64).collect(),
            })
            .collect()
    }

    /// `4 ε′·ε mod 2` for half-integer characteristics: 1 for odd theta.
    pub fn parity(&self) -> u32 {
        let s: f64 = self.eps_p.iter().zip(&self.eps).map(|(a, b)| 4.0 * a * b).sum();
        (s.round() as i64).rem_euclid(2) as u32
    }
}

/// Theta sums for a batch of derivative requests.
///
/// `dirs` are directions in `v`-space; each request in `orders` lists
/// indices into `dirs` (empty for the value). Values are returned scaled by
/// `exp(-shift)`, together with the sums of absolute values of the terms.
#[derive(Debug, Clone)]
pub struct ThetaBatch {
    pub values: Vec<C64>,
    pub abs_sums: Vec<f64>,
    pub shift: f64,
}

impl ThetaBatch {
    pub fn unscaled(&self, k: usize) -> C64 {
        self.values[k] * self.shift.exp()
    }
}

pub fn theta_batch(
    v: &[C64],
    tau: &CMatrix,
    ch: &Characteristic,
    dirs: &[Vec<C64>],
    orders: &[Vec<usize>],
    tol: f64,
) -> Result<ThetaBatch> {
    let g = v.len();
    if tau.nrows() != g || ch.eps.len() != g || ch.eps_p.len() != g {
        return Err(Error::InvalidInput("theta: dimension mismatch".into()));
    }
    let y = im_part(tau);
    let ys = (&y + y.transpose()) * 0.5;
    let chol = ys
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Theta("Im τ is not positive definite".into()))?;
    let yinv = chol.inverse();
    let im_v = nalgebra::DVector::from_iterator(g, v.iter().map(|c| c.im));
    let center = -(&yinv * &im_v);
    let max_order = orders.iter().map(|o| o.len()).max().unwrap_or(0);
    let radius = (-tol.ln() / PI).max(1.0).sqrt() + 1.5 + 0.5 * max_order as f64;
    let mut lo = vec![0i64; g];
    let mut hi = vec![0i64; g];
    let mut count = 1usize;
    for i in 0..g {
        let half = radius * yinv[(i, i)].sqrt();
        let c = center[i] - ch.eps_p[i];
        lo[i] = (c - half).floor() as i64;
        hi[i] = (c + half).ceil() as i64;
        count = count.saturating_mul((hi[i] - lo[i] + 1) as usize);
    }
    if count > MAX_TERMS {
        return Err(Error::Theta(format!(
            "truncation box has {count} points; τ is too ill-conditioned"
        )));
    }
    let shift = PI * center.dot(&(&ys * &center));
    let ve: Vec<C64> = v.iter().zip(&ch.eps).map(|(a, b)| a + b).collect();
    let mut values = vec![C64::new(0.0, 0.0); orders.len()];
    let mut abs_sums = vec![0.0; orders.len()];
    let mut n = lo.clone();
    let mut m = vec![0.0; g];
    let mut factors = vec![C64::new(0.0, 0.0); dirs.len()];
    loop {
        for i in 0..g {
            m[i] = n[i] as f64 + ch.eps_p[i];
        }
        let mut q = 0.0;
        for i in 0..g {
            for j in 0..g {
                q += (m[i] - center[i]) * ys[(i, j)] * (m[j] - center[j]);
            }
        }
        if q <= radius * radius {
            let mut ex = C64::new(0.0, 0.0);
            for i in 0..g {
                for j in 0..g {
                    ex += tau[(i, j)] * (m[i] * m[j]);
                }
                ex += ve[i] * (2.0 * m[i]);
            }
            let term = (I * PI * ex - shift).exp();
            for (k, d) in dirs.iter().enumerate() {
                factors[k] = 2.0 * PI * I * d.iter().zip(&m).map(|(a, b)| a * b).sum::<C64>();
            }
            for (k, ord) in orders.iter().enumerate() {
                let mut t = term;
                for &d in ord {
                    t *= factors[d];
                }
                values[k] += t;
                abs_sums[k] += t.norm();
            }
        }
        let mut i = 0;
        loop {
            if i == g {
                return Ok(ThetaBatch { values, abs_sums, shift });
            }
            n[i] += 1;
            if n[i] <= hi[i] {
                break;
            }
            n[i] = lo[i];
            i += 1;
        }
    }
}

/// `θ[ε](v; τ)`.
pub fn theta(v: &[C64], tau: &CMatrix, ch: &Characteristic, tol: f64) -> Result<C64> {
    let b = theta_batch(v, tau, ch, &[], &[vec![]], tol)?;
    Ok(b.unscaled(0))
}

/// Partial derivative `∂^α θ[ε](v; τ)` for the multi-index given as a list of
/// coordinate indices (`[0, 0, 1]` is `∂₀²∂₁`).
pub fn theta_derivative(
    v: &[C64],
    tau: &CMatrix,
    ch: &Characteristic,
    index: &[usize],
    tol: f64,
) -> Result<C64> {
    let g = v.len();
    let dirs: Vec<Vec<C64>> = (0..g)
        .map(|i| (0..g).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let b = theta_batch(v, tau, ch, &dirs, &[index.to_vec()], tol)?;
    Ok(b.unscaled(0))
}

/// Set partitions of `{0, .., k-1}` as lists of bitmasks.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, k: usize, blocks: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == k {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            rec(i + 1, k, blocks, out);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        rec(i + 1, k, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `∂_{d₁}⋯∂_{d_k} log θ[ε](v)` for directions `d` (at most four), together
/// with `|θ| / Σ|terms|`, the relative size of θ at `v`.
pub fn log_theta_derivative(
    v: &[C64],
    tau: &CMatrix,
    ch: &Characteristic,
    dirs: &[Vec<C64>],
    tol: f64,
) -> Result<(C64, f64)> {
    let k = dirs.len();
    let orders: Vec<Vec<usize>> = (0..1usize << k)
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    let b = theta_batch(v, tau, ch, dirs, &orders, tol)?;
    let th = b.values[0];
    let rel = th.norm() / b.abs_sums[0];
    let mut acc = C64::new(0.0, 0.0);
    for p in set_partitions(k) {
        let nb = p.len();
        let mut prod = C64::new(1.0, 0.0);
        for &blk in &p {
            prod *= b.values[blk] / th;
        }
        let sign = if nb % 2 == 1 { 1.0 } else { -1.0 };
        acc += prod * (sign * factorial(nb - 1));
    }
    Ok((acc, rel))
}
