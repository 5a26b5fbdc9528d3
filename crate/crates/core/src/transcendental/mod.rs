//! Analytic side for hyperelliptic curves: periods, theta functions, the
//! Abel map and ℘-functions from theta.
//!
//! With `v = ω⁻¹u` and `κ = ηω⁻¹`, the sigma function is
//! `C exp(-½uᵗκu) θ[K](v; τ)`, so
//! `℘_{ij}(u) = κ_{ij} - ∂ᵢ∂ⱼ log θ[K](ω⁻¹u)` and higher-index functions
//! are further derivatives of `-log θ[K]`.

pub mod abel;
pub mod periods;
pub mod theta;

pub use abel::abel;
pub use periods::{branch_points, legendre_residual, period_matrices, PeriodData, PeriodJson};
pub use theta::{theta, theta_derivative, Characteristic};

use crate::curve::{CurveModel, C64};
use crate::error::{Error, Result};

pub const THETA_TOL: f64 = 1e-16;

/// Weighted vanishing order `(n²-1)(s²-1)/24` of σ at the origin.
pub fn sigma_order(curve: &CurveModel) -> usize {
    let (n, s) = (curve.n as usize, curve.s as usize);
    (n * n - 1) * (s * s - 1) / 24
}

/// Column `k` of `ω⁻¹`: the `v`-direction of `∂/∂u_{w_k}`.
fn u_direction(pd: &PeriodData, k: usize) -> Vec<C64> {
    (0..pd.genus).map(|a| pd.omega_inv[(a, k)]).collect()
}

/// Relative sizes `|∂ᵗθ[ε](0)| / Σ|terms|` along `dir`, for `t = 0..=order`.
pub fn vanishing_profile(pd: &PeriodData, ch: &Characteristic, dir: &[C64], order: usize) -> Result<Vec<f64>> {
    let zero = vec![C64::new(0.0, 0.0); pd.genus];
    let orders: Vec<Vec<usize>> = (0..=order).map(|t| vec![0; t]).collect();
    let b = theta::theta_batch(&zero, &pd.tau, ch, &[dir.to_vec()], &orders, THETA_TOL)?;
    Ok(b.values.iter().zip(&b.abs_sums).map(|(v, s)| v.norm() / s).collect())
}

const VANISH: f64 = 1e-9;
const NONVANISH: f64 = 1e-6;

fn qualifies(profile: &[f64]) -> bool {
    let d = profile.len() - 1;
    profile[..d].iter().all(|&r| r < VANISH) && profile[d] > NONVANISH
}

/// The half-integer characteristic of the vector of Riemann constants with
/// base point at infinity: the unique one whose theta function vanishes
/// along `t ↦ tω⁻¹e₁` to order exactly `(n²-1)(s²-1)/24`.
pub fn riemann_char(pd: &PeriodData, curve: &CurveModel) -> Result<Characteristic> {
    let d = sigma_order(curve);
    let dir = u_direction(pd, 0);
    let mut hits = Vec::new();
    let mut scored = Vec::new();
    for ch in Characteristic::half_integers(pd.genus) {
        let prof = vanishing_profile(pd, &ch, &dir, d)?;
        if qualifies(&prof) {
            hits.push(ch.clone());
        }
        let worst = prof[..d].iter().cloned().fold(0.0, f64::max);
        scored.push((worst, ch, prof));
    }
    if hits.len() == 1 {
        return Ok(hits.remove(0));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut report: Vec<String> = scored
        .iter()
        .take(3)
        .map(|(_, ch, prof)| format!("{:?}/{:?}: {:?}", ch.eps_p, ch.eps, prof))
        .collect();
    for k in 1..pd.genus {
        let dk = u_direction(pd, k);
        for (_, ch, _) in scored.iter().take(3) {
            let prof = vanishing_profile(pd, ch, &dk, d)?;
            report.push(format!("direction {k}, {:?}/{:?}: {:?}", ch.eps_p, ch.eps, prof));
        }
    }
    Err(Error::CharacteristicSearch(format!(
        "{} characteristics qualify; best candidates {}",
        hits.len(),
        report.join("; ")
    )))
}

/// `℘_{i,j,..}(u)` from theta for an index list of gap weights of length
/// 2 to 4 (`[1, 3]` is `℘₁₃`).
pub fn wp_theta(pd: &PeriodData, ch: &Characteristic, gaps: &[u32], u: &[C64], index: &[u32]) -> Result<C64> {
    if !(2..=4).contains(&index.len()) {
        return Err(Error::InvalidInput(format!("℘ needs 2 to 4 indices, got {}", index.len())));
    }
    let pos: Vec<usize> = index
        .iter()
        .map(|w| {
            gaps.iter()
                .position(|g| g == w)
                .ok_or_else(|| Error::InvalidInput(format!("{w} is not a gap")))
        })
        .collect::<Result<_>>()?;
    let ur = pd.reduce(u);
    let v: Vec<C64> = (0..pd.genus)
        .map(|a| (0..pd.genus).map(|b| pd.omega_inv[(a, b)] * ur[b]).sum())
        .collect();
    let dirs: Vec<Vec<C64>> = pos.iter().map(|&k| u_direction(pd, k)).collect();
    let (ld, rel) = theta::log_theta_derivative(&v, &pd.tau, ch, &dirs, THETA_TOL)?;
    if rel < 1e-10 {
        return Err(Error::ThetaDivisor(format!("θ[K] is {rel:e} of its term scale")));
    }
    Ok(if index.len() == 2 { pd.kappa[(pos[0], pos[1])] - ld } else { -ld })
}

/// Everything needed to evaluate ℘ from theta on one curve.
#[derive(Debug, Clone)]
pub struct ThetaSide {
    pub periods: PeriodData,
    pub characteristic: Characteristic,
    pub gaps: Vec<u32>,
}

impl ThetaSide {
    pub fn new(curve: &CurveModel) -> Result<Self> {
        let periods = period_matrices(curve)?;
        let characteristic = riemann_char(&periods, curve)?;
        Ok(ThetaSide { periods, characteristic, gaps: curve.gaps.clone() })
    }

    pub fn wp(&self, u: &[C64], index: &[u32]) -> Result<C64> {
        wp_theta(&self.periods, &self.characteristic, &self.gaps, u, index)
    }
}
