//! Seeded random curves, divisors and lattice points for the test suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::curve::{CurveModel, C64};
use crate::divisor::Divisor;
use crate::error::{Error, Result};

pub use rand::SeedableRng;
pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> SuiteRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform point of the closed disk `|z| <= r`.
pub fn in_disk(rng: &mut SuiteRng, r: f64) -> C64 {
    let rho = r * rng.gen::<f64>().sqrt();
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(rho, phi)
}

/// Curve with every parameter `λ_w` uniform in the disk `|λ| <= bound`.
pub fn curve(rng: &mut SuiteRng, n: u32, s: u32, bound: f64) -> Result<CurveModel> {
    let probe = CurveModel::pham(n, s)?;
    let lambda: Vec<(u32, C64)> = probe
        .parameter_weights()
        .into_iter()
        .map(|w| (w, in_disk(rng, bound)))
        .collect();
    CurveModel::with_lambda(n, s, &lambda)
}

/// `deg` points with abscissae in the unit disk and a uniformly chosen sheet.
/// Abscissae closer than `0.05` are redrawn so the divisor is reduced.
pub fn divisor(rng: &mut SuiteRng, curve: &CurveModel, deg: usize) -> Result<Divisor> {
    let mut pts: Vec<(C64, C64)> = Vec::with_capacity(deg);
    let mut tries = 0;
    while pts.len() < deg {
        tries += 1;
        if tries > 1000 {
            return Err(Error::Numeric("could not sample separated points".into()));
        }
        let x = in_disk(rng, 1.0);
        if pts.iter().any(|p| (p.0 - x).norm() < 0.05) {
            continue;
        }
        let ys = curve.y_roots(x)?;
        let y = ys[rng.gen_range(0..ys.len())];
        pts.push((x, curve.refine_y(x, y)));
    }
    Divisor::new(curve, &pts)
}

/// Point `ω(a + τb)` of the Jacobian with `a, b` uniform in `[0, 1)^g`.
pub fn jacobian_point(rng: &mut SuiteRng, pd: &crate::transcendental::PeriodData) -> Vec<C64> {
    let g = pd.genus;
    let a: Vec<f64> = (0..g).map(|_| rng.gen()).collect();
    let b: Vec<f64> = (0..g).map(|_| rng.gen()).collect();
    pd.lattice_vector(&a, &b)
}
