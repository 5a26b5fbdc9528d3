//! Dense univariate polynomials over the complex numbers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients in ascending order: `c[0] + c[1] x + ...`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c]).trimmed()
    }

    /// `x^k` times `c`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![ZERO; k + 1];
        v[k] = c;
        Poly(v).trimmed()
    }

    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Poly::constant(Complex64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Poly(vec![-r, Complex64::new(1.0, 0.0)]));
        }
        p
    }

    /// Drops exactly-zero leading coefficients.
    pub fn trimmed(mut self) -> Self {
        while matches!(self.0.last(), Some(c) if *c == ZERO) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == ZERO)
    }

    /// Degree of the trimmed polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| *c != ZERO)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.0.get(k).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.0.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect()).trimmed()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect()).trimmed()
    }

    pub fn scale(&self, c: Complex64) -> Poly {
        Poly(self.0.iter().map(|&a| a * c).collect()).trimmed()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Effective degree after discarding leading coefficients that are
    /// negligible relative to the coefficient scale.
    pub fn numerical_degree(&self, rel_tol: f64) -> Option<usize> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return None;
        }
        self.0.iter().rposition(|c| c.norm() > rel_tol * scale)
    }

    /// All roots with multiplicity.
    ///
    /// Companion-matrix eigenvalues for moderate degree, Aberth iteration
    /// above degree 30; every root is then polished by Newton steps on the
    /// original coefficients.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let deg = self
            .degree()
            .ok_or_else(|| Error::Numeric("roots of the zero polynomial".into()))?;
        if deg == 0 {
            return Ok(Vec::new());
        }
        let lead = self.0[deg];
        let monic: Vec<Complex64> = self.0[..=deg].iter().map(|c| c / lead).collect();
        let raw = match (deg <= 30).then(|| companion_roots(&monic)).flatten() {
            Some(r) => r,
            None => aberth_roots(&monic, 2000, 1e-14)?,
        };
        let p = Poly(monic);
        let dp = p.derivative();
        Ok(raw.into_iter().map(|r| newton_polish(&p, &dp, r)).collect())
    }
}

fn companion_roots(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let deg = monic.len() - 1;
    if deg == 1 {
        return Some(vec![-monic[0]]);
    }
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -monic[i];
    }
    m.try_schur(f64::EPSILON, 20_000)?
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
}

/// Aberth–Ehrlich simultaneous iteration on a monic polynomial.
pub fn aberth_roots(monic: &[Complex64], max_iter: usize, eps: f64) -> Result<Vec<Complex64>> {
    let deg = monic.len() - 1;
    let p = Poly(monic.to_vec());
    let dp = p.derivative();
    // Initial guesses on a circle of the Cauchy-bound radius.
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, th)
        })
        .collect();
    for _ in 0..max_iter {
        let mut max_step: f64 = 0.0;
        for k in 0..deg {
            let ratio = p.eval(z[k]) / dp.eval(z[k]);
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < eps {
            return Ok(z);
        }
    }
    Err(Error::Numeric("Aberth iteration did not converge".into()))
}

fn newton_polish(p: &Poly, dp: &Poly, mut z: Complex64) -> Complex64 {
    let mut val = p.eval(z).norm();
    for _ in 0..8 {
        let d = dp.eval(z);
        if d == ZERO {
            break;
        }
        let cand = z - p.eval(z) / d;
        let cval = p.eval(cand).norm();
        if !(cval < val) {
            break;
        }
        z = cand;
        val = cval;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_unity() {
        let p = Poly(vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let mut r = p.roots().unwrap();
        r.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        let expect = [c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        for (a, b) in r.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn aberth_matches_companion_on_high_degree() {
        let roots: Vec<Complex64> = (0..35)
            .map(|k| Complex64::from_polar(1.0 + 0.01 * k as f64, 0.37 * k as f64))
            .collect();
        let p = Poly::from_roots(&roots);
        let found = p.roots().unwrap();
        for r in &roots {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "{best}");
        }
    }

    #[test]
    fn arithmetic() {
        let a = Poly(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let b = Poly(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let m = a.mul(&b);
        assert_eq!(m.0, vec![c(0.0, 1.0), c(1.0, 2.0), c(2.0, 0.0)]);
        assert_eq!(m.derivative().0, vec![c(1.0, 2.0), c(4.0, 0.0)]);
        assert!(a.sub(&a).is_zero());
    }
}
