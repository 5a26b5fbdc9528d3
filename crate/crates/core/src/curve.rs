//! Canonical (n,s)-curves, Sato-weight combinatorics and the associated
//! first/second kind differential numerators.
//!
//! A curve is `f(x, y; λ) = -y^n + x^s + Σ λ_w y^j x^i` where the sum runs over
//! `0 <= j <= n-2`, `0 <= i <= s-2` with `w = ns - in - js > 0`. Every term of
//! `f` then carries Sato weight `ns` when `wgt x = n`, `wgt y = s` and
//! `wgt λ_w = w`. For `n = 2` this is the hyperelliptic form
//! `-y² + x^(2g+1) + Σ λ_(2i+2) x^(2g-i)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::series::Series;
use crate::numeric::Poly;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Hyperelliptic,
    /// `(3, 3m+1)`
    Trigonal3m1,
    /// `(3, 3m+2)`
    Trigonal3m2,
    OtherNS,
}

/// `x^i y^j` with `j < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub weight: u32,
}

impl Monomial {
    pub fn eval(&self, x: C64, y: C64) -> C64 {
        x.powu(self.i) * y.powu(self.j)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.i, self.j) {
            (0, 0) => write!(f, "1"),
            (i, 0) => write!(f, "x^{i}"),
            (0, j) => write!(f, "y^{j}"),
            (i, j) => write!(f, "x^{i} y^{j}"),
        }
    }
}

/// A raw bivariate coefficient table `(i, j) -> c` for `x^i y^j`; the
/// y-degree is unrestricted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bivariate(pub BTreeMap<(u32, u32), C64>);

impl Bivariate {
    pub fn new() -> Self {
        Bivariate(BTreeMap::new())
    }

    pub fn term(mut self, i: u32, j: u32, c: C64) -> Self {
        self.add_term(i, j, c);
        self
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: C64) {
        *self.0.entry((i, j)).or_insert(ZERO) += c;
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.0
            .iter()
            .map(|(&(i, j), &c)| c * x.powu(i) * y.powu(j))
            .sum()
    }

    pub fn y_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(_, c)| **c != ZERO)
            .map(|(&(_, j), _)| j)
            .max()
            .unwrap_or(0)
    }
}

/// A point together with its curve residual `|f(x, y)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: C64,
    pub y: C64,
    pub residual: f64,
}

impl CurvePoint {
    pub fn coords(&self) -> (C64, C64) {
        (self.x, self.y)
    }
}

/// Differential numerators: `du_w = υ_w dx / ∂_y f`, `dr_w = ρ_w dx / ∂_y f`.
#[derive(Debug, Clone)]
pub struct DifferentialNumerators {
    pub upsilon: Vec<Bivariate>,
    pub rho: Option<Vec<Bivariate>>,
}

/// Parametrization near infinity: `x = ξ^-n`, `y = ξ^-s (1 + Σ c_k ξ^k)`.
#[derive(Debug, Clone)]
pub struct InfinitySeries {
    pub n: u32,
    pub s: u32,
    /// `coeffs[k]` multiplies `ξ^k`; `coeffs[0] = 1`.
    pub coeffs: Vec<C64>,
}

impl InfinitySeries {
    pub fn y_factor(&self) -> Series {
        Series(self.coeffs.clone())
    }

    pub fn eval(&self, xi: C64) -> (C64, C64) {
        let yf = self.y_factor().eval(xi);
        (xi.powi(-(self.n as i32)), xi.powi(-(self.s as i32)) * yf)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveModel {
    pub n: u32,
    pub s: u32,
    pub lambda: BTreeMap<u32, C64>,
    pub genus: usize,
    pub gaps: Vec<u32>,
    pub family: Family,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Weierstrass gap sequence of the numerical semigroup generated by `n`, `s`.
pub fn gap_sequence(n: u32, s: u32) -> Result<Vec<u32>> {
    if n < 2 || n >= s {
        return Err(Error::InvalidCurve(format!("need 2 <= n < s, got ({n},{s})")));
    }
    if gcd(n, s) != 1 {
        return Err(Error::InvalidCurve(format!("gcd({n},{s}) != 1")));
    }
    // Every integer >= (n-1)(s-1) is representable.
    let conductor = (n - 1) * (s - 1);
    let gaps: Vec<u32> = (0..conductor)
        .filter(|&m| !(0..=m / s).any(|b| (m - b * s) % n == 0))
        .collect();
    debug_assert_eq!(gaps.len() as u32, conductor / 2);
    Ok(gaps)
}

impl CurveModel {
    pub fn new(n: u32, s: u32, lambda: BTreeMap<u32, C64>) -> Result<Self> {
        let gaps = gap_sequence(n, s)?;
        let family = match (n, s % 3) {
            (2, _) => Family::Hyperelliptic,
            (3, 1) => Family::Trigonal3m1,
            (3, 2) => Family::Trigonal3m2,
            _ => Family::OtherNS,
        };
        let allowed: Vec<u32> = Self::parameter_terms_of(n, s).iter().map(|t| t.2).collect();
        for (&w, c) in &lambda {
            if !allowed.contains(&w) {
                return Err(Error::InvalidCurve(format!(
                    "λ_{w} does not appear in the ({n},{s}) canonical equation"
                )));
            }
            if !c.is_finite() {
                return Err(Error::InvalidCurve(format!("λ_{w} is not finite")));
            }
        }
        let lambda = lambda.into_iter().filter(|(_, c)| *c != ZERO).collect();
        Ok(CurveModel {
            n,
            s,
            lambda,
            genus: gaps.len(),
            gaps,
            family,
        })
    }

    /// Curve with all λ set to zero.
    pub fn pham(n: u32, s: u32) -> Result<Self> {
        Self::new(n, s, BTreeMap::new())
    }

    pub fn with_lambda(n: u32, s: u32, lambda: &[(u32, C64)]) -> Result<Self> {
        Self::new(n, s, lambda.iter().copied().collect())
    }

    fn parameter_terms_of(n: u32, s: u32) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        for j in 0..=n.saturating_sub(2) {
            for i in 0..=s.saturating_sub(2) {
                let w = (n * s) as i64 - (i * n) as i64 - (j * s) as i64;
                if w > 0 {
                    out.push((i, j, w as u32));
                }
            }
        }
        out.sort_by_key(|t| t.2);
        out
    }

    /// `(i, j, w)` for every parameter term `λ_w y^j x^i` of the canonical equation.
    pub fn parameter_terms(&self) -> Vec<(u32, u32, u32)> {
        Self::parameter_terms_of(self.n, self.s)
    }

    /// Parameter weights present in the canonical equation.
    pub fn parameter_weights(&self) -> Vec<u32> {
        self.parameter_terms().iter().map(|t| t.2).collect()
    }

    /// `λ_w`, zero when absent (including `w <= 0`).
    pub fn lambda(&self, w: i64) -> C64 {
        if w <= 0 {
            return ZERO;
        }
        self.lambda.get(&(w as u32)).copied().unwrap_or(ZERO)
    }

    pub fn is_hyperelliptic(&self) -> bool {
        self.family == Family::Hyperelliptic
    }

    pub fn is_trigonal(&self) -> bool {
        matches!(self.family, Family::Trigonal3m1 | Family::Trigonal3m2)
    }

    pub fn weight(&self, i: u32, j: u32) -> u32 {
        i * self.n + j * self.s
    }

    pub fn monomial(&self, i: u32, j: u32) -> Monomial {
        Monomial {
            i,
            j,
            weight: self.weight(i, j),
        }
    }

    /// Sato weight of σ: `-(n²-1)(s²-1)/24`.
    pub fn wgt_sigma(&self) -> i64 {
        let (n, s) = (self.n as i64, self.s as i64);
        -((n * n - 1) * (s * s - 1)) / 24
    }

    /// All `x^i y^j`, `j < n`, of weight at most `wmax`, ascending in weight.
    pub fn monomials_up_to(&self, wmax: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for j in 0..self.n {
            if j * self.s > wmax {
                break;
            }
            let imax = (wmax - j * self.s) / self.n;
            for i in 0..=imax {
                out.push(self.monomial(i, j));
            }
        }
        out.sort_by_key(|m| m.weight);
        out
    }

    /// The unique monomial of weight `w` with y-degree below `n`, if any.
    pub fn monomial_of_weight(&self, w: u32) -> Option<Monomial> {
        (0..self.n)
            .filter(|&j| j * self.s <= w && (w - j * self.s) % self.n == 0)
            .map(|j| self.monomial((w - j * self.s) / self.n, j))
            .next()
    }

    pub fn eval_f(&self, x: C64, y: C64) -> C64 {
        let mut acc = -y.powu(self.n) + x.powu(self.s);
        for (i, j, w) in self.parameter_terms() {
            let l = self.lambda(w as i64);
            if l != ZERO {
                acc += l * y.powu(j) * x.powu(i);
            }
        }
        acc
    }

    pub fn df_dx(&self, x: C64, y: C64) -> C64 {
        let mut acc = x.powu(self.s - 1) * self.s as f64;
        for (i, j, w) in self.parameter_terms() {
            let l = self.lambda(w as i64);
            if l != ZERO && i > 0 {
                acc += l * y.powu(j) * x.powu(i - 1) * i as f64;
            }
        }
        acc
    }

    pub fn df_dy(&self, x: C64, y: C64) -> C64 {
        let mut acc = -y.powu(self.n - 1) * self.n as f64;
        for (i, j, w) in self.parameter_terms() {
            let l = self.lambda(w as i64);
            if l != ZERO && j > 0 {
                acc += l * y.powu(j - 1) * x.powu(i) * j as f64;
            }
        }
        acc
    }

    /// Coefficients of `f` in powers of `y`, each a polynomial in `x`.
    pub fn y_coefficients(&self) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.n as usize + 1];
        out[self.n as usize] = Poly::constant(-ONE);
        out[0] = Poly::monomial(ONE, self.s as usize);
        for (i, j, w) in self.parameter_terms() {
            let l = self.lambda(w as i64);
            if l != ZERO {
                out[j as usize] = out[j as usize].add(&Poly::monomial(l, i as usize));
            }
        }
        out
    }

    /// `f(x0, ·)` as a polynomial in `y`.
    pub fn f_in_y(&self, x0: C64) -> Poly {
        Poly(self.y_coefficients().iter().map(|p| p.eval(x0)).collect())
    }

    /// The `n` values of `y` over `x0`, with multiplicity.
    pub fn y_roots(&self, x0: C64) -> Result<Vec<C64>> {
        self.f_in_y(x0).roots()
    }

    /// Absolute on-curve tolerance at a point, scaled with its magnitude.
    pub fn on_curve_tolerance(&self, x: C64, y: C64) -> f64 {
        1e-10 * 1f64.max(x.norm().powi(self.s as i32)).max(y.norm().powi(self.n as i32))
    }

    /// Wraps a coordinate pair, checking it lies on the curve.
    pub fn point(&self, x: C64, y: C64) -> Result<CurvePoint> {
        let residual = self.eval_f(x, y).norm();
        if residual > self.on_curve_tolerance(x, y) {
            return Err(Error::InvalidInput(format!(
                "point ({x}, {y}) is off the curve (|f| = {residual:e})"
            )));
        }
        Ok(CurvePoint { x, y, residual })
    }

    /// Point whose residual is recorded but not checked.
    pub fn point_unchecked(&self, x: C64, y: C64) -> CurvePoint {
        CurvePoint {
            x,
            y,
            residual: self.eval_f(x, y).norm(),
        }
    }

    /// Newton refinement of `y` on `f(x, ·) = 0` starting from `y0`.
    pub fn refine_y(&self, x: C64, y0: C64) -> C64 {
        let mut y = y0;
        for _ in 0..30 {
            let fy = self.df_dy(x, y);
            if fy == ZERO {
                break;
            }
            let step = self.eval_f(x, y) / fy;
            y -= step;
            if step.norm() <= 1e-16 * (1.0 + y.norm()) {
                break;
            }
        }
        y
    }

    /// `f(X(t), Y(t))` for truncated series `X`, `Y` of equal length.
    pub fn eval_f_series(&self, xs: &Series, ys: &Series) -> Series {
        let len = xs.len();
        let mut acc = Series::zero(len);
        let mut ypow = Series::constant(ONE, len);
        for p in self.y_coefficients() {
            if !p.is_zero() {
                let px = p.0.iter().rev().fold(Series::zero(len), |a, &c| {
                    let mut r = a.mul(xs);
                    r.0[0] += c;
                    r
                });
                acc = acc.add(&px.mul(&ypow));
            }
            ypow = ypow.mul(ys);
        }
        acc
    }

    /// Taylor coefficients of the branch `y(x0 + t)` through `(x0, y0)` up to
    /// `t^order`. Fails at branch points, where `∂_y f = 0`.
    pub fn branch_series(&self, x0: C64, y0: C64, order: usize) -> Result<Series> {
        let fy = self.df_dy(x0, y0);
        let scale = 1.0 + self.df_dx(x0, y0).norm() + y0.norm().powi(self.n as i32 - 1);
        if fy.norm() <= 1e-10 * scale {
            return Err(Error::InvalidInput(format!(
                "({x0}, {y0}) is a branch point; the branch is not a graph over x"
            )));
        }
        let len = order + 1;
        let xs = Series::linear(x0, ONE, len);
        let mut ys = Series::constant(y0, len);
        for k in 1..len {
            let r = self.eval_f_series(&xs, &ys);
            ys.0[k] = -r.0[k] / fy;
        }
        Ok(ys)
    }

    /// Curve with `λ_k -> c^k λ_k`; under `x -> c^n x`, `y -> c^s y` the
    /// equation scales by `c^(ns)`.
    pub fn scaled(&self, c: C64) -> CurveModel {
        let lambda = self
            .lambda
            .iter()
            .map(|(&w, &l)| (w, l * c.powu(w)))
            .collect();
        CurveModel::new(self.n, self.s, lambda).expect("scaling preserves validity")
    }

    /// Basis monomials `υ_(w_i) = m_(2g-1-w_i)`, in gap order.
    pub fn basis_monomials(&self) -> Vec<Monomial> {
        let top = 2 * self.genus as u32 - 1;
        self.gaps
            .iter()
            .map(|&w| {
                self.monomial_of_weight(top - w)
                    .expect("2g-1-w is a non-gap for every gap w")
            })
            .collect()
    }

    pub fn differential_numerators(&self) -> DifferentialNumerators {
        let upsilon = self
            .basis_monomials()
            .iter()
            .map(|m| Bivariate::new().term(m.i, m.j, ONE))
            .collect();
        let rho = match (self.family, self.n, self.s) {
            (Family::Hyperelliptic, _, _) => Some(self.hyperelliptic_rho()),
            (_, 3, 4) => Some(self.rho_34()),
            _ => None,
        };
        DifferentialNumerators { upsilon, rho }
    }

    /// `ρ_(2i-1) = Σ_(k=1)^(2i-1) k λ_(4i-2k-2) x^(g-i+k)` with `λ_0 = 1`.
    fn hyperelliptic_rho(&self) -> Vec<Bivariate> {
        let g = self.genus as i64;
        (1..=g)
            .map(|i| {
                let mut b = Bivariate::new();
                for k in 1..=(2 * i - 1) {
                    let idx = 4 * i - 2 * k - 2;
                    let l = if idx == 0 { ONE } else { self.lambda(idx) };
                    if l != ZERO {
                        b.add_term((g - i + k) as u32, 0, l * k as f64);
                    }
                }
                b
            })
            .collect()
    }

    fn rho_34(&self) -> Vec<Bivariate> {
        let l2 = self.lambda(2);
        let l5 = self.lambda(5);
        let l6 = self.lambda(6);
        vec![
            Bivariate::new().term(2, 0, ONE),
            Bivariate::new().term(1, 1, C64::new(2.0, 0.0)),
            Bivariate::new()
                .term(2, 1, C64::new(5.0, 0.0))
                .term(2, 0, l2 * l2 * (2.0 / 3.0))
                .term(0, 1, l6)
                .term(1, 0, l2 * l5 * (2.0 / 3.0)),
        ]
    }

    /// Expansion at infinity to `ξ^order`, found order by order from
    /// `ξ^(ns) f(ξ^-n, ξ^-s Y) = 1 - Y^n + Σ λ_w ξ^w Y^j = 0`.
    pub fn infinity_series(&self, order: usize) -> Result<InfinitySeries> {
        let len = order + 1;
        let n = self.n;
        let terms: Vec<(u32, u32, C64)> = self
            .parameter_terms()
            .into_iter()
            .filter_map(|(_, j, w)| {
                let l = self.lambda(w as i64);
                (l != ZERO).then_some((j, w, l))
            })
            .collect();
        let mut y = Series::constant(ONE, len);
        for k in 1..len {
            let trunc = Series(y.0[..=k].to_vec());
            let mut f = trunc.powi(n).scale(-ONE);
            f.0[0] += ONE;
            for &(j, w, l) in &terms {
                if w as usize <= k {
                    f = f.add(&trunc.powi(j).shift(w as usize).scale(l));
                }
            }
            let ck = f.0[k] / n as f64;
            if !ck.is_finite() {
                return Err(Error::Series(format!("non-finite coefficient at order {k}")));
            }
            y.0[k] = ck;
        }
        Ok(InfinitySeries {
            n: self.n,
            s: self.s,
            coeffs: y.0,
        })
    }
}

/// Serialized curve: `{"n":3,"s":4,"lambda":{"2":[re,im],...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub n: u32,
    pub s: u32,
    #[serde(default)]
    pub lambda: BTreeMap<String, [f64; 2]>,
}

impl TryFrom<CurveJson> for CurveModel {
    type Error = Error;

    fn try_from(j: CurveJson) -> Result<Self> {
        let mut lambda = BTreeMap::new();
        for (k, v) in j.lambda {
            let w: u32 = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidCurve(format!("bad λ key {k:?}")))?;
            lambda.insert(w, C64::new(v[0], v[1]));
        }
        CurveModel::new(j.n, j.s, lambda)
    }
}

impl From<&CurveModel> for CurveJson {
    fn from(c: &CurveModel) -> Self {
        CurveJson {
            n: c.n,
            s: c.s,
            lambda: c
                .lambda
                .iter()
                .map(|(w, l)| (w.to_string(), [l.re, l.im]))
                .collect(),
        }
    }
}

impl Serialize for CurveModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CurveModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CurveJson::deserialize(d)?;
        CurveModel::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn gap_sequences() {
        assert_eq!(gap_sequence(2, 7).unwrap(), vec![1, 3, 5]);
        assert_eq!(gap_sequence(3, 4).unwrap(), vec![1, 2, 5]);
        assert_eq!(gap_sequence(2, 3).unwrap(), vec![1]);
        assert!(matches!(gap_sequence(2, 4), Err(Error::InvalidCurve(_))));
        assert!(gap_sequence(3, 3).is_err());
    }

    #[test]
    fn monomial_order_27() {
        let cv = CurveModel::pham(2, 7).unwrap();
        let got: Vec<(u32, u32)> = cv.monomials_up_to(12).iter().map(|m| (m.i, m.j)).collect();
        let expect = [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (4, 0), (1, 1), (5, 0), (2, 1), (6, 0)];
        assert_eq!(&got[..], &expect[..]);
        assert_eq!(cv.monomials_up_to(0).len(), 1);
    }

    #[test]
    fn monomial_order_34() {
        let cv = CurveModel::pham(3, 4).unwrap();
        let got: Vec<(u32, u32)> = cv.monomials_up_to(9).iter().map(|m| (m.i, m.j)).collect();
        assert_eq!(got, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)]);
    }

    #[test]
    fn canonical_parameters() {
        let cv = CurveModel::pham(3, 4).unwrap();
        assert_eq!(cv.parameter_weights(), vec![2, 5, 6, 8, 9, 12]);
        let h = CurveModel::pham(2, 7).unwrap();
        assert_eq!(h.parameter_weights(), vec![4, 6, 8, 10, 12, 14]);
        assert!(CurveModel::with_lambda(2, 7, &[(3, c(1.0))]).is_err());
    }

    #[test]
    fn eval_examples() {
        let h = CurveModel::pham(2, 7).unwrap();
        assert_eq!(h.eval_f(c(1.0), c(1.0)), ZERO);
        let t = CurveModel::with_lambda(3, 4, &[(6, c(1.0))]).unwrap();
        assert_eq!(t.eval_f(c(0.0), c(1.0)), c(-1.0));
        let h2 = CurveModel::with_lambda(2, 7, &[(14, c(2.0))]).unwrap();
        assert_eq!(h2.eval_f(c(0.0), c(1.0)), c(1.0));
    }

    #[test]
    fn numerators_27_and_34() {
        let h = CurveModel::with_lambda(2, 7, &[(4, c(0.3)), (6, c(-0.2)), (8, c(0.7))]).unwrap();
        let d = h.differential_numerators();
        let ups: Vec<Vec<(u32, u32)>> = d.upsilon.iter().map(|b| b.0.keys().copied().collect()).collect();
        assert_eq!(ups, vec![vec![(2, 0)], vec![(1, 0)], vec![(0, 0)]]);
        let rho = d.rho.unwrap();
        assert_eq!(rho[0].0, Bivariate::new().term(3, 0, c(1.0)).0);
        assert_eq!(rho[1].0, Bivariate::new().term(4, 0, c(3.0)).term(2, 0, c(0.3)).0);
        let r5 = Bivariate::new()
            .term(5, 0, c(5.0))
            .term(3, 0, c(0.9))
            .term(2, 0, c(-0.4))
            .term(1, 0, c(0.7));
        for (k, v) in &r5.0 {
            assert!((rho[2].0[k] - v).norm() < 1e-15);
        }
        let t = CurveModel::pham(3, 4).unwrap();
        let d = t.differential_numerators();
        let ups: Vec<(u32, u32)> = d.upsilon.iter().map(|b| *b.0.keys().next().unwrap()).collect();
        assert_eq!(ups, vec![(0, 1), (1, 0), (0, 0)]);
        assert_eq!(d.rho.unwrap()[1].0, Bivariate::new().term(1, 1, c(2.0)).0);
        assert!(CurveModel::pham(3, 5).unwrap().differential_numerators().rho.is_none());
    }

    #[test]
    fn elliptic_rho() {
        let e = CurveModel::with_lambda(2, 3, &[(4, c(0.5))]).unwrap();
        let d = e.differential_numerators();
        assert_eq!(d.rho.unwrap()[0].0, Bivariate::new().term(1, 0, c(1.0)).0);
    }

    #[test]
    fn series_at_infinity() {
        let p = CurveModel::pham(2, 7).unwrap().infinity_series(10).unwrap();
        assert!(p.coeffs[1..].iter().all(|c| *c == ZERO));
        let l4 = C64::new(0.3, -0.4);
        let cv = CurveModel::with_lambda(2, 7, &[(4, l4)]).unwrap();
        let s = cv.infinity_series(12).unwrap();
        assert!((s.coeffs[4] - l4 * 0.5).norm() < 1e-15);
        assert!((s.coeffs[8] + l4 * l4 / 8.0).norm() < 1e-15);
        assert!(s.coeffs[1..4].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn branch_series_tracks_curve() {
        let cv = CurveModel::with_lambda(3, 4, &[(2, c(0.3)), (9, C64::new(0.1, 0.2))]).unwrap();
        let x0 = C64::new(0.4, -0.3);
        let y0 = cv.y_roots(x0).unwrap()[1];
        let ys = cv.branch_series(x0, y0, 24).unwrap();
        let t = C64::new(0.01, 0.005);
        let y = cv.refine_y(x0 + t, ys.eval(t));
        assert!((y - ys.eval(t)).norm() < 1e-13, "{}", (y - ys.eval(t)).norm());
        assert!(cv.eval_f(x0 + t, ys.eval(t)).norm() < 1e-14);
    }

    #[test]
    fn json_roundtrip() {
        let cv = CurveModel::with_lambda(3, 4, &[(2, C64::new(0.5, 0.25)), (12, c(-1.0))]).unwrap();
        let s = serde_json::to_string(&cv).unwrap();
        assert_eq!(s, r#"{"n":3,"s":4,"lambda":{"12":[-1.0,0.0],"2":[0.5,0.25]}}"#);
        let back: CurveModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cv);
        assert!(serde_json::from_str::<CurveModel>(r#"{"n":3,"s":4,"extra":1}"#).is_err());
        assert!(serde_json::from_str::<CurveModel>(r#"{"n":3,"s":4,"lambda":{"3":[1,0]}}"#).is_err());
    }
}
