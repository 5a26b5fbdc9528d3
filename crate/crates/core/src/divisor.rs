//! The coordinate ring `ℂ[x, y] / f`: reduction, interpolation of polynomial
//! functions through divisors, and extraction of divisors of zeros.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curve::{Bivariate, CurveModel, CurvePoint, Monomial, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::numeric::linalg::{self, CMatrix, CVector};
use crate::numeric::matching::{match_points, point_distance};
use crate::numeric::series::Series;
use crate::numeric::Poly;

/// Pivot threshold below which an interpolation system counts as singular.
pub const INTERPOLATION_PIVOT_TOL: f64 = 1e-12;
/// Default relative tolerance for multiset matching of points.
pub const MATCH_TOL: f64 = 1e-8;

/// An element of the coordinate ring with y-degree below `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFunction {
    pub coeffs: BTreeMap<Monomial, C64>,
    pub weight: u32,
    pub monic: bool,
}

impl PolyFunction {
    pub fn from_coeffs(coeffs: BTreeMap<Monomial, C64>) -> Self {
        let coeffs: BTreeMap<Monomial, C64> =
            coeffs.into_iter().filter(|(_, c)| *c != ZERO).collect();
        let lead = coeffs.iter().max_by_key(|(m, _)| m.weight);
        let weight = lead.map_or(0, |(m, _)| m.weight);
        let monic = lead.is_some_and(|(_, c)| *c == ONE);
        PolyFunction {
            coeffs,
            weight,
            monic,
        }
    }

    pub fn coeff(&self, m: &Monomial) -> C64 {
        self.coeffs.get(m).copied().unwrap_or(ZERO)
    }

    /// Coefficient of `x^i y^j`.
    pub fn coeff_ij(&self, i: u32, j: u32) -> C64 {
        self.coeffs
            .iter()
            .find(|(m, _)| m.i == i && m.j == j)
            .map_or(ZERO, |(_, c)| *c)
    }

    pub fn leading(&self) -> Option<(Monomial, C64)> {
        self.coeffs
            .iter()
            .max_by_key(|(m, _)| m.weight)
            .map(|(m, c)| (*m, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn y_degree(&self) -> u32 {
        self.coeffs.keys().map(|m| m.j).max().unwrap_or(0)
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.coeffs.iter().map(|(m, c)| c * m.eval(x, y)).sum()
    }

    /// Sum of absolute monomial terms at a point; the natural scale of `eval`.
    pub fn term_scale(&self, x: C64, y: C64) -> f64 {
        self.coeffs
            .iter()
            .map(|(m, c)| (c * m.eval(x, y)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// The coefficient of `y^j` as a polynomial in `x`.
    pub fn y_coefficient(&self, j: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.coeffs {
            if m.j == j {
                out = out.add(&Poly::monomial(*c, m.i as usize));
            }
        }
        out
    }

    /// Taylor series of `R(x0 + t, Y(t))` for a series `Y`.
    pub fn eval_series(&self, x0: C64, ys: &Series) -> Series {
        let len = ys.len();
        let xs = Series::linear(x0, ONE, len);
        let mut acc = Series::zero(len);
        for (m, c) in &self.coeffs {
            acc = acc.add(&xs.powi(m.i).mul(&ys.powi(m.j)).scale(*c));
        }
        acc
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (format!("{},{}", m.i, m.j), [c.re, c.im]))
                .collect(),
        }
    }

    pub fn from_json(curve: &CurveModel, j: &PolyJson) -> Result<Self> {
        let mut raw = Bivariate::new();
        for (k, v) in &j.coeffs {
            let (i, jj) = parse_pair(k)?;
            raw.add_term(i, jj, C64::new(v[0], v[1]));
        }
        if raw.y_degree() >= curve.n {
            return Err(Error::InvalidInput(format!(
                "y-degree must be below {} in a reduced polynomial function",
                curve.n
            )));
        }
        Ok(reduce(curve, &raw))
    }
}

fn parse_pair(k: &str) -> Result<(u32, u32)> {
    let bad = || Error::InvalidInput(format!("bad monomial key {k:?}, expected \"i,j\""));
    let (a, b) = k.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// `{"coeffs": {"i,j": [re, im]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub coeffs: BTreeMap<String, [f64; 2]>,
}

/// A positive divisor given as a list of affine points with repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisor {
    pub points: Vec<CurvePoint>,
}

/// `{"points": [[xre, xim, yre, yim], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorJson {
    pub points: Vec<[f64; 4]>,
}

impl Divisor {
    /// Builds a divisor, checking every point lies on the curve and that no
    /// full fiber of `x` is present.
    pub fn new(curve: &CurveModel, coords: &[(C64, C64)]) -> Result<Self> {
        let points = coords
            .iter()
            .map(|&(x, y)| curve.point(x, y))
            .collect::<Result<Vec<_>>>()?;
        let d = Divisor { points };
        d.check_reduced(curve)?;
        Ok(d)
    }

    pub fn from_points_unchecked(curve: &CurveModel, coords: &[(C64, C64)]) -> Self {
        Divisor {
            points: coords
                .iter()
                .map(|&(x, y)| curve.point_unchecked(x, y))
                .collect(),
        }
    }

    pub fn empty() -> Self {
        Divisor { points: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn coords(&self) -> Vec<(C64, C64)> {
        self.points.iter().map(|p| (p.x, p.y)).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// Sum of divisors.
    pub fn plus(&self, other: &Divisor) -> Divisor {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Divisor { points }
    }

    /// Hyperelliptic involution `(x, y) -> (x, -y)` applied pointwise.
    pub fn involution(&self) -> Divisor {
        Divisor {
            points: self
                .points
                .iter()
                .map(|p| CurvePoint {
                    x: p.x,
                    y: -p.y,
                    residual: p.residual,
                })
                .collect(),
        }
    }

    /// Rejects divisors containing a whole fiber `x = x0` (all `n` points
    /// over `x0`, counted with multiplicity).
    pub fn check_reduced(&self, curve: &CurveModel) -> Result<()> {
        let pts = self.coords();
        let mut seen = vec![false; pts.len()];
        for a in 0..pts.len() {
            if seen[a] {
                continue;
            }
            let x0 = pts[a].0;
            let group: Vec<usize> = (a..pts.len())
                .filter(|&b| (pts[b].0 - x0).norm() < 1e-9 * (1.0 + x0.norm()))
                .collect();
            for &b in &group {
                seen[b] = true;
            }
            if group.len() < curve.n as usize {
                continue;
            }
            let fiber: Vec<(C64, C64)> = curve.y_roots(x0)?.into_iter().map(|y| (x0, y)).collect();
            let have: Vec<(C64, C64)> = group.iter().map(|&b| pts[b]).collect();
            if let Some((_, d)) = match_points(&fiber, &have) {
                if d < 1e-6 {
                    return Err(Error::InvalidInput(format!(
                        "divisor contains the full fiber over x = {x0}; it is not reduced"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> DivisorJson {
        DivisorJson {
            points: self
                .points
                .iter()
                .map(|p| [p.x.re, p.x.im, p.y.re, p.y.im])
                .collect(),
        }
    }

    pub fn from_json(curve: &CurveModel, j: &DivisorJson) -> Result<Self> {
        let coords: Vec<(C64, C64)> = j
            .points
            .iter()
            .map(|p| (C64::new(p[0], p[1]), C64::new(p[2], p[3])))
            .collect();
        Divisor::new(curve, &coords)
    }
}

/// Representative modulo `f` with y-degree below `n`, obtained by repeatedly
/// substituting `y^n = x^s + Σ λ_w y^j x^i`.
pub fn reduce(curve: &CurveModel, raw: &Bivariate) -> PolyFunction {
    let n = curve.n;
    let mut work: BTreeMap<(u32, u32), C64> = raw.0.clone();
    let mut rhs = vec![(curve.s, 0u32, ONE)];
    for (i, j, w) in curve.parameter_terms() {
        let l = curve.lambda(w as i64);
        if l != ZERO {
            rhs.push((i, j, l));
        }
    }
    loop {
        let top = work
            .iter()
            .filter(|(&(_, j), c)| j >= n && **c != ZERO)
            .map(|(&k, &c)| (k, c))
            .max_by_key(|&((_, j), _)| j);
        let Some(((i, j), c)) = top else { break };
        work.remove(&(i, j));
        for &(ri, rj, rc) in &rhs {
            *work.entry((i + ri, j - n + rj)).or_insert(ZERO) += c * rc;
        }
    }
    PolyFunction::from_coeffs(
        work.into_iter()
            .map(|((i, j), c)| (curve.monomial(i, j), c))
            .collect(),
    )
}

/// Groups repeated points: `(point, multiplicity)` in first-occurrence order.
fn group_points(d: &Divisor) -> Vec<((C64, C64), usize)> {
    let mut out: Vec<((C64, C64), usize)> = Vec::new();
    for p in d.coords() {
        match out.iter_mut().find(|(q, _)| point_distance(*q, p) < 1e-12) {
            Some(e) => e.1 += 1,
            None => out.push((p, 1)),
        }
    }
    out
}

/// Solves for `lead_coeff · lead + Σ c_m m` vanishing on `D`, where `m` runs
/// over `basis` and repeated points impose Taylor rows along the branch.
pub fn interpolate_with(
    curve: &CurveModel,
    lead: Monomial,
    lead_coeff: C64,
    basis: &[Monomial],
    d: &Divisor,
) -> Result<PolyFunction> {
    let k = basis.len();
    if d.degree() != k {
        return Err(Error::InvalidInput(format!(
            "interpolation with {k} free coefficients needs {k} points, got {}",
            d.degree()
        )));
    }
    let mut a = CMatrix::zeros(k, k);
    let mut b = CVector::zeros(k);
    let mut row = 0;
    for ((x0, y0), mult) in group_points(d) {
        if mult == 1 {
            for (c, m) in basis.iter().enumerate() {
                a[(row, c)] = m.eval(x0, y0);
            }
            b[row] = -lead_coeff * lead.eval(x0, y0);
            row += 1;
            continue;
        }
        let ys = curve.branch_series(x0, y0, mult - 1)?;
        let xs = Series::linear(x0, ONE, mult);
        let taylor = |m: &Monomial| xs.powi(m.i).mul(&ys.powi(m.j));
        let lead_t = taylor(&lead);
        let cols: Vec<Series> = basis.iter().map(taylor).collect();
        for r in 0..mult {
            for (c, s) in cols.iter().enumerate() {
                a[(row, c)] = s.0[r];
            }
            b[row] = -lead_coeff * lead_t.0[r];
            row += 1;
        }
    }
    let sol = linalg::solve(&a, &b, INTERPOLATION_PIVOT_TOL).map_err(|_| Error::SpecialDivisor {
        weight: lead.weight,
        hint: format!(
            "the {k}x{k} interpolation determinant vanishes; the divisor is special or not in general position"
        ),
    })?;
    let mut coeffs: BTreeMap<Monomial, C64> = basis.iter().copied().zip(sol.iter().copied()).collect();
    coeffs.insert(lead, lead_coeff);
    Ok(PolyFunction::from_coeffs(coeffs))
}

/// The monic polynomial function of weight `w >= 2g` vanishing on `D`,
/// `deg D = w - g`.
pub fn interpolate(curve: &CurveModel, w: u32, d: &Divisor) -> Result<PolyFunction> {
    let g = curve.genus as u32;
    if w < 2 * g {
        return Err(Error::InvalidInput(format!("interpolation weight {w} is below 2g = {}", 2 * g)));
    }
    if d.degree() as u32 != w - g {
        return Err(Error::InvalidInput(format!(
            "weight {w} needs a divisor of degree {}, got {}",
            w - g,
            d.degree()
        )));
    }
    let lead = curve
        .monomial_of_weight(w)
        .expect("weights >= 2g are non-gaps");
    let basis: Vec<Monomial> = curve
        .monomials_up_to(w)
        .into_iter()
        .filter(|m| m.weight < w)
        .collect();
    interpolate_with(curve, lead, ONE, &basis, d)
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let k = m.len();
    if k == 0 {
        return Poly::constant(ONE);
    }
    if k == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero();
    for c in 0..k {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(cc, _)| cc != c)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = m[0][c].mul(&poly_det(&minor));
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Resultant in `y` of `R` and `f`, a polynomial in `x`.
pub fn y_resultant(curve: &CurveModel, r: &PolyFunction) -> Poly {
    let dr = r.y_degree() as usize;
    let nf = curve.n as usize;
    if dr == 0 {
        let p = r.y_coefficient(0);
        let mut out = Poly::constant(ONE);
        for _ in 0..nf {
            out = out.mul(&p);
        }
        return out;
    }
    // Sylvester matrix of size (n + dr): dr rows of f, n rows of R,
    // coefficients ordered from the highest power of y.
    let fc = curve.y_coefficients();
    let rc: Vec<Poly> = (0..=dr as u32).map(|j| r.y_coefficient(j)).collect();
    let size = nf + dr;
    let mut m = vec![vec![Poly::zero(); size]; size];
    for row in 0..dr {
        for (k, p) in fc.iter().rev().enumerate() {
            m[row][row + k] = p.clone();
        }
    }
    for row in 0..nf {
        for (k, p) in rc.iter().rev().enumerate() {
            m[dr + row][row + k] = p.clone();
        }
    }
    poly_det(&m).trimmed()
}

/// Two-variable Newton polish of a common zero of `R` and `f`; returns the
/// input unchanged if the Jacobian is singular.
fn polish(curve: &CurveModel, r: &PolyFunction, x: C64, y: C64) -> (C64, C64) {
    let (mut x, mut y) = (x, y);
    let rx = derivative_x(r);
    let ry = derivative_y(r);
    for _ in 0..20 {
        let (f0, g0) = (r.eval(x, y), curve.eval_f(x, y));
        let (a, b) = (rx.eval(x, y), ry.eval(x, y));
        let (c, d) = (curve.df_dx(x, y), curve.df_dy(x, y));
        let det = a * d - b * c;
        let scale = (a.norm() + b.norm()) * (c.norm() + d.norm());
        if det.norm() <= 1e-10 * scale || scale == 0.0 {
            break;
        }
        let dx = (d * f0 - b * g0) / det;
        let dy = (a * g0 - c * f0) / det;
        x -= dx;
        y -= dy;
        if dx.norm() + dy.norm() <= 1e-16 * (1.0 + x.norm() + y.norm()) {
            break;
        }
    }
    (x, y)
}

fn derivative_x(r: &PolyFunction) -> PolyFunction {
    PolyFunction {
        coeffs: r
            .coeffs
            .iter()
            .filter(|(m, _)| m.i > 0)
            .map(|(m, c)| {
                (
                    Monomial {
                        i: m.i - 1,
                        j: m.j,
                        weight: 0,
                    },
                    c * m.i as f64,
                )
            })
            .collect(),
        weight: 0,
        monic: false,
    }
}

fn derivative_y(r: &PolyFunction) -> PolyFunction {
    PolyFunction {
        coeffs: r
            .coeffs
            .iter()
            .filter(|(m, _)| m.j > 0)
            .map(|(m, c)| {
                (
                    Monomial {
                        i: m.i,
                        j: m.j - 1,
                        weight: 0,
                    },
                    c * m.j as f64,
                )
            })
            .collect(),
        weight: 0,
        monic: false,
    }
}

/// Clusters approximate roots that are closer than `tol·(1+|x|)`.
fn cluster_roots(roots: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for a in 0..roots.len() {
        if used[a] {
            continue;
        }
        let mut members = vec![a];
        used[a] = true;
        let mut grew = true;
        while grew {
            grew = false;
            for b in 0..roots.len() {
                if !used[b]
                    && members
                        .iter()
                        .any(|&m| (roots[m] - roots[b]).norm() < tol * (1.0 + roots[m].norm()))
                {
                    used[b] = true;
                    members.push(b);
                    grew = true;
                }
            }
        }
        let mean = members.iter().map(|&m| roots[m]).sum::<C64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

/// Order of vanishing of `R` along the branch through `(x0, y0)`, capped at
/// `cap`, judged against the scale `scale`.
fn branch_order(curve: &CurveModel, r: &PolyFunction, x0: C64, y0: C64, cap: usize, scale: f64) -> usize {
    let Ok(ys) = curve.branch_series(x0, y0, cap) else {
        return 1;
    };
    let s = r.eval_series(x0, &ys);
    s.0.iter()
        .take(cap)
        .position(|c| c.norm() > 1e-6 * scale)
        .unwrap_or(cap)
        .max(1)
}

/// All affine common zeros of `R` and `f`, with multiplicity.
pub fn zero_divisor(curve: &CurveModel, r: &PolyFunction) -> Result<Divisor> {
    if r.is_zero() {
        return Err(Error::InvalidInput("zero polynomial function".into()));
    }
    let mut pts: Vec<(C64, C64)> = Vec::new();
    if r.y_degree() == 0 {
        let p = r.y_coefficient(0);
        for x0 in p.roots()? {
            for y in curve.y_roots(x0)? {
                pts.push((x0, curve.refine_y(x0, y)));
            }
        }
        return Ok(Divisor::from_points_unchecked(curve, &pts));
    }
    let res = y_resultant(curve, r);
    if res.is_zero() || res.max_abs_coeff() == 0.0 {
        return Err(Error::SharedComponent);
    }
    let deg = res.numerical_degree(1e-13).unwrap_or(0);
    if deg == 0 {
        return Ok(Divisor::empty());
    }
    let res = Poly(res.0[..=deg].to_vec());
    let roots = res.roots()?;
    for (x0, mult) in cluster_roots(&roots, 1e-6) {
        let fiber = curve.y_roots(x0)?;
        let scale = |y: C64| r.term_scale(x0, y).max(1e-300);
        let mut ranked: Vec<(f64, C64)> = fiber
            .iter()
            .map(|&y| {
                let y = curve.refine_y(x0, y);
                (r.eval(x0, y).norm() / scale(y), y)
            })
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        if mult == 1 {
            let (x, y) = polish(curve, r, x0, ranked[0].1);
            pts.push((x, y));
            continue;
        }
        let mut left = mult;
        for &(score, y) in &ranked {
            if left == 0 {
                break;
            }
            if score > 1e-5 && left < mult {
                break;
            }
            let order = branch_order(curve, r, x0, y, left, scale(y)).min(left);
            let order = if score > 1e-5 { left } else { order };
            let p = if order == 1 { polish(curve, r, x0, y) } else { (x0, y) };
            for _ in 0..order {
                pts.push(p);
            }
            left -= order;
        }
        if left > 0 {
            return Err(Error::Numeric(format!(
                "could not resolve a multiple intersection over x = {x0}"
            )));
        }
    }
    Ok(Divisor::from_points_unchecked(curve, &pts))
}

/// `D*` with `(R)_0 = D + D*`, requiring `deg D* = weight(R) - deg D`.
pub fn complement(curve: &CurveModel, r: &PolyFunction, d: &Divisor) -> Result<Divisor> {
    complement_with_tol(curve, r, d, MATCH_TOL)
}

pub fn complement_with_tol(curve: &CurveModel, r: &PolyFunction, d: &Divisor, tol: f64) -> Result<Divisor> {
    let zeros = zero_divisor(curve, r)?;
    let expected = r.weight as usize;
    if zeros.degree() < expected {
        return Err(Error::DegenerateComplement(format!(
            "only {} of {expected} zeros are affine; the complement meets infinity",
            zeros.degree()
        )));
    }
    let z = zeros.coords();
    let (pairs, worst) = match_points(&d.coords(), &z)
        .ok_or_else(|| Error::Inconsistent("divisor is larger than the zero divisor".into()))?;
    if worst > tol {
        return Err(Error::Inconsistent(format!(
            "divisor is not contained in the zero divisor (worst mismatch {worst:e})"
        )));
    }
    let mut used = vec![false; z.len()];
    for &p in &pairs {
        used[p] = true;
    }
    let rest: Vec<(C64, C64)> = z
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(p, _)| *p)
        .collect();
    let scale = d
        .coords()
        .iter()
        .map(|(x, _)| 1.0 + x.norm())
        .fold(1.0, f64::max);
    if rest.iter().any(|(x, _)| x.norm() > 1e8 * scale) {
        return Err(Error::DegenerateComplement(
            "complement points diverge; the configuration is near the identity".into(),
        ));
    }
    Ok(Divisor::from_points_unchecked(curve, &rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::matching::multiset_distance;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pt(curve: &CurveModel, x: C64, k: usize) -> (C64, C64) {
        let ys = curve.y_roots(x).unwrap();
        (x, curve.refine_y(x, ys[k % ys.len()]))
    }

    #[test]
    fn reduction() {
        let cv = CurveModel::with_lambda(2, 7, &[(4, c(0.5, 0.0)), (14, c(2.0, 0.0))]).unwrap();
        let r = reduce(&cv, &Bivariate::new().term(0, 2, ONE));
        assert_eq!(r.coeff_ij(7, 0), ONE);
        assert_eq!(r.coeff_ij(5, 0), c(0.5, 0.0));
        assert_eq!(r.coeff_ij(0, 0), c(2.0, 0.0));
        assert_eq!(r.weight, 14);
        let p = CurveModel::pham(3, 4).unwrap();
        let r = reduce(&p, &Bivariate::new().term(0, 3, ONE));
        assert_eq!(r.coeffs.len(), 1);
        assert_eq!(r.coeff_ij(4, 0), ONE);
        let raw = Bivariate::new().term(1, 5, c(1.0, 1.0)).term(2, 0, ONE);
        let once = reduce(&cv, &raw);
        let twice = reduce(&cv, &Bivariate(once.coeffs.iter().map(|(m, c)| ((m.i, m.j), *c)).collect()));
        assert_eq!(once, twice);
    }

    #[test]
    fn genus_one_interpolation() {
        let e = CurveModel::with_lambda(2, 3, &[(4, c(-1.0, 0.0))]).unwrap();
        let p = pt(&e, c(0.3, 0.2), 0);
        let d = Divisor::new(&e, &[p]).unwrap();
        let r = interpolate(&e, 2, &d).unwrap();
        assert_eq!(r.coeff_ij(1, 0), ONE);
        assert!((r.coeff_ij(0, 0) + p.0).norm() < 1e-15);
        let z = zero_divisor(&e, &r).unwrap();
        assert!(multiset_distance(&z.coords(), &[p, (p.0, -p.1)]) < 1e-12);
        let comp = complement(&e, &r, &d).unwrap();
        assert!(multiset_distance(&comp.coords(), &[(p.0, -p.1)]) < 1e-12);
    }

    #[test]
    fn pham_34_fiber_of_y_equal_one() {
        let p = CurveModel::pham(3, 4).unwrap();
        let r = reduce(&p, &Bivariate::new().term(0, 1, ONE).term(0, 0, -ONE));
        let z = zero_divisor(&p, &r).unwrap();
        let expect: Vec<(C64, C64)> = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
            .iter()
            .map(|&x| (x, ONE))
            .collect();
        assert!(multiset_distance(&z.coords(), &expect) < 1e-12);
    }

    fn det3_oracle(rows: &[[C64; 4]]) -> C64 {
        let m: Vec<Vec<C64>> = rows.iter().map(|r| r.to_vec()).collect();
        linalg::det_laplace(&m)
    }

    #[test]
    fn interpolation_34_matches_determinant_ratio() {
        let cv = CurveModel::with_lambda(3, 4, &[(2, c(0.2, 0.1)), (6, c(-0.4, 0.0)), (12, c(0.3, 0.3))]).unwrap();
        let pts = [pt(&cv, c(0.3, 0.1), 0), pt(&cv, c(-0.5, 0.4), 1), pt(&cv, c(0.1, -0.7), 2)];
        let d = Divisor::new(&cv, &pts).unwrap();
        let r = interpolate(&cv, 6, &d).unwrap();
        // R6 = det[[x², y, x, 1]; rows at P_k] / det[[y, x, 1]; rows at P_k]
        let num = |x: C64, y: C64| {
            let mut rows = vec![[x * x, y, x, ONE]];
            for &(a, b) in &pts {
                rows.push([a * a, b, a, ONE]);
            }
            det3_oracle(&rows)
        };
        let den: Vec<Vec<C64>> = pts.iter().map(|&(a, b)| vec![b, a, ONE]).collect();
        let den = linalg::det_laplace(&den);
        let probe = pt(&cv, c(0.9, 0.2), 1);
        let lhs = r.eval(probe.0, probe.1);
        assert!((lhs - num(probe.0, probe.1) / den).norm() < 1e-12 * (1.0 + lhs.norm()));
        for &(x, y) in &pts {
            assert!(r.eval(x, y).norm() < 1e-13);
        }
        let z = zero_divisor(&cv, &r).unwrap();
        assert_eq!(z.degree(), 6);
        let (_, worst) = match_points(&pts, &z.coords()).unwrap();
        assert!(worst < 1e-10);
    }

    #[test]
    fn confluent_rows() {
        let cv = CurveModel::with_lambda(3, 4, &[(5, c(0.4, 0.0)), (9, c(-0.2, 0.1))]).unwrap();
        let p = pt(&cv, c(0.35, -0.2), 1);
        let q = pt(&cv, c(-0.6, 0.5), 2);
        let d = Divisor::new(&cv, &[p, p, q]).unwrap();
        let r = interpolate(&cv, 6, &d).unwrap();
        let ys = cv.branch_series(p.0, p.1, 2).unwrap();
        let s = r.eval_series(p.0, &ys);
        assert!(s.0[0].norm() < 1e-12 && s.0[1].norm() < 1e-12);
        let z = zero_divisor(&cv, &r).unwrap();
        let (_, worst) = match_points(&d.coords(), &z.coords()).unwrap();
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn full_fiber_is_not_reduced() {
        let cv = CurveModel::with_lambda(2, 5, &[(4, c(0.3, 0.0))]).unwrap();
        let x = c(0.2, 0.5);
        assert!(Divisor::new(&cv, &[pt(&cv, x, 0), pt(&cv, x, 1)]).is_err());
        assert!(Divisor::new(&cv, &[pt(&cv, x, 0), pt(&cv, x, 0)]).is_ok());
    }

    #[test]
    fn resultant_degree_equals_weight() {
        let cv = CurveModel::with_lambda(3, 4, &[(2, c(0.2, 0.0)), (8, c(0.5, -0.1))]).unwrap();
        for w in 6..=10 {
            let pts: Vec<(C64, C64)> = (0..(w - 3))
                .map(|k| pt(&cv, c(0.2 * k as f64 - 0.4, 0.3 - 0.1 * k as f64), k as usize))
                .collect();
            let d = Divisor::new(&cv, &pts).unwrap();
            let r = interpolate(&cv, w, &d).unwrap();
            let res = y_resultant(&cv, &r);
            assert_eq!(res.numerical_degree(1e-13), Some(w as usize));
            assert!((res.coeff(w as usize).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn json_formats() {
        let cv = CurveModel::pham(2, 5).unwrap();
        let p = pt(&cv, c(0.5, 0.0), 0);
        let d = Divisor::new(&cv, &[p]).unwrap();
        let s = serde_json::to_string(&d.to_json()).unwrap();
        let back = Divisor::from_json(&cv, &serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.coords(), d.coords());
        let r = reduce(&cv, &Bivariate::new().term(1, 1, ONE).term(0, 0, c(2.0, -1.0)));
        let j = serde_json::to_string(&r.to_json()).unwrap();
        assert_eq!(j, r#"{"coeffs":{"0,0":[2.0,-1.0],"1,1":[1.0,0.0]}}"#);
        let back = PolyFunction::from_json(&cv, &serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<DivisorJson>(r#"{"points":[[1,2,3]]}"#).is_err());
    }
}
