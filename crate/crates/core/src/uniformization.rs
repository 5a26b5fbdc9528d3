//! Jacobi inversion: reduced degree-g divisors and basis ℘-values, in both
//! directions, plus derivatives of divisor functionals along `u`.
//!
//! With `υ_w` the basis monomials (one per gap `w`), a point `u` off the theta
//! divisor is encoded by the two polynomial functions
//!
//! ```text
//! R_lo = m_(2g)       - Σ p_(w+1) υ_w        p_(w+1) = ℘_(1,w)
//! R_hi = 2 m_(2g+1)   + Σ q_(w+2) υ_w
//! ```
//!
//! whose common zeros form `D = A⁻¹(u)`. For hyperelliptic curves
//! `q_(w+2) = ℘_(1,1,w)`; for trigonal curves `q_(w+2) = ℘_(1,1,w) - ℘_(2,w)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curve::{CurveModel, Family, Monomial, C64, ONE, ZERO};
use crate::divisor::{interpolate, interpolate_with, y_resultant, zero_divisor, Divisor, PolyFunction};
use crate::error::{Error, Result};
use crate::numeric::linalg::{self, CMatrix, CVector};
use crate::numeric::quad::gauss_legendre;

/// Values of the basis ℘-functions at one point of the Jacobian.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BasisRecord {
    /// gap `w` -> `℘_(1,w)`
    pub p: BTreeMap<u32, C64>,
    /// gap `w` -> `℘_(1,1,w)` (minus `℘_(2,w)` for trigonal curves)
    pub q: BTreeMap<u32, C64>,
    /// further ℘ values keyed by their index list, e.g. `[2, 2]`
    pub extended: BTreeMap<Vec<u32>, C64>,
}

impl BasisRecord {
    pub fn p(&self, w: u32) -> Result<C64> {
        self.p
            .get(&w)
            .copied()
            .ok_or_else(|| Error::IncompleteRecord(format!("p for gap {w}")))
    }

    pub fn q(&self, w: u32) -> Result<C64> {
        self.q
            .get(&w)
            .copied()
            .ok_or_else(|| Error::IncompleteRecord(format!("q for gap {w}")))
    }

    pub fn ext(&self, idx: &[u32]) -> Result<C64> {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.extended
            .get(&key)
            .copied()
            .ok_or_else(|| Error::IncompleteRecord(format!("℘ with indices {key:?}")))
    }

    pub fn set_ext(&mut self, idx: &[u32], v: C64) {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.extended.insert(key, v);
    }

    /// Record at `-u`. ℘ with an even number of indices is even and odd
    /// otherwise. For hyperelliptic curves every `q` is a 3-index ℘ and
    /// flips sign; for (3,4), `q₃ = ℘₁₁₁ - ℘₁₂`, `q₄ = ℘₁₁₂ - ℘₂₂`,
    /// `q₇ = ℘₁₁₅ - ℘₂₅` map to `-q - 2(even part)`. Other curves go through
    /// the divisor and its inverse.
    pub fn negated(&self, curve: &CurveModel) -> Result<BasisRecord> {
        let extended = self
            .extended
            .iter()
            .map(|(k, &v)| (k.clone(), if k.len() % 2 == 0 { v } else { -v }))
            .collect();
        if curve.is_hyperelliptic() {
            return Ok(BasisRecord {
                p: self.p.clone(),
                q: self.q.iter().map(|(&w, &v)| (w, -v)).collect(),
                extended,
            });
        }
        if (curve.n, curve.s) == (3, 4) {
            let e = extended_34(curve, self)?;
            let even = [(1, self.p(2)?), (2, e.ext(&[2, 2])?), (5, e.ext(&[2, 5])?)];
            let mut q = BTreeMap::new();
            for (w, v) in even {
                q.insert(w, -self.q(w)? - 2.0 * v);
            }
            return Ok(BasisRecord {
                p: self.p.clone(),
                q,
                extended,
            });
        }
        let d = basis_to_divisor(curve, self)?;
        let mut out = divisor_to_basis(curve, &crate::addition::negate(curve, &d)?)?;
        out.extended = extended;
        Ok(out)
    }

    pub fn check_complete(&self, curve: &CurveModel) -> Result<()> {
        for &w in &curve.gaps {
            self.p(w)?;
            self.q(w)?;
        }
        if self.p.len() != curve.genus || self.q.len() != curve.genus {
            return Err(Error::InvalidInput(
                "record keys must be exactly the gaps of the curve".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> BasisJson {
        let conv = |m: &BTreeMap<u32, C64>| m.iter().map(|(k, v)| (k.to_string(), [v.re, v.im])).collect();
        BasisJson {
            p: conv(&self.p),
            q: conv(&self.q),
            extended: self
                .extended
                .iter()
                .map(|(k, v)| {
                    let key: Vec<String> = k.iter().map(|i| i.to_string()).collect();
                    (key.join(","), [v.re, v.im])
                })
                .collect(),
        }
    }

    pub fn from_json(j: &BasisJson) -> Result<Self> {
        let bad = |k: &str| Error::InvalidInput(format!("bad record key {k:?}"));
        let conv = |m: &BTreeMap<String, [f64; 2]>| -> Result<BTreeMap<u32, C64>> {
            m.iter()
                .map(|(k, v)| Ok((k.trim().parse().map_err(|_| bad(k))?, C64::new(v[0], v[1]))))
                .collect()
        };
        let mut extended = BTreeMap::new();
        for (k, v) in &j.extended {
            let mut idx = k
                .split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| bad(k)))
                .collect::<Result<Vec<_>>>()?;
            idx.sort_unstable();
            extended.insert(idx, C64::new(v[0], v[1]));
        }
        Ok(BasisRecord {
            p: conv(&j.p)?,
            q: conv(&j.q)?,
            extended,
        })
    }
}

/// `{"p":{"1":[re,im],...},"q":{...},"extended":{"2,2":[re,im],...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisJson {
    pub p: BTreeMap<String, [f64; 2]>,
    pub q: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    pub extended: BTreeMap<String, [f64; 2]>,
}

/// The pair of polynomial functions whose common zeros invert the Abel map.
#[derive(Debug, Clone)]
pub struct SolutionSystem {
    pub r_lo: PolyFunction,
    pub r_hi: PolyFunction,
    pub family: Family,
}

/// `(υ_w for w in gaps, m_(2g), m_(2g+1))`.
fn templates(curve: &CurveModel) -> (Vec<Monomial>, Monomial, Monomial) {
    let g = curve.genus as u32;
    (
        curve.basis_monomials(),
        curve.monomial_of_weight(2 * g).expect("2g is a non-gap"),
        curve.monomial_of_weight(2 * g + 1).expect("2g+1 is a non-gap"),
    )
}

/// Builds `R_lo`, `R_hi` from a record.
pub fn solution_system(curve: &CurveModel, rec: &BasisRecord) -> Result<SolutionSystem> {
    rec.check_complete(curve)?;
    let (ups, lo, hi) = templates(curve);
    let mut c_lo = BTreeMap::from([(lo, ONE)]);
    let mut c_hi = BTreeMap::from([(hi, C64::new(2.0, 0.0))]);
    for (m, &w) in ups.iter().zip(&curve.gaps) {
        c_lo.insert(*m, -rec.p(w)?);
        c_hi.insert(*m, rec.q(w)?);
    }
    Ok(SolutionSystem {
        r_lo: PolyFunction::from_coeffs(c_lo),
        r_hi: PolyFunction::from_coeffs(c_hi),
        family: curve.family,
    })
}

/// Reads the basis ℘-values off the interpolating polynomial functions.
pub fn divisor_to_basis(curve: &CurveModel, d: &Divisor) -> Result<BasisRecord> {
    let g = curve.genus;
    if d.degree() != g {
        return Err(Error::InvalidInput(format!("need a divisor of degree {g}, got {}", d.degree())));
    }
    let stratum = |e: Error| match e {
        Error::SpecialDivisor { weight, .. } => Error::SpecialDivisor {
            weight,
            hint: "σ vanishes at A(D); the divisor is special and cannot be inverted".into(),
        },
        other => other,
    };
    let (ups, _, hi) = templates(curve);
    let r_lo = interpolate(curve, 2 * g as u32, d).map_err(stratum)?;
    let r_hi = interpolate_with(curve, hi, C64::new(2.0, 0.0), &ups, d).map_err(stratum)?;
    let mut rec = BasisRecord::default();
    for (m, &w) in ups.iter().zip(&curve.gaps) {
        rec.p.insert(w, -r_lo.coeff(m));
        rec.q.insert(w, r_hi.coeff(m));
    }
    Ok(rec)
}

/// Relative tolerance for accepting a candidate point as a zero of `R_hi`.
pub const SELECTION_TOL: f64 = 1e-6;

/// Common zeros of `R_lo`, `R_hi` and `f`.
pub fn basis_to_divisor(curve: &CurveModel, rec: &BasisRecord) -> Result<Divisor> {
    let sys = solution_system(curve, rec)?;
    let g = curve.genus;
    if curve.is_hyperelliptic() {
        let xs = sys.r_lo.y_coefficient(0).roots()?;
        let mut pts = Vec::with_capacity(g);
        for x in xs {
            // R_hi = 2y + Q(x)
            let y = -0.5 * sys.r_hi.y_coefficient(0).eval(x);
            let res = curve.eval_f(x, y).norm();
            if res > 1e4 * curve.on_curve_tolerance(x, y) {
                return Err(Error::InconsistentRecord(format!(
                    "recovered point ({x}, {y}) is off the curve (|f| = {res:e})"
                )));
            }
            pts.push((x, y));
        }
        return Ok(Divisor::from_points_unchecked(curve, &pts));
    }
    let cand = zero_divisor(curve, &sys.r_lo)?;
    let mut scored: Vec<(f64, (C64, C64))> = cand
        .coords()
        .into_iter()
        .map(|(x, y)| {
            let s = sys.r_hi.term_scale(x, y).max(1e-300);
            (sys.r_hi.eval(x, y).norm() / s, (x, y))
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    if scored.len() < g || scored[g - 1].0 > SELECTION_TOL {
        return Err(Error::InconsistentRecord(format!(
            "R_lo and R_hi share fewer than {g} zeros (worst selected residual {:e})",
            scored.get(g - 1).map_or(f64::INFINITY, |s| s.0)
        )));
    }
    if scored.len() > g && scored[g].0 <= SELECTION_TOL {
        return Err(Error::AmbiguousSelection(format!(
            "{} candidates satisfy R_hi within tolerance",
            scored.iter().filter(|s| s.0 <= SELECTION_TOL).count()
        )));
    }
    let pts: Vec<(C64, C64)> = scored[..g].iter().map(|s| s.1).collect();
    Ok(Divisor::from_points_unchecked(curve, &pts))
}

/// `M[i][k] = υ_(w_i)(P_k) / ∂_y f(P_k) = ∂u_(w_i)/∂x_k` and its inverse.
pub fn abel_jacobian(curve: &CurveModel, d: &Divisor) -> Result<(CMatrix, CMatrix)> {
    let g = curve.genus;
    let ups = curve.basis_monomials();
    let mut m = CMatrix::zeros(g, d.degree());
    for (k, p) in d.points.iter().enumerate() {
        let fy = curve.df_dy(p.x, p.y);
        let scale = 1.0 + p.y.norm().powi(curve.n as i32 - 1) + curve.df_dx(p.x, p.y).norm();
        if fy.norm() <= 1e-12 * scale {
            return Err(Error::SingularJacobian(format!("({}, {}) is a branch point", p.x, p.y)));
        }
        for (i, u) in ups.iter().enumerate() {
            m[(i, k)] = u.eval(p.x, p.y) / fy;
        }
    }
    if d.degree() != g {
        return Err(Error::InvalidInput(format!("need a divisor of degree {g}")));
    }
    let inv = linalg::inverse(&m, 1e-12)
        .map_err(|_| Error::SingularJacobian("the divisor is special or has repeated points".into()))?;
    Ok((m, inv))
}

/// Moves point `k` of `D` to abscissa `x_k + δ`, following its branch.
fn shift_point(curve: &CurveModel, d: &Divisor, k: usize, delta: C64) -> Result<Divisor> {
    let p = d.points[k];
    let ys = curve.branch_series(p.x, p.y, 6)?;
    let x = p.x + delta;
    let y = curve.refine_y(x, ys.eval(delta));
    let mut out = d.clone();
    out.points[k] = curve.point_unchecked(x, y);
    Ok(out)
}

/// Derivatives of a vector of divisor functionals along every `u_(w_j)`:
/// `out[m][j] = ∂F_m/∂u_(w_j)`, by central differences in the point
/// abscissae with one Richardson step and the chain rule through the inverse
/// Abel Jacobian.
pub fn jacobian_along_u<F>(curve: &CurveModel, d: &Divisor, f: F) -> Result<Vec<Vec<C64>>>
where
    F: Fn(&Divisor) -> Result<Vec<C64>>,
{
    let (_, minv) = abel_jacobian(curve, d)?;
    let g = curve.genus;
    let base = f(d)?;
    let nf = base.len();
    let fscale = base.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut dfdx = vec![vec![ZERO; g]; nf];
    for k in 0..g {
        let h = 1e-5 * (1.0 + d.points[k].x.norm());
        let central = |h: f64| -> Result<Vec<C64>> {
            let hp = f(&shift_point(curve, d, k, C64::new(h, 0.0))?)?;
            let hm = f(&shift_point(curve, d, k, C64::new(-h, 0.0))?)?;
            Ok(hp.iter().zip(&hm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let d1 = central(h)?;
        let d2 = central(h / 2.0)?;
        for m in 0..nf {
            let rich = (d2[m] * 4.0 - d1[m]) / 3.0;
            let err = (d2[m] - d1[m]).norm();
            if !rich.is_finite() || err > 1e-3 * (rich.norm() + fscale) {
                return Err(Error::Derivative(format!(
                    "difference quotients disagree by {err:e} at point {k}"
                )));
            }
            dfdx[m][k] = rich;
        }
    }
    Ok((0..nf)
        .map(|m| {
            (0..g)
                .map(|j| (0..g).map(|k| dfdx[m][k] * minv[(k, j)]).sum())
                .collect()
        })
        .collect())
}

/// `∂F/∂u_(w_j)` for a scalar divisor functional; `j` indexes the gaps.
pub fn d_along_u<F>(curve: &CurveModel, d: &Divisor, j: usize, f: F) -> Result<C64>
where
    F: Fn(&Divisor) -> Result<C64>,
{
    if j >= curve.genus {
        return Err(Error::InvalidInput(format!("direction index {j} out of range")));
    }
    let jac = jacobian_along_u(curve, d, |dd| Ok(vec![f(dd)?]))?;
    Ok(jac[0][j])
}

/// Abscissae where two sheets meet: roots of the discriminant `Res_y(f, f_y)`.
pub fn branch_abscissae(curve: &CurveModel) -> Result<Vec<C64>> {
    let mut fy = BTreeMap::new();
    fy.insert(curve.monomial(0, curve.n - 1), -C64::new(curve.n as f64, 0.0));
    for (i, j, w) in curve.parameter_terms() {
        let l = curve.lambda(w as i64);
        if l != ZERO && j > 0 {
            *fy.entry(curve.monomial(i, j - 1)).or_insert(ZERO) += l * j as f64;
        }
    }
    let fy = PolyFunction::from_coeffs(fy);
    let disc = y_resultant(curve, &fy);
    match disc.numerical_degree(1e-13) {
        None | Some(0) => Ok(Vec::new()),
        Some(deg) => crate::numeric::Poly(disc.0[..=deg].to_vec()).roots(),
    }
}

/// Divisor near `D0` whose Abel image is `A(D0) + du`, found by Newton's
/// method on the integrals of the first-kind differentials along straight
/// segments. Points stay on the branches through the points of `D0`, which
/// requires every displacement to stay inside the branch's disk of
/// convergence.
pub fn local_inverse(curve: &CurveModel, d0: &Divisor, du: &[C64]) -> Result<Divisor> {
    let g = curve.genus;
    let ups = curve.basis_monomials();
    let (gl_x, gl_w) = gauss_legendre(24);
    let branches = d0
        .points
        .iter()
        .map(|p| curve.branch_series(p.x, p.y, 24))
        .collect::<Result<Vec<_>>>()?;
    let point_at = |k: usize, x: C64| -> (C64, C64) {
        let p = d0.points[k];
        (x, curve.refine_y(x, branches[k].eval(x - p.x)))
    };
    let integral = |k: usize, x1: C64| -> Vec<C64> {
        let x0 = d0.points[k].x;
        let half = (x1 - x0) * 0.5;
        let mid = (x1 + x0) * 0.5;
        let mut acc = vec![ZERO; g];
        for (t, w) in gl_x.iter().zip(&gl_w) {
            let (x, y) = point_at(k, mid + half * *t);
            let fy = curve.df_dy(x, y);
            for (i, u) in ups.iter().enumerate() {
                acc[i] += u.eval(x, y) / fy * half * *w;
            }
        }
        acc
    };
    let target = CVector::from_column_slice(du);
    let (_, minv0) = abel_jacobian(curve, d0)?;
    let mut xs: Vec<C64> = d0.points.iter().map(|p| p.x).collect();
    let step0 = &minv0 * &target;
    for k in 0..g {
        xs[k] += step0[k];
    }
    let scale = 1.0 + target.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for _ in 0..30 {
        let cur: Vec<(C64, C64)> = (0..g).map(|k| point_at(k, xs[k])).collect();
        let mut r = target.clone();
        for (k, &(x, _)) in cur.iter().enumerate() {
            for (i, v) in integral(k, x).into_iter().enumerate() {
                r[i] -= v;
            }
        }
        let dd = Divisor::from_points_unchecked(curve, &cur);
        let (_, minv) = abel_jacobian(curve, &dd)?;
        let step = &minv * &r;
        for k in 0..g {
            xs[k] += step[k];
        }
        let rn = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if rn < 1e-15 * scale {
            break;
        }
    }
    let pts: Vec<(C64, C64)> = (0..g).map(|k| point_at(k, xs[k])).collect();
    Ok(Divisor::from_points_unchecked(curve, &pts))
}

/// Largest step `t` such that moving `A(D)` by `t·dir` keeps every point
/// well inside the convergence disk of its branch.
pub fn safe_radius(curve: &CurveModel, d: &Divisor, dir: &[C64]) -> Result<f64> {
    let (_, minv) = abel_jacobian(curve, d)?;
    let v = &minv * CVector::from_column_slice(dir);
    let branch = branch_abscissae(curve)?;
    let mut r = f64::INFINITY;
    for (k, p) in d.points.iter().enumerate() {
        let mut dist = branch
            .iter()
            .map(|b| (b - p.x).norm())
            .fold(f64::INFINITY, f64::min);
        for (j, q) in d.points.iter().enumerate() {
            if j != k {
                dist = dist.min((q.x - p.x).norm());
            }
        }
        if v[k].norm() > 0.0 {
            r = r.min(dist / v[k].norm());
        }
    }
    Ok(r)
}

/// Taylor coefficients `c_0..c_order` of `t -> F_m(A⁻¹(A(D) + t·dir))` by
/// Cauchy integrals over `|t| = radius` with `nodes` equispaced samples.
pub fn taylor_along_u<F>(
    curve: &CurveModel,
    d: &Divisor,
    dir: &[C64],
    f: F,
    order: usize,
    radius: f64,
    nodes: usize,
) -> Result<Vec<Vec<C64>>>
where
    F: Fn(&Divisor) -> Result<Vec<C64>>,
{
    let mut samples = Vec::with_capacity(nodes);
    for m in 0..nodes {
        let t = C64::from_polar(radius, 2.0 * std::f64::consts::PI * m as f64 / nodes as f64);
        let du: Vec<C64> = dir.iter().map(|c| c * t).collect();
        samples.push(f(&local_inverse(curve, d, &du)?)?);
    }
    let nf = samples[0].len();
    let mut out = vec![vec![ZERO; order + 1]; nf];
    for (fi, row) in out.iter_mut().enumerate() {
        for (k, c) in row.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (m, s) in samples.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * m) as f64 / nodes as f64;
                acc += s[fi] * C64::from_polar(1.0, ang);
            }
            *c = acc / (nodes as f64 * radius.powi(k as i32));
        }
    }
    Ok(out)
}

/// Polynomial in `x` whose coefficients are power series in `t`, indexed
/// `[x-degree][t-degree]`.
type SeriesPoly = Vec<Vec<C64>>;

fn series_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

fn spoly_mul(a: &SeriesPoly, b: &SeriesPoly, n: usize) -> SeriesPoly {
    let mut out = vec![vec![ZERO; n]; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            for (o, v) in out[i + j].iter_mut().zip(series_mul(ai, bj)) {
                *o += v;
            }
        }
    }
    out
}

/// Quotient and remainder by a monic `u` whose leading coefficient is exactly 1.
fn spoly_divrem(a: &SeriesPoly, u: &SeriesPoly) -> (SeriesPoly, SeriesPoly) {
    let g = u.len() - 1;
    let n = u[0].len();
    let mut rem = a.clone();
    if rem.len() <= g {
        rem.resize(g, vec![ZERO; n]);
        return (vec![vec![ZERO; n]], rem);
    }
    let mut quot = vec![vec![ZERO; n]; rem.len() - g];
    for d in (g..rem.len()).rev() {
        let c = rem[d].clone();
        for i in 0..=g {
            let prod = series_mul(&c, &u[i]);
            for (r, v) in rem[d - g + i].iter_mut().zip(prod) {
                *r -= v;
            }
        }
        quot[d - g] = c;
    }
    rem.truncate(g);
    (quot, rem)
}

/// Taylor coefficients of `p_w` and `q_w` along `t -> A(D) + t·dir` on a
/// hyperelliptic curve, gap by gap, to order `order`.
///
/// With `U = x^g - Σ p_w υ_w`, `V = -½ Σ q_w υ_w`, `W = (P - V²)/U` and the
/// direction `∂ = Σ a_w ∂_(u_w)`, the flow is
/// `∂U = 2 (hV mod U)`, `∂V = -(hW mod U)` with `h = Σ a_w [U / x^(m_w+1)]₊`,
/// where `υ_w = x^(m_w)`. The series are built coefficient by coefficient,
/// so no sampling radius is involved.
pub fn hyperelliptic_taylor(
    curve: &CurveModel,
    rec: &BasisRecord,
    dir: &[C64],
    order: usize,
) -> Result<(Vec<Vec<C64>>, Vec<Vec<C64>>)> {
    if !curve.is_hyperelliptic() {
        return Err(Error::Unsupported("the Mumford flow needs a hyperelliptic curve".into()));
    }
    let g = curve.genus;
    if dir.len() != g {
        return Err(Error::InvalidInput(format!("direction has {} entries, genus is {g}", dir.len())));
    }
    let n = order + 1;
    let powers: Vec<usize> = curve.basis_monomials().iter().map(|m| m.i as usize).collect();
    let big_p: SeriesPoly = crate::transcendental::periods::branch_polynomial(curve)?
        .0
        .iter()
        .map(|&c| {
            let mut s = vec![ZERO; n];
            s[0] = c;
            s
        })
        .collect();
    let mut u = vec![vec![ZERO; n]; g + 1];
    let mut v = vec![vec![ZERO; n]; g];
    u[g][0] = ONE;
    for (k, &w) in curve.gaps.iter().enumerate() {
        u[powers[k]][0] = -rec.p(w)?;
        v[powers[k]][0] = -0.5 * rec.q(w)?;
    }
    for k in 0..order {
        let mut h = vec![vec![ZERO; n]; g];
        for (a, &m) in dir.iter().zip(&powers) {
            for i in m + 1..=g {
                for (hs, us) in h[i - m - 1].iter_mut().zip(&u[i]) {
                    *hs += a * us;
                }
            }
        }
        let vv = spoly_mul(&v, &v, n);
        let mut rest = big_p.clone();
        for (r, s) in rest.iter_mut().zip(&vv) {
            for (a, b) in r.iter_mut().zip(s) {
                *a -= b;
            }
        }
        let (w, _) = spoly_divrem(&rest, &u);
        let (_, du) = spoly_divrem(&spoly_mul(&h, &v, n), &u);
        let (_, dv) = spoly_divrem(&spoly_mul(&h, &w, n), &u);
        let next = (k + 1) as f64;
        for i in 0..g {
            u[i][k + 1] = 2.0 * du[i][k] / next;
            v[i][k + 1] = -dv[i][k] / next;
        }
    }
    let p = powers.iter().map(|&m| u[m].iter().map(|c| -c).collect()).collect();
    let q = powers.iter().map(|&m| v[m].iter().map(|c| -2.0 * c).collect()).collect();
    Ok((p, q))
}

/// Completes a (3,4) record with `℘_(2,2)`, `℘_(2,5)` and the 4-index values
/// `℘_(1,1,1,1)`, `℘_(1,1,1,2)`, `℘_(1,1,1,5)`, and `℘_(5,5)`.
pub fn extended_34(curve: &CurveModel, rec: &BasisRecord) -> Result<BasisRecord> {
    if (curve.n, curve.s) != (3, 4) {
        return Err(Error::Unsupported("extended values are implemented for the (3,4) curve".into()));
    }
    let (p2, p3, p6) = (rec.p(1)?, rec.p(2)?, rec.p(5)?);
    let (q3, q4) = (rec.q(1)?, rec.q(2)?);
    if p2.norm() < 1e-14 * (1.0 + p3.norm() + p6.norm()) {
        return Err(Error::PoleOfRepresentation);
    }
    let l = |w: i64| curve.lambda(w);
    let (l2, l5, l6, l8) = (l(2), l(5), l(6), l(8));
    let inv = ONE / p2;
    let a = q3 * (q3 + p3 * 2.0) * 0.25 - p6;
    let w22 = -inv * a + p2 * (p2 + l2);
    let w25 = -0.5 * (q3 + p3) * q4 - 0.5 * p2 * (p2 + l2) * q3
        + p2 * (p2 * p3 + l5)
        + 0.5 * inv * a * (q3 + p3 * 2.0);
    let (w11, w12, w15) = (p2, p3, p6);
    let w112 = q4 + w22;
    let w1111 = w11 * (w11 * 6.0 + l2 * 4.0) - w22 * 3.0;
    let w1112 = w12 * (w11 * 6.0 + l2) + l5;
    let bracket = -w112 * w112 + w11 * (w12 * w12 + l6) * 4.0 + w22 * w22;
    let w1115 = w15 * (w11 * 6.0 + l2) + l8 + bracket * 0.75;
    let w55 = w55_formula(curve, w11, w12, w15, w22, w25, w112);
    let mut out = rec.clone();
    out.set_ext(&[2, 2], w22);
    out.set_ext(&[2, 5], w25);
    out.set_ext(&[1, 1, 1, 1], w1111);
    out.set_ext(&[1, 1, 1, 2], w1112);
    out.set_ext(&[1, 1, 1, 5], w1115);
    out.set_ext(&[5, 5], w55);
    Ok(out)
}

/// `℘_(5,5)` as a rational function of the other (3,4) values.
pub fn w55_formula(curve: &CurveModel, w11: C64, w12: C64, w15: C64, w22: C64, w25: C64, w112: C64) -> C64 {
    let l2 = curve.lambda(2);
    w55_displayed(curve, w11, w12, w15, w22, w25, w112) - 0.5 * l2 * l2 * w12 * w12
}

/// The printed form of the `℘_(5,5)` expression, which lacks the
/// `-½ λ₂² ℘₁₂²` term of `w55_formula`.
pub fn w55_displayed(curve: &CurveModel, w11: C64, w12: C64, w15: C64, w22: C64, w25: C64, w112: C64) -> C64 {
    let l = |w: i64| curve.lambda(w);
    let (l2, l5, l6, l8, l9, l12) = (l(2), l(5), l(6), l(8), l(9), l(12));
    let inv = ONE / w11;
    w112 * w112 * ((w11 + l2) * 0.5 - inv * w22 * 0.375)
        + w25 * (w12 * 2.0 + inv * (l2 * w12 + l5) * 0.5)
        - inv * w22.powu(3) * 0.125
        + w22 * 0.5 * (w12 * w12 - l6 + inv * (l2 * (w12 * w12 + w15) + l5 * w12 + l8))
        - (w11 + l2) * w11 * w12 * w12 * 2.0
        - l5 * w11 * w12 * 2.0
        - l2 * l5 * w12
        - l2 * l8 * (2.0 / 3.0)
        - l5 * l5 * 0.5
        + inv * (w12.powu(4) * 0.5 + w15 * w15 + w12 * w12 * w15 * 2.0 + l6 * (w12 * w12 * 0.5 + w15) + l9 * w12 * 0.5 + l12)
}
