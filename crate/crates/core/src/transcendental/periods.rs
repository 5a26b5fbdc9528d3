//! Branch points and period matrices of hyperelliptic curves.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveModel, C64};
use crate::error::{Error, Result};
use crate::numeric::linalg::{inverse, max_abs};
use crate::numeric::quad::gauss_chebyshev;
use crate::numeric::{CMatrix, Poly};

const I: C64 = Complex64::new(0.0, 1.0);

fn require_hyperelliptic(curve: &CurveModel) -> Result<()> {
    if curve.is_hyperelliptic() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "the analytic side needs a hyperelliptic curve, got ({},{})",
            curve.n, curve.s
        )))
    }
}

/// `P(x)` with `y² = P(x)`.
pub fn branch_polynomial(curve: &CurveModel) -> Result<Poly> {
    require_hyperelliptic(curve)?;
    Ok(curve.y_coefficients()[0].clone())
}

/// Finite branch points, the roots of `P`, ordered by `(Re, Im)`.
pub fn branch_points(curve: &CurveModel) -> Result<Vec<C64>> {
    let p = branch_polynomial(curve)?;
    let dp = p.derivative();
    let mut roots = p.roots()?;
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(*r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= p.eval(*r) / d;
        }
    }
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    for i in 0..roots.len() {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() < 1e-7 * scale {
                return Err(Error::DegenerateCurve(format!(
                    "repeated branch point near {:.6}",
                    roots[i]
                )));
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// First- and second-kind period matrices.
#[derive(Debug, Clone)]
pub struct PeriodData {
    pub genus: usize,
    pub omega: CMatrix,
    pub omega_p: CMatrix,
    pub eta: CMatrix,
    pub eta_p: CMatrix,
    pub tau: CMatrix,
    pub kappa: CMatrix,
    pub omega_inv: CMatrix,
    pub legendre_residual: f64,
    pub branch_points: Vec<C64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodJson {
    pub genus: usize,
    pub branch_points: Vec<[f64; 2]>,
    pub omega: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "omegaP")]
    pub omega_p: Vec<Vec<[f64; 2]>>,
    pub eta: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "etaP")]
    pub eta_p: Vec<Vec<[f64; 2]>>,
    pub tau: Vec<Vec<[f64; 2]>>,
    pub kappa: Vec<Vec<[f64; 2]>>,
    pub legendre_residual: f64,
}

pub fn matrix_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl PeriodData {
    pub fn to_json(&self) -> PeriodJson {
        PeriodJson {
            genus: self.genus,
            branch_points: self.branch_points.iter().map(|e| [e.re, e.im]).collect(),
            omega: matrix_json(&self.omega),
            omega_p: matrix_json(&self.omega_p),
            eta: matrix_json(&self.eta),
            eta_p: matrix_json(&self.eta_p),
            tau: matrix_json(&self.tau),
            kappa: matrix_json(&self.kappa),
            legendre_residual: self.legendre_residual,
        }
    }

    /// The 2g×2g matrix `[[ω, ω′], [η, η′]]`.
    pub fn big_omega(&self) -> CMatrix {
        let g = self.genus;
        let mut m = CMatrix::zeros(2 * g, 2 * g);
        m.view_mut((0, 0), (g, g)).copy_from(&self.omega);
        m.view_mut((0, g), (g, g)).copy_from(&self.omega_p);
        m.view_mut((g, 0), (g, g)).copy_from(&self.eta);
        m.view_mut((g, g), (g, g)).copy_from(&self.eta_p);
        m
    }

    pub fn tau_asymmetry(&self) -> f64 {
        max_abs(&(&self.tau - self.tau.transpose()))
    }

    pub fn kappa_asymmetry(&self) -> f64 {
        max_abs(&(&self.kappa - self.kappa.transpose())) / max_abs(&self.kappa).max(1.0)
    }

    /// Smallest eigenvalue of `Im τ` (symmetrized).
    pub fn im_tau_min_eigenvalue(&self) -> f64 {
        let y = im_part(&self.tau);
        let ys = (&y + y.transpose()) * 0.5;
        ys.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `ω m + ω′ m′`.
    pub fn lattice_vector(&self, m: &[f64], mp: &[f64]) -> Vec<C64> {
        (0..self.genus)
            .map(|i| {
                (0..self.genus)
                    .map(|j| self.omega[(i, j)] * m[j] + self.omega_p[(i, j)] * mp[j])
                    .sum()
            })
            .collect()
    }

    /// Representative of `u` modulo the period lattice, chosen so that
    /// `ω⁻¹u = a + τb` with `a, b` in `[-½, ½]`.
    pub fn reduce(&self, u: &[C64]) -> Vec<C64> {
        let (_, m, mp) = self.lattice_coordinates(u);
        let shift = self.lattice_vector(&m, &mp);
        u.iter().zip(&shift).map(|(a, b)| a - b).collect()
    }

    /// Real coordinates `(a, b)` of `ω⁻¹u = a + τ b`, with their nearest integers.
    pub fn lattice_coordinates(&self, u: &[C64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let g = self.genus;
        let v = &self.omega_inv * crate::numeric::CVector::from_column_slice(u);
        let y = im_part(&self.tau);
        let yinv = y.try_inverse().unwrap_or_else(|| nalgebra::DMatrix::identity(g, g));
        let im: nalgebra::DVector<f64> = v.map(|c| c.im);
        let b = &yinv * im;
        let re_tau = self.tau.map(|c| c.re);
        let a = v.map(|c| c.re) - &re_tau * &b;
        let mp: Vec<f64> = b.iter().map(|x| x.round()).collect();
        let m: Vec<f64> = a.iter().map(|x| x.round()).collect();
        let mut coords: Vec<f64> = a.iter().copied().collect();
        coords.extend(b.iter().copied());
        (coords, m, mp)
    }

    /// Distance of `u` from the period lattice, measured in the normalized
    /// coordinates `(a, b)`.
    pub fn lattice_distance(&self, u: &[C64]) -> f64 {
        let (coords, m, mp) = self.lattice_coordinates(u);
        let g = self.genus;
        (0..g)
            .map(|i| (coords[i] - m[i]).abs().max((coords[g + i] - mp[i]).abs()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn im_part(m: &CMatrix) -> nalgebra::DMatrix<f64> {
    m.map(|c| c.im)
}

/// `Π sqrt(x - e)` over the branch points off a segment, continued along the
/// segment from `a` to `b`. Each factor is rotated so that its principal
/// branch is continuous on the whole segment.
struct OffSegmentRoot {
    factors: Vec<(C64, C64, C64)>,
}

impl OffSegmentRoot {
    fn new(a: C64, b: C64, others: &[C64]) -> Self {
        let mid = (a + b) * 0.5;
        let factors = others
            .iter()
            .map(|&e| {
                let d = mid - e;
                let c = d.conj() / d.norm();
                (e, c, c.sqrt())
            })
            .collect();
        OffSegmentRoot { factors }
    }

    fn eval(&self, x: C64) -> C64 {
        self.factors
            .iter()
            .map(|&(e, c, sc)| ((x - e) * c).sqrt() / sc)
            .product()
    }
}

/// `∫ N_k(x) dx / (-2y)` over the segment `[a, b]` on one sheet, for each
/// numerator in `nums`. The endpoints are simple branch points; the inverse
/// square-root singularities are absorbed by the Chebyshev weight.
fn segment_integrals(a: C64, b: C64, others: &[C64], nums: &[Poly]) -> Result<Vec<C64>> {
    let mid = (a + b) * 0.5;
    let h = (b - a) * 0.5;
    let root = OffSegmentRoot::new(a, b, others);
    let rule = |n: usize| -> Vec<C64> {
        let w = PI / n as f64;
        let mut acc = vec![C64::new(0.0, 0.0); nums.len()];
        for t in gauss_chebyshev(n) {
            let x = mid + h * t;
            let s = root.eval(x);
            let den = -2.0 * I * s;
            for (k, p) in nums.iter().enumerate() {
                acc[k] += p.eval(x) / den * w;
            }
        }
        acc
    };
    let mut n = 32;
    let mut prev = rule(n);
    loop {
        n *= 2;
        let cur = rule(n);
        let scale = cur.iter().map(|c| c.norm()).fold(1e-300, f64::max);
        let diff = cur
            .iter()
            .zip(&prev)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if diff <= 1e-14 * scale {
            return Ok(cur);
        }
        if n >= 1 << 17 {
            return Err(Error::Precision {
                achieved: diff / scale,
                context: format!("period integral over [{a:.4}, {b:.4}]"),
            });
        }
        prev = cur;
    }
}

/// Numerators of `du_i` and `dr_i` as polynomials in `x` (the denominator is
/// `∂_y f = -2y`).
fn differential_polys(curve: &CurveModel) -> (Vec<Poly>, Vec<Poly>) {
    let nums = curve.differential_numerators();
    let to_poly = |b: &crate::curve::Bivariate| {
        let deg = b.0.keys().map(|k| k.0 as usize).max().unwrap_or(0);
        let mut c = vec![C64::new(0.0, 0.0); deg + 1];
        for (&(i, _), &v) in &b.0 {
            c[i as usize] += v;
        }
        Poly(c)
    };
    let du = nums.upsilon.iter().map(to_poly).collect();
    let dr = nums.rho.expect("hyperelliptic curves have second-kind numerators").iter().map(to_poly).collect();
    (du, dr)
}

/// Periods of `du` and `dr` along the chain of loops `c_k` around the
/// segments `[e_k, e_{k+1}]`; columns are cycles.
fn chain_periods(curve: &CurveModel, e: &[C64]) -> Result<(CMatrix, CMatrix)> {
    let g = curve.genus;
    let (du, dr) = differential_polys(curve);
    let mut nums = du;
    nums.extend(dr);
    let mut u = CMatrix::zeros(g, 2 * g);
    let mut r = CMatrix::zeros(g, 2 * g);
    for k in 0..2 * g {
        let others: Vec<C64> = e
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k && j != k + 1)
            .map(|(_, &x)| x)
            .collect();
        let ints = segment_integrals(e[k], e[k + 1], &others, &nums)?;
        for i in 0..g {
            u[(i, k)] = ints[i] * 2.0;
            r[(i, k)] = ints[g + i] * 2.0;
        }
    }
    Ok((u, r))
}

/// `(Σ_i R_ix U_iy − U_ix R_iy) / 2πi`: the intersection numbers of the
/// cycles, up to quadrature error.
fn pairing(u: &CMatrix, r: &CMatrix) -> CMatrix {
    let m = u.ncols();
    let mut out = CMatrix::zeros(m, m);
    for x in 0..m {
        for y in 0..m {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..u.nrows() {
                s += r[(i, x)] * u[(i, y)] - u[(i, x)] * r[(i, y)];
            }
            out[(x, y)] = s / (2.0 * PI * I);
        }
    }
    out
}

/// Integer change of basis from the chain to `a_j = c_{2j-1}` and nested
/// `b_j = Σ_{k>=j} s_{jk} c_{2k}`, normalized so that the pairing is `J`.
fn nested_basis(n: &[Vec<i64>], g: usize) -> Result<Vec<Vec<i64>>> {
    let c = |x: usize, y: usize| n[x][y];
    let mut cols = Vec::with_capacity(2 * g);
    for j in 0..g {
        let mut v = vec![0i64; 2 * g];
        v[2 * j] = 1;
        cols.push(v);
    }
    for m in 0..g {
        let mut v = vec![0i64; 2 * g];
        let p = c(2 * m, 2 * m + 1);
        if p.abs() != 1 {
            return Err(Error::Numeric(format!("chain pairing {p} at position {m}")));
        }
        let mut s = -p;
        v[2 * m + 1] = s;
        for j in m + 1..g {
            let q = c(2 * j, 2 * j + 1);
            if q.abs() != 1 {
                return Err(Error::Numeric(format!("chain pairing {q} at position {j}")));
            }
            s = -s * c(2 * j, 2 * j - 1) * q;
            v[2 * j + 1] = s;
        }
        cols.push(v);
    }
    Ok(cols)
}

/// Period matrices over the canonical basis built from the ordered branch
/// points.
pub fn period_matrices(curve: &CurveModel) -> Result<PeriodData> {
    let g = curve.genus;
    let e = branch_points(curve)?;
    let (u, r) = chain_periods(curve, &e)?;
    let nf = pairing(&u, &r);
    let n: Vec<Vec<i64>> = (0..2 * g)
        .map(|x| (0..2 * g).map(|y| nf[(x, y)].re.round() as i64).collect())
        .collect();
    let snap = (0..2 * g)
        .flat_map(|x| (0..2 * g).map(move |y| (x, y)))
        .map(|(x, y)| (nf[(x, y)] - C64::new(n[x][y] as f64, 0.0)).norm())
        .fold(0.0, f64::max);
    if snap > 1e-4 {
        return Err(Error::Precision {
            achieved: snap,
            context: "intersection numbers of the chain cycles are not integral".into(),
        });
    }
    let cols = nested_basis(&n, g)?;
    let change = CMatrix::from_fn(2 * g, 2 * g, |x, y| C64::new(cols[y][x] as f64, 0.0));
    let ub = &u * &change;
    let rb = &r * &change;
    let omega = ub.columns(0, g).into_owned();
    let omega_p = ub.columns(g, g).into_owned();
    let eta = rb.columns(0, g).into_owned();
    let eta_p = rb.columns(g, g).into_owned();
    let omega_inv = inverse(&omega, 1e-12)?;
    let tau = &omega_inv * &omega_p;
    let kappa = &eta * &omega_inv;
    let mut pd = PeriodData {
        genus: g,
        omega,
        omega_p,
        eta,
        eta_p,
        tau,
        kappa,
        omega_inv,
        legendre_residual: 0.0,
        branch_points: e,
    };
    pd.legendre_residual = legendre_residual(&pd);
    Ok(pd)
}

/// `‖ΩᵗJΩ − 2πiJ‖_max` with `J = [[0, −1], [1, 0]]`.
pub fn legendre_residual(pd: &PeriodData) -> f64 {
    let g = pd.genus;
    let om = pd.big_omega();
    let mut j = CMatrix::zeros(2 * g, 2 * g);
    for k in 0..g {
        j[(k, g + k)] = C64::new(-1.0, 0.0);
        j[(g + k, k)] = C64::new(1.0, 0.0);
    }
    let lhs = om.transpose() * &j * &om;
    max_abs(&(lhs - j * (2.0 * PI * I)))
}
