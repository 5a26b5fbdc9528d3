//! Inverse and addition on the Jacobian at divisor level, and the explicit
//! (2,7) addition through the weight-9 function
//! `R₉ = yx + γ₁x⁴ + γ₂y + γ₃x³ + γ₅x² + γ₇x + γ₉`.

use crate::curve::{CurveModel, C64, ONE, ZERO};
use crate::divisor::{complement, interpolate, Divisor};
use crate::error::{Error, Result};
use crate::numeric::linalg::{self, CMatrix, CVector};
use crate::numeric::matching::multiset_distance;
use crate::numeric::Poly;
use crate::uniformization::BasisRecord;

const PAIR_TOL: f64 = 1e-9;

/// `D*` with `A(D*) = -A(D)`: the rest of the zero divisor of `R_(2g)`.
pub fn negate(curve: &CurveModel, d: &Divisor) -> Result<Divisor> {
    check_degree(curve, d)?;
    let r = interpolate(curve, 2 * curve.genus as u32, d)?;
    complement(curve, &r, d)
}

fn check_degree(curve: &CurveModel, d: &Divisor) -> Result<()> {
    if d.degree() != curve.genus {
        return Err(Error::InvalidInput(format!(
            "divisor has degree {}, expected {}",
            d.degree(),
            curve.genus
        )));
    }
    Ok(())
}

fn shared_involution_pair(curve: &CurveModel, a: &Divisor, b: &Divisor) -> bool {
    if !curve.is_hyperelliptic() {
        return false;
    }
    a.points.iter().any(|p| {
        b.points.iter().any(|q| {
            let s = 1.0 + p.x.norm();
            (p.x - q.x).norm() < PAIR_TOL * s && (p.y + q.y).norm() < 1e-6 * (1.0 + p.y.norm())
        })
    })
}

/// The third divisor `D̂` of `(R_(3g))_0 = D₁ + D₂ + D̂`, so that
/// `A(D̂) = -(A(D₁) + A(D₂))`.
pub fn add_complement(curve: &CurveModel, d1: &Divisor, d2: &Divisor) -> Result<Divisor> {
    check_degree(curve, d1)?;
    check_degree(curve, d2)?;
    if shared_involution_pair(curve, d1, d2) {
        return Err(Error::SpecialDivisor {
            weight: 3 * curve.genus as u32,
            hint: "the summands share an involution pair".into(),
        });
    }
    if let Ok(n1) = negate(curve, d1) {
        if multiset_distance(&n1.coords(), &d2.coords()) < 1e-8 {
            return Err(Error::IdentityDegeneration("the summands are mutually inverse".into()));
        }
    }
    let sum = d1.plus(d2);
    let r = interpolate(curve, 3 * curve.genus as u32, &sum)?;
    complement(curve, &r, &sum).map_err(|e| match e {
        Error::DegenerateComplement(m) => Error::IdentityDegeneration(m),
        e => e,
    })
}

/// Reduced divisor representing `A(D₁) + A(D₂)`.
pub fn add(curve: &CurveModel, d1: &Divisor, d2: &Divisor) -> Result<Divisor> {
    let hat = add_complement(curve, d1, d2)?;
    negate(curve, &hat).map_err(|e| match e {
        Error::DegenerateComplement(m) => Error::IdentityDegeneration(m),
        e => e,
    })
}

/// Coefficients of the (2,7) weight-9 function through `D + D̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCoeffs {
    pub g1: C64,
    pub g2: C64,
    pub g3: C64,
    pub g5: C64,
    pub g7: C64,
    pub g9: C64,
}

impl GammaCoeffs {
    /// `R₉⁻`, the function for `u -> -u`: odd-index coefficients flip.
    pub fn reflected(&self) -> GammaCoeffs {
        GammaCoeffs {
            g1: -self.g1,
            g2: self.g2,
            g3: -self.g3,
            g5: -self.g5,
            g7: -self.g7,
            g9: -self.g9,
        }
    }

    /// `γ₁x⁴ + γ₃x³ + γ₅x² + γ₇x + γ₉`, the `y`-free part of `R₉`.
    pub fn x_part(&self) -> Poly {
        Poly(vec![self.g9, self.g7, self.g5, self.g3, self.g1])
    }
}

fn basis27(rec: &BasisRecord) -> Result<[C64; 6]> {
    Ok([rec.p(1)?, rec.p(3)?, rec.p(5)?, rec.q(1)?, rec.q(3)?, rec.q(5)?])
}

/// `A(u) = (Υ₁, Υ₂, Υ₃)` with `Υ₁ = (℘₁₅, ℘₁₃, ℘₁₁)`,
/// `Υ₂ = -½(℘₁₁₅, ℘₁₁₃, ℘₁₁₁)` and `Υ₃ = ℘₁₁Υ₁ + Υ₁°`.
pub fn a_matrix_27(rec: &BasisRecord) -> Result<CMatrix> {
    let [p2, p4, p6, q3, q5, q7] = basis27(rec)?;
    let ups1 = [p6, p4, p2];
    let ups1c = [ZERO, p6, p4];
    let ups2 = [-0.5 * q7, -0.5 * q5, -0.5 * q3];
    let mut a = CMatrix::zeros(3, 3);
    for i in 0..3 {
        a[(i, 0)] = ups1[i];
        a[(i, 1)] = ups2[i];
        a[(i, 2)] = p2 * ups1[i] + ups1c[i];
    }
    Ok(a)
}

/// `b(u) = -½℘₁₁₁Υ₁ + Υ₂°`, `Υ₂° = (0, -½℘₁₁₅, -½℘₁₁₃)`.
pub fn b_vector_27(rec: &BasisRecord) -> Result<CVector> {
    let [p2, p4, p6, q3, q5, q7] = basis27(rec)?;
    Ok(CVector::from_vec(vec![
        -0.5 * q3 * p6,
        -0.5 * q3 * p4 - 0.5 * q7,
        -0.5 * q3 * p2 - 0.5 * q5,
    ]))
}

/// Solves the 6×6 block system for `γ` from the records at `u` and `ũ`.
pub fn gamma_27(curve: &CurveModel, rec: &BasisRecord, rec_t: &BasisRecord) -> Result<GammaCoeffs> {
    if (curve.n, curve.s) != (2, 7) {
        return Err(Error::Unsupported("explicit addition is for the (2,7) curve".into()));
    }
    let (a, at) = (a_matrix_27(rec)?, a_matrix_27(rec_t)?);
    let (b, bt) = (b_vector_27(rec)?, b_vector_27(rec_t)?);
    let diff = &a - &at;
    let inv = linalg::inverse(&diff, 1e-12)
        .map_err(|_| Error::DegeneratePair("A(u) - A(ũ) is singular".into()))?;
    let bar = -(&inv * (&b - &bt));
    let breve = -&b - &a * &bar;
    Ok(GammaCoeffs {
        g3: bar[0],
        g2: bar[1],
        g1: bar[2],
        g9: breve[0],
        g7: breve[1],
        g5: breve[2],
    })
}

/// Basis record at `û = -(u + ũ)`: `p(û)` from the three coefficient
/// identities of `R₉R₉⁻ + (x + γ₂)² f`, `q(û)` from
/// `γ̆ + A(û)γ̄ + b(û) = 0`, which is linear in `q(û)`.
pub fn add27_explicit(curve: &CurveModel, rec: &BasisRecord, rec_t: &BasisRecord) -> Result<(BasisRecord, GammaCoeffs)> {
    let g = gamma_27(curve, rec, rec_t)?;
    let [p2, p4, p6, ..] = basis27(rec)?;
    let [t2, t4, t6, ..] = basis27(rec_t)?;
    let (l4, l6) = (curve.lambda(4), curve.lambda(6));
    let h2 = -p2 - t2 - 2.0 * g.g2 + g.g1 * g.g1;
    let h4 = -p4 - t4 + p2 * t2 + (p2 + t2) * h2 + 2.0 * g.g1 * g.g3 - g.g2 * g.g2 - l4;
    let h6 = -p6 - t6 + p4 * t2 + t4 * p2 + (p2 + t2) * h4 + (p4 + t4 - p2 * t2) * h2 + g.g3 * g.g3
        + 2.0 * g.g1 * g.g5
        - 2.0 * g.g2 * l4
        - l6;
    // rows of γ̆ + A(û)γ̄ + b(û) in the unknowns (q3, q5, q7)
    let half = C64::new(0.5, 0.0);
    let m = linalg::from_rows(&[
        vec![-half * h6, ZERO, -half * g.g2],
        vec![-half * h4, -half * g.g2, -half],
        vec![-half * h2 - half * g.g2, -half, ZERO],
    ]);
    let rhs = -CVector::from_vec(vec![
        g.g9 + h6 * g.g3 + h2 * h6 * g.g1,
        g.g7 + h4 * g.g3 + (h2 * h4 + h6) * g.g1,
        g.g5 + h2 * g.g3 + (h2 * h2 + h4) * g.g1,
    ]);
    let q = linalg::solve(&m, &rhs, 1e-13)
        .map_err(|_| Error::DegeneratePair("the system for ℘₁₁ⱼ(û) is singular".into()))?;
    let mut out = BasisRecord::default();
    out.p.insert(1, h2);
    out.p.insert(3, h4);
    out.p.insert(5, h6);
    out.q.insert(1, q[0]);
    out.q.insert(3, q[1]);
    out.q.insert(5, q[2]);
    Ok((out, g))
}

fn r6(rec: &BasisRecord) -> Result<Poly> {
    let [p2, p4, p6, ..] = basis27(rec)?;
    Ok(Poly(vec![-p6, -p4, -p2, ONE]))
}

/// Coefficients of `(x + γ₂)² P(x) - G(x)² - R₆(u)R₆(ũ)R₆(û)`, where
/// `R₉ = (x + γ₂) y + G(x)` and the curve is `y² = P(x)`; each divided by
/// the largest term contributing to it.
pub fn quotient_residual(
    curve: &CurveModel,
    g: &GammaCoeffs,
    rec: &BasisRecord,
    rec_t: &BasisRecord,
    rec_h: &BasisRecord,
) -> Result<Vec<f64>> {
    let p = curve.y_coefficients()[0].clone();
    let lin = Poly(vec![g.g2, ONE]);
    let a = lin.mul(&lin).mul(&p);
    let gx = g.x_part();
    let b = gx.mul(&gx);
    let c = r6(rec)?.mul(&r6(rec_t)?).mul(&r6(rec_h)?);
    let abs = |q: &Poly| Poly(q.0.iter().map(|v| C64::new(v.norm(), 0.0)).collect());
    let sa = abs(&lin).mul(&abs(&lin)).mul(&abs(&p));
    let sb = abs(&gx).mul(&abs(&gx));
    let sc = abs(&r6(rec)?).mul(&abs(&r6(rec_t)?)).mul(&abs(&r6(rec_h)?));
    let res = a.sub(&b).sub(&c);
    Ok((0..10)
        .map(|k| {
            let s = sa.coeff(k).re.max(sb.coeff(k).re).max(sc.coeff(k).re);
            if s == 0.0 {
                res.coeff(k).norm()
            } else {
                res.coeff(k).norm() / s
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uniformization::divisor_to_basis;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn divisor(curve: &CurveModel, xs: &[C64], sheet: usize) -> Divisor {
        let pts: Vec<(C64, C64)> = xs
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let ys = curve.y_roots(x).unwrap();
                (x, curve.refine_y(x, ys[(k + sheet) % ys.len()]))
            })
            .collect();
        Divisor::new(curve, &pts).unwrap()
    }

    fn curve27() -> CurveModel {
        CurveModel::with_lambda(
            2,
            7,
            &[(4, c(0.3, 0.1)), (6, c(-0.2, 0.2)), (8, c(0.5, 0.0)), (10, c(0.1, -0.4)), (12, c(-0.3, 0.0)), (14, c(0.2, 0.3))],
        )
        .unwrap()
    }

    #[test]
    fn hyperelliptic_negate_is_involution() {
        let cv = curve27();
        let d = divisor(&cv, &[c(0.3, 0.2), c(-0.4, 0.5), c(0.6, -0.3)], 0);
        let n = negate(&cv, &d).unwrap();
        assert!(multiset_distance(&n.coords(), &d.involution().coords()) < 1e-10);
    }

    #[test]
    fn trigonal_negate_round_trip() {
        let cv = CurveModel::with_lambda(3, 4, &[(2, c(0.3, 0.1)), (5, c(-0.2, 0.4)), (9, c(0.2, 0.2))]).unwrap();
        let d = divisor(&cv, &[c(0.3, 0.1), c(-0.5, 0.4), c(0.1, -0.7)], 0);
        let n = negate(&cv, &d).unwrap();
        assert_eq!(n.degree(), 3);
        for p in &n.points {
            assert!(cv.eval_f(p.x, p.y).norm() < 1e-8 * cv.on_curve_tolerance(p.x, p.y) * 1e10);
        }
        let nn = negate(&cv, &n).unwrap();
        assert!(multiset_distance(&nn.coords(), &d.coords()) < 1e-8);
        let (r, rn) = (divisor_to_basis(&cv, &d).unwrap(), divisor_to_basis(&cv, &n).unwrap());
        let flipped = r.negated(&cv).unwrap();
        for w in [1, 2, 5] {
            assert!((r.p(w).unwrap() - rn.p(w).unwrap()).norm() < 1e-8);
            assert!((flipped.q(w).unwrap() - rn.q(w).unwrap()).norm() < 1e-8);
        }
        let gen = CurveModel::with_lambda(3, 5, &[(1, c(0.2, 0.1)), (4, c(-0.3, 0.2))]).unwrap();
        let d = divisor(&gen, &[c(0.3, 0.1), c(-0.5, 0.4), c(0.1, -0.7), c(0.6, 0.2)], 0);
        let r = divisor_to_basis(&gen, &d).unwrap();
        let rn = divisor_to_basis(&gen, &negate(&gen, &d).unwrap()).unwrap();
        let flipped = r.negated(&gen).unwrap();
        for w in gen.gaps.clone() {
            assert!((flipped.q(w).unwrap() - rn.q(w).unwrap()).norm() < 1e-7);
        }
    }

    #[test]
    fn explicit_27_matches_generic() {
        let cv = curve27();
        let d1 = divisor(&cv, &[c(0.3, 0.2), c(-0.4, 0.5), c(0.6, -0.3)], 0);
        let d2 = divisor(&cv, &[c(-0.2, -0.3), c(0.5, 0.6), c(-0.7, 0.1)], 1);
        let hat = add_complement(&cv, &d1, &d2).unwrap();
        let (r1, r2, rh) = (
            divisor_to_basis(&cv, &d1).unwrap(),
            divisor_to_basis(&cv, &d2).unwrap(),
            divisor_to_basis(&cv, &hat).unwrap(),
        );
        let (ex, g) = add27_explicit(&cv, &r1, &r2).unwrap();
        for w in [1, 3, 5] {
            assert!((ex.p(w).unwrap() - rh.p(w).unwrap()).norm() < 1e-9, "p{w}");
            assert!((ex.q(w).unwrap() - rh.q(w).unwrap()).norm() < 1e-9, "q{w}");
        }
        assert!(quotient_residual(&cv, &g, &r1, &r2, &rh).unwrap().iter().all(|v| *v < 1e-10));
        let (_, gm) = add27_explicit(&cv, &r1.negated(&cv).unwrap(), &r2.negated(&cv).unwrap()).unwrap();
        let gr = g.reflected();
        for (a, b) in [(gm.g1, gr.g1), (gm.g2, gr.g2), (gm.g3, gr.g3), (gm.g5, gr.g5), (gm.g7, gr.g7), (gm.g9, gr.g9)] {
            assert!((a - b).norm() < 1e-9);
        }
        let s12 = add(&cv, &d1, &d2).unwrap();
        let s21 = add(&cv, &d2, &d1).unwrap();
        assert!(multiset_distance(&s12.coords(), &s21.coords()) < 1e-12);
    }

    #[test]
    fn inverse_pair_degenerates() {
        let cv = curve27();
        let d1 = divisor(&cv, &[c(0.3, 0.2), c(-0.4, 0.5), c(0.6, -0.3)], 0);
        assert!(matches!(
            add(&cv, &d1, &d1.involution()),
            Err(Error::SpecialDivisor { .. }) | Err(Error::IdentityDegeneration(_))
        ));
        let (r1,) = (divisor_to_basis(&cv, &d1).unwrap(),);
        assert!(matches!(add27_explicit(&cv, &r1, &r1), Err(Error::DegeneratePair(_))));
    }

    #[test]
    fn group_axioms_genus_two() {
        let cv = CurveModel::with_lambda(2, 5, &[(4, c(0.2, 0.1)), (6, c(-0.3, 0.2)), (8, c(0.1, 0.0)), (10, c(0.4, -0.2))]).unwrap();
        let d1 = divisor(&cv, &[c(0.3, 0.2), c(-0.4, 0.5)], 0);
        let d2 = divisor(&cv, &[c(-0.2, -0.3), c(0.5, 0.6)], 1);
        let d3 = divisor(&cv, &[c(0.7, -0.1), c(-0.6, -0.4)], 0);
        let l = add(&cv, &add(&cv, &d1, &d2).unwrap(), &d3).unwrap();
        let r = add(&cv, &d1, &add(&cv, &d2, &d3).unwrap()).unwrap();
        assert!(multiset_distance(&l.coords(), &r.coords()) < 1e-7);
        let back = add(&cv, &add(&cv, &d1, &d2).unwrap(), &negate(&cv, &d2).unwrap()).unwrap();
        assert!(multiset_distance(&back.coords(), &d1.coords()) < 1e-7);
    }
}
