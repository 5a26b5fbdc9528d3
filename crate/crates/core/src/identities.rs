//! Jacobian- and Kummer-model relations evaluated as residuals on basis
//! records, and the hyperelliptic matrix form `Tᵗ H T + 2 Υ₂ Υ₂ᵗ = 0`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::curve::{CurveModel, C64, ONE, ZERO};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::numeric::linalg::{self, CMatrix};
use crate::numeric::Poly;
use crate::uniformization::{
    d_along_u, divisor_to_basis, hyperelliptic_taylor, jacobian_along_u, safe_radius, solution_system, taylor_along_u,
    w55_formula,
    BasisRecord,
};

/// A relation value together with the largest absolute term entering it.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityResidual {
    pub name: String,
    #[serde(skip)]
    pub value: C64,
    pub scale: f64,
}

impl IdentityResidual {
    /// `|value| / scale`; zero when every term vanishes.
    pub fn normalized(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.norm()
        } else {
            self.value.norm() / self.scale
        }
    }
}

/// Sum that remembers its largest term.
#[derive(Default)]
struct Terms {
    sum: C64,
    scale: f64,
}

impl Terms {
    fn t(mut self, v: C64) -> Self {
        self.sum += v;
        self.scale = self.scale.max(v.norm());
        self
    }

    fn done(self, name: &str) -> IdentityResidual {
        IdentityResidual {
            name: name.to_string(),
            value: self.sum,
            scale: self.scale,
        }
    }
}

fn need(curve: &CurveModel, n: u32, s: u32) -> Result<()> {
    if (curve.n, curve.s) != (n, s) {
        return Err(Error::Unsupported(format!(
            "relations are for the ({n},{s}) curve, got ({},{})",
            curve.n, curve.s
        )));
    }
    Ok(())
}

/// `𝒥₁₀`, `𝒥₁₂`, `𝒥₁₄` of the (2,7) curve.
pub fn residuals_27(curve: &CurveModel, rec: &BasisRecord) -> Result<Vec<IdentityResidual>> {
    need(curve, 2, 7)?;
    let (p2, p4, p6) = (rec.p(1)?, rec.p(3)?, rec.p(5)?);
    let (q3, q5, q7) = (rec.q(1)?, rec.q(3)?, rec.q(5)?);
    let l = |w: i64| curve.lambda(w);
    let (l4, l6, l8, l10, l12, l14) = (l(4), l(6), l(8), l(10), l(12), l(14));
    let j10 = Terms::default()
        .t(-2.0 * q3 * q7)
        .t(-q5 * q5)
        .t(-2.0 * p2 * q3 * q5)
        .t(-(p4 + p2 * p2) * q3 * q3)
        .t(12.0 * p2 * p2 * p6)
        .t(12.0 * p2 * p4 * p4)
        .t(16.0 * p2.powu(3) * p4)
        .t(4.0 * p2.powu(5))
        .t(8.0 * p4 * p6)
        .t(4.0 * l4 * (p6 + 2.0 * p2 * p4 + p2.powu(3)))
        .t(4.0 * l6 * (p4 + p2 * p2))
        .t(4.0 * l8 * p2)
        .t(l10)
        .done("J10");
    let j12 = Terms::default()
        .t(-2.0 * q5 * q7)
        .t(-2.0 * p4 * q3 * q5)
        .t(-(p6 + p2 * p4) * q3 * q3)
        .t(16.0 * p2 * p4 * p6)
        .t(12.0 * p2 * p2 * p4 * p4)
        .t(4.0 * p6 * p6)
        .t(4.0 * p2.powu(3) * p6)
        .t(4.0 * p2.powu(4) * p4)
        .t(4.0 * p4.powu(3))
        .t(4.0 * l4 * (p2 * p6 + p4 * p4 + p2 * p2 * p4))
        .t(4.0 * l6 * (p6 + p2 * p4))
        .t(4.0 * l8 * p4)
        .t(4.0 * l12)
        .done("J12");
    let j14 = Terms::default()
        .t(-q7 * q7)
        .t(-2.0 * p6 * q3 * q5)
        .t(-p2 * p6 * q3 * q3)
        .t(8.0 * p2 * p6 * p6)
        .t(4.0 * p4 * p4 * p6)
        .t(12.0 * p2 * p2 * p4 * p6)
        .t(4.0 * p2.powu(4) * p6)
        .t(4.0 * l4 * p6 * (p4 + p2 * p2))
        .t(4.0 * l6 * p2 * p6)
        .t(4.0 * l8 * p6)
        .t(4.0 * l14)
        .done("J14");
    Ok(vec![j10, j12, j14])
}

/// `𝒥₁₂`, `𝒥₁₃`, `𝒥₁₆` of the (3,4) curve; these use basis values only.
pub fn jacobian_model_34(curve: &CurveModel, rec: &BasisRecord) -> Result<Vec<IdentityResidual>> {
    need(curve, 3, 4)?;
    let (p2, p3, p6) = (rec.p(1)?, rec.p(2)?, rec.p(5)?);
    let (q3, q4, q7) = (rec.q(1)?, rec.q(2)?, rec.q(5)?);
    let l = |w: i64| curve.lambda(w);
    let (l2, l5, l6, l8, l9, l12) = (l(2), l(5), l(6), l(8), l(9), l(12));
    let a = p6 + p2 * p2 * (p2 + l2);
    let j12 = Terms::default()
        .t(-2.0 * p2 * (q3 + p3) * (q7 - q3 * q4))
        .t(-p2 * p2 * q4 * q4)
        .t(-q3 * q3 * (0.5 * p2 * q4 + (0.5 * q3 + p3).powu(2) - p6))
        .t(-(2.0 * p2 * q4 - q3 * q3) * a)
        .t(2.0 * q3 * (2.0 * p3 * p6 - p2 * p2 * (p2 * p3 + l5)))
        .t(-4.0 * p6 * p6)
        .t(4.0 * p2.powu(3) * (p6 + p3 * p3 + l6))
        .t(l8 * p2 * p2)
        .done("J12");
    let j13 = Terms::default()
        .t(-(2.0 * q7 - q3 * q4) * (p2 * q4 - 0.25 * q3 * (q3 + 2.0 * p3) + a))
        .t(-2.0 * p2 * p2 * q4 * (p3 * (p2 + l2) + p2 * p3 + l5))
        .t(4.0 * p2 * p2 * (p3 * (p6 + p3 * p3 + l6) + p3 * p6 + l9))
        .done("J13");
    let j16 = Terms::default()
        .t(-p2 * (q7 * q7 + p6 * q4 * q4 - (q3 + p3) * q7 * q4))
        .t(-(q7 * q3 - 2.0 * p6 * q4) * (0.25 * q3 * q3 - a))
        .t(-p3 * q3 * (q7 * q3 - p6 * q4))
        .t(-q7 * ((p3 * q3 - 2.0 * p6) * p3 + 2.0 * p2 * p2 * (p2 * p3 + l5)))
        .t(4.0 * p2 * p2 * (p6 * (p6 + p3 * p3 + l6) + l12))
        .done("J16");
    Ok(vec![j12, j13, j16])
}

/// All (3,4) relations: the Jacobian model, `𝒢₆ ... 𝒢₁₄` (which need
/// `℘₂₂`, `℘₂₅` in `rec.extended`) and the 4-index expressions for
/// `℘₁₁₁₁`, `℘₁₁₁₂`, `℘₁₁₁₅` (and `℘₅₅` when present).
pub fn residuals_34(curve: &CurveModel, rec: &BasisRecord) -> Result<Vec<IdentityResidual>> {
    let mut out = jacobian_model_34(curve, rec)?;
    let (w11, w12, w15) = (rec.p(1)?, rec.p(2)?, rec.p(5)?);
    let (w22, w25) = (rec.ext(&[2, 2])?, rec.ext(&[2, 5])?);
    let w111 = rec.q(1)? + w12;
    let w112 = rec.q(2)? + w22;
    let w115 = rec.q(5)? + w25;
    let l = |w: i64| curve.lambda(w);
    let (l2, l5, l6, l8, l9, l12) = (l(2), l(5), l(6), l(8), l(9), l(12));
    let bracket = |t: Terms| {
        t.t(-w112 * w112)
            .t(4.0 * w11 * (w12 * w12 + l6))
            .t(w22 * w22)
    };
    let br = bracket(Terms::default());
    let (br_v, br_s) = (br.sum, br.scale);
    out.push(
        Terms::default()
            .t(-w111 * w111)
            .t(4.0 * w11.powu(3))
            .t(-4.0 * w11 * w22)
            .t(4.0 * w15)
            .t(w12 * w12)
            .t(4.0 * l2 * w11 * w11)
            .done("G6"),
    );
    out.push(
        Terms::default()
            .t(-2.0 * w111 * w112)
            .t(8.0 * w11 * w11 * w12)
            .t(-2.0 * w12 * w22)
            .t(-4.0 * w25)
            .t(4.0 * l2 * w11 * w12)
            .t(4.0 * l5 * w11)
            .done("G7"),
    );
    let with_bracket = |t: Terms, f: C64| {
        let mut t = t.t(f * br_v);
        t.scale = t.scale.max(f.norm() * br_s);
        t
    };
    out.push(
        with_bracket(
            Terms::default()
                .t(-2.0 * w111 * w115)
                .t(8.0 * w11 * w11 * w15)
                .t(2.0 * w12 * w25)
                .t(-4.0 * w15 * w22)
                .t(4.0 * l2 * w11 * w15)
                .t(4.0 * l8 * w11),
            w11,
        )
        .done("G10"),
    );
    out.push(
        with_bracket(
            Terms::default()
                .t(-2.0 * w112 * w115)
                .t(8.0 * w11 * w12 * w15)
                .t(2.0 * w22 * w25)
                .t(4.0 * l9 * w11),
            w12,
        )
        .done("G11"),
    );
    out.push(
        with_bracket(
            Terms::default()
                .t(-w115 * w115)
                .t(4.0 * w11 * w15 * w15)
                .t(w25 * w25)
                .t(4.0 * l12 * w11),
            w15,
        )
        .done("G14"),
    );
    if let Ok(w1111) = rec.ext(&[1, 1, 1, 1]) {
        out.push(
            Terms::default()
                .t(w1111)
                .t(-w11 * (6.0 * w11 + 4.0 * l2))
                .t(3.0 * w22)
                .done("P1111"),
        );
    }
    if let Ok(w1112) = rec.ext(&[1, 1, 1, 2]) {
        out.push(
            Terms::default()
                .t(w1112)
                .t(-w12 * (6.0 * w11 + l2))
                .t(-l5)
                .done("P1112"),
        );
    }
    if let Ok(w1115) = rec.ext(&[1, 1, 1, 5]) {
        let mut t = Terms::default()
            .t(w1115)
            .t(-w15 * (6.0 * w11 + l2))
            .t(-l8)
            .t(-0.75 * br_v);
        t.scale = t.scale.max(0.75 * br_s);
        out.push(t.done("P1115"));
    }
    if let Ok(w55) = rec.ext(&[5, 5]) {
        let f = w55_formula(curve, w11, w12, w15, w22, w25, w112);
        out.push(Terms::default().t(w55).t(-f).done("P55"));
    }
    Ok(out)
}

/// Hyperelliptic Jacobian model of any genus, read off as the remainder of
/// `¼ Q(x)² - P(x)` modulo `R_(2g)`, where `R_(2g+1) = 2y + Q(x)` and the
/// curve is `y² = P(x)`. The coefficient of `x^k` is named `J(4g+2-2k)`.
pub fn hyperelliptic_remainder(curve: &CurveModel, rec: &BasisRecord) -> Result<Vec<IdentityResidual>> {
    if !curve.is_hyperelliptic() {
        return Err(Error::Unsupported("the remainder model is hyperelliptic".into()));
    }
    let sys = solution_system(curve, rec)?;
    let lo = sys.r_lo.y_coefficient(0);
    let q = sys.r_hi.y_coefficient(0);
    let f0 = curve.y_coefficients()[0].clone();
    let g = curve.genus;
    let mut num = q.mul(&q).scale(C64::new(0.25, 0.0)).sub(&f0).0;
    let abs = |p: &Poly| p.0.iter().map(|c| c.norm()).collect::<Vec<f64>>();
    let qa = abs(&q);
    let mut sc = vec![0.0; num.len().max(f0.0.len())];
    for (i, a) in qa.iter().enumerate() {
        for (j, b) in qa.iter().enumerate() {
            sc[i + j] += 0.25 * a * b;
        }
    }
    for (i, a) in abs(&f0).iter().enumerate() {
        sc[i] = f64::max(sc[i], *a);
    }
    num.resize(sc.len(), ZERO);
    let la = abs(&lo);
    for top in (g..num.len()).rev() {
        let c = num[top];
        let ca = sc[top];
        for k in 0..g {
            num[top - g + k] -= c * lo.coeff(k);
            sc[top - g + k] = f64::max(sc[top - g + k], ca * la[k]);
        }
        num[top] = ZERO;
    }
    Ok((0..g)
        .rev()
        .map(|k| IdentityResidual {
            name: format!("J{}", 4 * g + 2 - 2 * k),
            value: num[k],
            scale: sc[k],
        })
        .collect())
}

/// The (3,4) Jacobian model obtained by eliminating `℘₂₂`, `℘₂₅` from the
/// `𝒢` relations: `p₂ 𝒢₁₀`, `p₂ 𝒢₁₁`, `p₂ 𝒢₁₄` with the rational
/// `℘₂₂`, `℘₂₅` substituted.
pub fn eliminated_34(curve: &CurveModel, rec: &BasisRecord) -> Result<Vec<IdentityResidual>> {
    need(curve, 3, 4)?;
    let ext = crate::uniformization::extended_34(curve, rec)?;
    let p2 = rec.p(1)?;
    let all = residuals_34(curve, &ext)?;
    Ok([("G10", "J12"), ("G11", "J13"), ("G14", "J16")]
        .iter()
        .map(|(src, dst)| {
            let r = all.iter().find(|r| r.name == *src).expect("relation present");
            IdentityResidual {
                name: dst.to_string(),
                value: r.value * p2,
                scale: r.scale * p2.norm(),
            }
        })
        .collect())
}

fn rec34_values(curve: &CurveModel, d: &Divisor) -> Result<Vec<C64>> {
    let r = divisor_to_basis(curve, d)?;
    Ok(vec![r.p(1)?, r.p(2)?, r.p(5)?, r.q(1)? + r.p(2)?])
}

/// (3,4) record whose extended values come from derivatives along `u`
/// rather than from the rational expressions:
/// `℘₂₂ = ∂₁℘₁₂ - q₄`, `℘₂₅ = ∂₁℘₁₅ - q₇`, `℘₁₁₁ⱼ = ∂ⱼ(q₃ + p₃)`.
pub fn derivative_extended_34(curve: &CurveModel, d: &Divisor) -> Result<BasisRecord> {
    need(curve, 3, 4)?;
    let mut rec = divisor_to_basis(curve, d)?;
    let jac = jacobian_along_u(curve, d, |dd| rec34_values(curve, dd))?;
    // rows: p2, p3, p6, ℘111; columns: ∂1, ∂2, ∂5
    rec.set_ext(&[2, 2], jac[1][0] - rec.q(2)?);
    rec.set_ext(&[2, 5], jac[2][0] - rec.q(5)?);
    rec.set_ext(&[1, 1, 1, 1], jac[3][0]);
    rec.set_ext(&[1, 1, 1, 2], jac[3][1]);
    rec.set_ext(&[1, 1, 1, 5], jac[3][2]);
    rec.set_ext(&[1, 5, 5], jac[2][2]);
    Ok(rec)
}

/// `∂₁(℘₅₅ expression) - ∂₅℘₁₅`; both sides equal `℘₁₅₅`.
pub fn w55_derivative_residual(curve: &CurveModel, d: &Divisor) -> Result<IdentityResidual> {
    need(curve, 3, 4)?;
    let formula = |dd: &Divisor| -> Result<C64> {
        let r = crate::uniformization::extended_34(curve, &divisor_to_basis(curve, dd)?)?;
        r.ext(&[5, 5])
    };
    let lhs = d_along_u(curve, d, 0, formula)?;
    let rhs = d_along_u(curve, d, 2, |dd| divisor_to_basis(curve, dd)?.p(5))?;
    Ok(Terms::default().t(lhs).t(-rhs).done("P55'"))
}

/// `℘₅₅` from the rational expression against the even part of the
/// weight-10 relation,
/// `℘₅₅ = 5/4 ℘₁₂℘₂₅ + (5/2 ℘₂₂ + 2/3 λ₂²)℘₁₅ + 5/4 ℘₁₁₁℘₁₁₅ - 5/8 ℘₁₂₂₅ - ℘₁₁₁₁₁₅/24`,
/// with the 4- and 6-index values from Cauchy Taylor coefficients.
pub fn w55_taylor_residual(curve: &CurveModel, d: &Divisor) -> Result<IdentityResidual> {
    need(curve, 3, 4)?;
    let e = crate::uniformization::extended_34(curve, &divisor_to_basis(curve, d)?)?;
    let (w12, w15) = (e.p(2)?, e.p(5)?);
    let (w22, w25) = (e.ext(&[2, 2])?, e.ext(&[2, 5])?);
    let w111 = e.q(1)? + w12;
    let w115 = e.q(5)? + w25;
    let e1 = [ONE, ZERO, ZERO];
    let e2 = [ZERO, ONE, ZERO];
    let r1 = 0.25 * safe_radius(curve, d, &e1)?;
    let r2 = 0.25 * safe_radius(curve, d, &e2)?;
    let t2 = taylor_along_u(curve, d, &e2, |dd| Ok(vec![divisor_to_basis(curve, dd)?.p(5)?]), 2, r2, 48)?;
    let t1 = taylor_along_u(
        curve,
        d,
        &e1,
        |dd| {
            let x = crate::uniformization::extended_34(curve, &divisor_to_basis(curve, dd)?)?;
            Ok(vec![x.q(5)? + x.ext(&[2, 5])?])
        },
        3,
        r1,
        48,
    )?;
    let l2 = curve.lambda(2);
    Ok(Terms::default()
        .t(e.ext(&[5, 5])?)
        .t(-1.25 * w12 * w25)
        .t(-2.5 * w22 * w15)
        .t(-(2.0 / 3.0) * l2 * l2 * w15)
        .t(-1.25 * w111 * w115)
        .t(0.625 * 2.0 * t2[0][2])
        .t(6.0 * t1[0][3] / 24.0)
        .done("P55 (weight 10)"))
}

/// Symmetric map of 2-index ℘ values keyed by gap weights.
#[derive(Debug, Clone, Default)]
pub struct TwoIndex(pub BTreeMap<(u32, u32), C64>);

impl TwoIndex {
    pub fn set(&mut self, i: u32, j: u32, v: C64) {
        self.0.insert((i.min(j), i.max(j)), v);
    }

    pub fn get(&self, i: u32, j: u32) -> Result<C64> {
        self.0
            .get(&(i.min(j), i.max(j)))
            .copied()
            .ok_or_else(|| Error::IncompleteRecord(format!("℘_({i},{j})")))
    }
}

/// (2,7) 2-index values derived from the basis by derivatives:
/// `℘₃₃ = -½℘₁₁₁₃ + 3℘₁₁℘₁₃ + 3℘₁₅`, `℘₃₅ = -½℘₁₁₁₅ + 3℘₁₁℘₁₅`,
/// `℘₅₅ = -℘₁₁₁₁₁₅/24 - 5℘₁₁₃₅/6 + 5℘₁₁²℘₁₅ + 5℘₁₃℘₁₅ + 3λ₄℘₁₅`.
/// The 4- and 6-index values are Taylor coefficients of `℘₁₁₃`, `℘₁₁₅`
/// along `u₁` and `u₃`, generated by the hyperelliptic flow.
pub fn two_index_27(curve: &CurveModel, d: &Divisor) -> Result<(TwoIndex, BasisRecord)> {
    need(curve, 2, 7)?;
    let rec = divisor_to_basis(curve, d)?;
    let (_, t1) = hyperelliptic_taylor(curve, &rec, &[ONE, ZERO, ZERO], 3)?;
    let (_, t3) = hyperelliptic_taylor(curve, &rec, &[ZERO, ONE, ZERO], 1)?;
    let w1113 = t1[1][1];
    let w1115 = t1[2][1];
    let w111115 = t1[2][3] * 6.0;
    let w1135 = t3[2][1];
    let (p2, p4, p6) = (rec.p(1)?, rec.p(3)?, rec.p(5)?);
    let l4 = curve.lambda(4);
    let mut two = TwoIndex::default();
    two.set(1, 1, p2);
    two.set(1, 3, p4);
    two.set(1, 5, p6);
    two.set(3, 3, -0.5 * w1113 + 3.0 * p2 * p4 + 3.0 * p6);
    two.set(3, 5, -0.5 * w1115 + 3.0 * p2 * p6);
    two.set(
        5,
        5,
        -w111115 / 24.0 - w1135 * (5.0 / 6.0) + 5.0 * p2 * p2 * p6 + 5.0 * p4 * p6 + 3.0 * l4 * p6,
    );
    Ok((two, rec))
}

/// Matrices of the hyperelliptic cubic relations.
#[derive(Debug, Clone)]
pub struct HMatrixBundle {
    pub p: CMatrix,
    pub l: CMatrix,
    pub h: CMatrix,
    pub t: CMatrix,
    /// `-½ ℘_(1,1,w)` in the order `w_g, ..., w_1`
    pub ups2: Vec<C64>,
}

/// `P` from the expansion of `(x - x̃)² Σ ℘_(2i-1,2j-1) x^(g-i) x̃^(g-j)` in
/// powers `x^a x̃^b`, `0 <= a, b <= g+1`.
pub fn p_matrix(g: usize, two: &TwoIndex) -> Result<CMatrix> {
    let coef = |a: i64, b: i64| -> Result<C64> {
        if a < 0 || b < 0 || a >= g as i64 || b >= g as i64 {
            return Ok(ZERO);
        }
        let wi = 2 * (g as i64 - a) - 1;
        let wj = 2 * (g as i64 - b) - 1;
        two.get(wi as u32, wj as u32)
    };
    let mut p = CMatrix::zeros(g + 2, g + 2);
    for a in 0..(g + 2) as i64 {
        for b in a..(g + 2) as i64 {
            let v = coef(a - 2, b)? - 2.0 * coef(a - 1, b - 1)? + coef(a, b - 2)?;
            p[(a as usize, b as usize)] = v;
            p[(b as usize, a as usize)] = v;
        }
    }
    Ok(p)
}

/// `L` from `x^g x̃^g (x + x̃) + Σ x^(g-i) x̃^(g-i) (λ_(4i) (x + x̃) + 2 λ_(4i+2))`.
pub fn l_matrix(curve: &CurveModel) -> CMatrix {
    let g = curve.genus;
    let mut l = CMatrix::zeros(g + 2, g + 2);
    l[(g, g + 1)] += ONE;
    l[(g + 1, g)] += ONE;
    for i in 1..=g {
        let k = g - i;
        let a = curve.lambda(4 * i as i64);
        l[(k + 1, k)] += a;
        l[(k, k + 1)] += a;
        l[(k, k)] += 2.0 * curve.lambda(4 * i as i64 + 2);
    }
    l
}

/// The displayed (2,7) `P`, kept verbatim as a fixture for `p_matrix`.
pub fn p_matrix_27_fixture(two: &TwoIndex) -> Result<CMatrix> {
    let w = |i, j| two.get(i, j);
    let z = ZERO;
    Ok(linalg::from_rows(&[
        vec![z, z, w(5, 5)?, w(3, 5)?, w(1, 5)?],
        vec![z, -2.0 * w(5, 5)?, -w(3, 5)?, w(3, 3)? - 2.0 * w(1, 5)?, w(1, 3)?],
        vec![w(5, 5)?, -w(3, 5)?, 2.0 * w(1, 5)? - 2.0 * w(3, 3)?, -w(1, 3)?, w(1, 1)?],
        vec![w(3, 5)?, w(3, 3)? - 2.0 * w(1, 5)?, -w(1, 3)?, -2.0 * w(1, 1)?, z],
        vec![w(1, 5)?, w(1, 3)?, w(1, 1)?, z, z],
    ]))
}

/// The displayed (2,7) `L`.
pub fn l_matrix_27_fixture(curve: &CurveModel) -> CMatrix {
    let l = |w: i64| curve.lambda(w);
    let z = ZERO;
    linalg::from_rows(&[
        vec![2.0 * l(14), l(12), z, z, z],
        vec![l(12), 2.0 * l(10), l(8), z, z],
        vec![z, l(8), 2.0 * l(6), l(4), z],
        vec![z, z, l(4), z, ONE],
        vec![z, z, z, ONE, z],
    ])
}

/// Assembles `P`, `L`, `H = P - L`, `T = (1_g, Υ₁, Υ₃)ᵗ` and `Υ₂`.
/// `q3idx` maps each gap `w` to `℘_(1,1,w)`.
pub fn build_h(curve: &CurveModel, two: &TwoIndex, q3idx: &BTreeMap<u32, C64>) -> Result<HMatrixBundle> {
    if !curve.is_hyperelliptic() {
        return Err(Error::Unsupported("the matrix form is hyperelliptic".into()));
    }
    let g = curve.genus;
    let p = p_matrix(g, two)?;
    let l = l_matrix(curve);
    let h = &p - &l;
    // b-order (1, x, ..., x^(g-1)) pairs with gaps w_g, ..., w_1
    let gap_at = |a: usize| curve.gaps[g - 1 - a];
    let ups1: Vec<C64> = (0..g).map(|a| two.get(1, gap_at(a))).collect::<Result<_>>()?;
    let mut ups1c = vec![ZERO; g];
    ups1c[1..g].copy_from_slice(&ups1[..(g - 1)]);
    let p11 = two.get(1, 1)?;
    let mut t = CMatrix::zeros(g + 2, g);
    for a in 0..g {
        t[(a, a)] = ONE;
        t[(g, a)] = ups1[a];
        t[(g + 1, a)] = p11 * ups1[a] + ups1c[a];
    }
    let ups2 = (0..g)
        .map(|a| {
            q3idx
                .get(&gap_at(a))
                .map(|v| -0.5 * v)
                .ok_or_else(|| Error::IncompleteRecord(format!("℘_(1,1,{})", gap_at(a))))
        })
        .collect::<Result<_>>()?;
    Ok(HMatrixBundle { p, l, h, t, ups2 })
}

/// `Tᵗ H T + 2 Υ₂ Υ₂ᵗ` and the entrywise scale `|T|ᵗ |H| |T| + 2|Υ₂||Υ₂|ᵗ`.
pub fn cubic_residual(b: &HMatrixBundle) -> (CMatrix, CMatrix) {
    let g = b.ups2.len();
    let tht = b.t.transpose() * &b.h * &b.t;
    let abs = |m: &CMatrix| m.map(|v| C64::new(v.norm(), 0.0));
    let scale = abs(&b.t).transpose() * abs(&b.h) * abs(&b.t);
    let mut res = tht;
    let mut sc = scale;
    for i in 0..g {
        for j in 0..g {
            let v = 2.0 * b.ups2[i] * b.ups2[j];
            res[(i, j)] += v;
            sc[(i, j)] += C64::new(v.norm(), 0.0);
        }
    }
    (res, sc)
}

/// Largest normalized entry of the cubic residual.
pub fn cubic_residual_norm(b: &HMatrixBundle) -> f64 {
    let (r, s) = cubic_residual(b);
    r.iter()
        .zip(s.iter())
        .map(|(v, s)| if s.re > 0.0 { v.norm() / s.re } else { v.norm() })
        .fold(0.0, f64::max)
}

/// `σ₄(H) / σ₃(H)`; small when `rank H = 3`.
pub fn h_rank_gap(b: &HMatrixBundle) -> f64 {
    let sv = linalg::singular_values(&b.h);
    if sv.len() < 4 {
        return 0.0;
    }
    sv[3] / sv[2]
}

#[derive(Debug, Clone)]
pub struct KummerReport {
    /// `k_(a,b)` in b-order (`a = 0` pairs with the top gap `w_g`)
    pub k: CMatrix,
    /// normalized `|½ q_a q_b - k_(a,b)|`
    pub pair_residuals: CMatrix,
    /// normalized `k_aa k_bb - k_ab²` for `a < b`
    pub minor_residuals: Vec<f64>,
}

fn bordered_minor(h: &CMatrix, a: usize, b: usize) -> (C64, f64) {
    let g = h.nrows() - 2;
    let rows = [a, g, g + 1];
    let cols = [b, g, g + 1];
    let perms: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([0, 2, 1], -1.0),
        ([1, 0, 2], -1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([2, 1, 0], -1.0),
    ];
    let mut det = ZERO;
    let mut scale: f64 = 0.0;
    for (p, sgn) in perms {
        let term = h[(rows[0], cols[p[0]])] * h[(rows[1], cols[p[1]])] * h[(rows[2], cols[p[2]])];
        det += term * sgn;
        scale = scale.max(term.norm());
    }
    (det, scale)
}

/// Kummer matrix from bordered minors of `H` and its residuals against
/// `½ ℘_(1,1,w_i) ℘_(1,1,w_j)` and the rank-one condition.
pub fn kummer_residuals(b: &HMatrixBundle) -> KummerReport {
    let g = b.ups2.len();
    let mut k = CMatrix::zeros(g, g);
    let mut ks = vec![vec![0.0; g]; g];
    let mut pr = CMatrix::zeros(g, g);
    for a in 0..g {
        for c in a..g {
            let (v, s) = bordered_minor(&b.h, a, c);
            k[(a, c)] = v;
            k[(c, a)] = v;
            ks[a][c] = s;
            ks[c][a] = s;
            let half_qq = 2.0 * b.ups2[a] * b.ups2[c];
            let scale = s.max(half_qq.norm()).max(f64::MIN_POSITIVE);
            pr[(a, c)] = C64::new((half_qq - v).norm() / scale, 0.0);
            pr[(c, a)] = pr[(a, c)];
        }
    }
    let mut minors = Vec::new();
    for a in 0..g {
        for c in (a + 1)..g {
            let m = k[(a, a)] * k[(c, c)] - k[(a, c)] * k[(c, a)];
            let scale = (ks[a][a] * ks[c][c]).max(ks[a][c] * ks[c][a]).max(f64::MIN_POSITIVE);
            minors.push(m.norm() / scale);
        }
    }
    KummerReport {
        k,
        pair_residuals: pr,
        minor_residuals: minors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn divisor(curve: &CurveModel, xs: &[C64]) -> Divisor {
        let pts: Vec<(C64, C64)> = xs
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let ys = curve.y_roots(x).unwrap();
                (x, curve.refine_y(x, ys[k % ys.len()]))
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

    fn curve34() -> CurveModel {
        CurveModel::with_lambda(
            3,
            4,
            &[(2, c(0.3, 0.1)), (5, c(-0.2, 0.4)), (6, c(0.5, 0.0)), (8, c(0.1, -0.3)), (9, c(0.2, 0.2)), (12, c(-0.4, 0.1))],
        )
        .unwrap()
    }

    fn random_record(gaps: &[u32], seed: u32) -> BasisRecord {
        let v = |k: u32| c(((seed * 7 + k) as f64 * 1.3).sin(), ((seed * 5 + k) as f64 * 0.7).cos());
        let mut rec = BasisRecord::default();
        for (k, w) in gaps.iter().enumerate() {
            rec.p.insert(*w, v(k as u32));
            rec.q.insert(*w, v(k as u32 + 3));
        }
        rec
    }

    #[test]
    fn relations_27_on_records() {
        let cv = curve27();
        let d = divisor(&cv, &[c(0.3, 0.2), c(-0.4, 0.5), c(0.6, -0.3)]);
        let rec = divisor_to_basis(&cv, &d).unwrap();
        for r in hyperelliptic_remainder(&cv, &rec).unwrap() {
            assert!(r.normalized() < 1e-12, "{} {}", r.name, r.normalized());
        }
        let shown = residuals_27(&cv, &rec).unwrap();
        assert!(shown[1].normalized() < 1e-12 && shown[2].normalized() < 1e-12);
        // the displayed J10 carries λ10 where the model has 4λ10
        assert!((shown[0].value + 3.0 * cv.lambda(10)).norm() < 1e-12 * shown[0].scale);
        for r in residuals_27(&cv, &rec.negated(&cv).unwrap()).unwrap().iter().skip(1) {
            assert!(r.normalized() < 1e-12);
        }
        let mut bad = rec.clone();
        *bad.p.get_mut(&1).unwrap() += 0.1;
        assert!(hyperelliptic_remainder(&cv, &bad).unwrap().iter().any(|r| r.normalized() > 1e-3));
        let pham = CurveModel::pham(2, 7).unwrap();
        let d = divisor(&pham, &[c(0.3, 0.2), c(-0.4, 0.5), c(0.6, -0.3)]);
        for r in residuals_27(&pham, &divisor_to_basis(&pham, &d).unwrap()).unwrap() {
            assert!(r.normalized() < 1e-12);
        }
    }

    #[test]
    fn displayed_27_is_minus_four_remainder() {
        let cv = curve27();
        for seed in 0..4 {
            let rec = random_record(&[1, 3, 5], seed);
            let shown = residuals_27(&cv, &rec).unwrap();
            let rem = hyperelliptic_remainder(&cv, &rec).unwrap();
            for (k, (a, b)) in shown.iter().zip(&rem).enumerate() {
                assert_eq!(a.name, b.name);
                let fix = if k == 0 { 3.0 * cv.lambda(10) } else { ZERO };
                assert!((a.value + fix + 4.0 * b.value).norm() < 1e-12 * a.scale);
            }
        }
    }

    #[test]
    fn relations_34() {
        let cv = curve34();
        let d = divisor(&cv, &[c(0.3, 0.1), c(-0.5, 0.4), c(0.1, -0.7)]);
        let rec = divisor_to_basis(&cv, &d).unwrap();
        let shown = jacobian_model_34(&cv, &rec).unwrap();
        assert!(shown[1].normalized() < 1e-12 && shown[2].normalized() < 1e-12);
        // the displayed J12 carries λ8 p2² where the model has 4λ8 p2²
        let p2 = rec.p(1).unwrap();
        assert!((shown[0].value + 3.0 * cv.lambda(8) * p2 * p2).norm() < 1e-12 * shown[0].scale);
        for r in eliminated_34(&cv, &rec).unwrap() {
            assert!(r.normalized() < 1e-12, "{} {}", r.name, r.normalized());
        }
        let ext = derivative_extended_34(&cv, &d).unwrap();
        for r in residuals_34(&cv, &ext).unwrap().iter().skip(3) {
            assert!(r.normalized() < 1e-6, "{} {}", r.name, r.normalized());
        }
        assert!(residuals_34(&cv, &rec).is_err());
        let r = w55_derivative_residual(&cv, &d).unwrap();
        assert!(r.normalized() < 1e-6, "{}", r.normalized());
        let r = w55_taylor_residual(&cv, &d).unwrap();
        assert!(r.normalized() < 1e-8, "{}", r.normalized());
    }

    #[test]
    fn eliminated_34_matches_display_off_the_variety() {
        let cv = curve34();
        for seed in 0..4 {
            let rec = random_record(&[1, 2, 5], seed);
            let shown = jacobian_model_34(&cv, &rec).unwrap();
            let elim = eliminated_34(&cv, &rec).unwrap();
            let p2 = rec.p(1).unwrap();
            for (k, (a, b)) in shown.iter().zip(&elim).enumerate() {
                let fix = if k == 0 { 3.0 * cv.lambda(8) * p2 * p2 } else { ZERO };
                assert!((a.value + fix - b.value).norm() < 1e-12 * a.scale, "{}", a.name);
            }
        }
    }

    #[test]
    fn template_matches_27_fixture() {
        let cv = curve27();
        let mut two = TwoIndex::default();
        for (k, (i, j)) in [(1, 1), (1, 3), (1, 5), (3, 3), (3, 5), (5, 5)].iter().enumerate() {
            two.set(*i, *j, c(0.1 + k as f64, -0.3 * k as f64));
        }
        let gen = p_matrix(3, &two).unwrap();
        let fix = p_matrix_27_fixture(&two).unwrap();
        assert!(linalg::max_abs(&(&gen - &fix)) < 1e-14);
        assert_eq!(l_matrix(&cv), l_matrix_27_fixture(&cv));
        assert_eq!(gen, gen.transpose());
        let pham = CurveModel::pham(2, 7).unwrap();
        let l0 = l_matrix(&pham);
        assert_eq!(l0.iter().filter(|v| **v != ZERO).count(), 2);
    }

    #[test]
    fn genus_one_cubic_is_weierstrass() {
        let e = CurveModel::with_lambda(2, 3, &[(4, c(0.4, 0.1)), (6, c(-0.2, 0.3))]).unwrap();
        let d = divisor(&e, &[c(0.7, -0.2)]);
        let rec = divisor_to_basis(&e, &d).unwrap();
        let mut two = TwoIndex::default();
        two.set(1, 1, rec.p(1).unwrap());
        let b = build_h(&e, &two, &rec.q).unwrap();
        let (r, _) = cubic_residual(&b);
        let (w, dw) = (rec.p(1).unwrap(), rec.q(1).unwrap());
        let weier = 0.5 * (dw * dw - 4.0 * w.powu(3) - 4.0 * e.lambda(4) * w - 4.0 * e.lambda(6));
        assert!((r[(0, 0)] + weier).norm() < 1e-12 || (r[(0, 0)] - weier).norm() < 1e-12);
        assert!(cubic_residual_norm(&b) < 1e-13);
    }

    #[test]
    fn cubic_relations_27_from_derivatives() {
        let cv = curve27();
        let d = divisor(&cv, &[c(0.3, 0.2), c(-0.4, 0.5), c(0.6, -0.3)]);
        let (two, rec) = two_index_27(&cv, &d).unwrap();
        let b = build_h(&cv, &two, &rec.q).unwrap();
        assert!(cubic_residual_norm(&b) < 1e-6, "{}", cubic_residual_norm(&b));
        assert!(h_rank_gap(&b) < 1e-6, "{}", h_rank_gap(&b));
        let k = kummer_residuals(&b);
        assert!(k.pair_residuals.iter().all(|v| v.re < 1e-6));
        assert!(k.minor_residuals.iter().all(|v| *v < 1e-8), "{:?}", k.minor_residuals);
        assert_eq!(k.k, k.k.transpose());
        assert_eq!(b.h, b.h.transpose());
    }
}
