//! Thin wrappers over nalgebra for complex dense systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Solves `a x = b` by LU with partial pivoting.
///
/// Fails when the smallest pivot is below `rel_tol` times the largest one,
/// which is the cheap singularity test used for interpolation systems.
pub fn solve(a: &CMatrix, b: &CVector, rel_tol: f64) -> Result<CVector> {
    let n = a.nrows();
    if n == 0 {
        return Ok(CVector::zeros(0));
    }
    let lu = a.clone().lu();
    let u = lu.u();
    let pivots: Vec<f64> = (0..n).map(|i| u[(i, i)].norm()).collect();
    let max = pivots.iter().cloned().fold(0.0, f64::max);
    let min = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min < rel_tol * max {
        return Err(Error::Numeric(format!(
            "singular system (pivot ratio {:e})",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    lu.solve(b)
        .ok_or_else(|| Error::Numeric("LU solve failed".into()))
}

pub fn inverse(a: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    let n = a.nrows();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = CVector::zeros(n);
        e[j] = Complex64::new(1.0, 0.0);
        let col = solve(a, &e, rel_tol)?;
        out.set_column(j, &col);
    }
    Ok(out)
}

pub fn det(a: &CMatrix) -> Complex64 {
    if a.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    a.clone().lu().determinant()
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let n = a.nrows().min(a.ncols());
    let mut s: Vec<f64> = match a.clone().try_svd(false, false, f64::EPSILON, 20_000) {
        Some(svd) => svd.singular_values.iter().copied().collect(),
        None => vec![f64::NAN; n],
    };
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn from_rows(rows: &[Vec<Complex64>]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Laplace expansion; used only as an independent oracle on small matrices.
pub fn det_laplace(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => a[0][0],
        _ => {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let minor: Vec<Vec<Complex64>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += a[0][j] * sign * det_laplace(&minor);
            }
            acc
        }
    }
}
