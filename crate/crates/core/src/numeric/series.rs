//! Truncated power series `c[0] + c[1] t + ... + c[N-1] t^(N-1)`.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Series(pub Vec<Complex64>);

impl Series {
    pub fn zero(len: usize) -> Self {
        Series(vec![ZERO; len])
    }

    pub fn constant(c: Complex64, len: usize) -> Self {
        let mut s = Series::zero(len);
        if len > 0 {
            s.0[0] = c;
        }
        s
    }

    /// `a + b t`, truncated to `len`.
    pub fn linear(a: Complex64, b: Complex64, len: usize) -> Self {
        let mut s = Series::constant(a, len);
        if len > 1 {
            s.0[1] = b;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: Complex64) -> Series {
        Series(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.len();
        let mut out = vec![ZERO; n];
        for (i, &a) in self.0.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for (j, &b) in o.0.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Series(out)
    }

    pub fn powi(&self, k: u32) -> Series {
        let mut out = Series::constant(ONE, self.len());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Series {
        let n = self.len();
        let mut out = vec![ZERO; n];
        let c0 = self.0[0];
        out[0] = ONE / c0;
        for k in 1..n {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.0[j] * out[k - j];
            }
            out[k] = -acc / c0;
        }
        Series(out)
    }

    /// Shifts coefficients up by `k` (multiplication by `t^k`), truncating.
    pub fn shift(&self, k: usize) -> Series {
        let n = self.len();
        let mut out = vec![ZERO; n];
        for i in 0..n.saturating_sub(k) {
            out[i + k] = self.0[i];
        }
        Series(out)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.0.iter().rev().fold(ZERO, |acc, &c| acc * t + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recip_of_geometric() {
        // 1 / (1 - t) = 1 + t + t^2 + ...
        let s = Series::linear(ONE, -ONE, 6);
        let r = s.recip();
        assert!(r.0.iter().all(|c| (c - ONE).norm() < 1e-15));
        let back = r.mul(&s);
        assert!((back.0[0] - ONE).norm() < 1e-15);
        assert!(back.0[1..].iter().all(|c| c.norm() < 1e-15));
    }
}
