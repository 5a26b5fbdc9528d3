//! Numerical kernels: polynomials, dense linear algebra, quadrature,
//! truncated power series and multiset matching.

pub mod linalg;
pub mod matching;
pub mod poly;
pub mod quad;
pub mod series;

pub use linalg::{CMatrix, CVector};
pub use poly::Poly;
