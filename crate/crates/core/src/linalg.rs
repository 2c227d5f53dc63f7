//! Small dense complex linear-algebra helpers shared by the physics modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Matrix = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise deviation of `m` from its adjoint.
pub fn hermiticity_defect(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise deviation of `m^† m` from the identity.
pub fn unitarity_defect(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let prod = m.adjoint() * m;
    max_abs(&(prod - Matrix::identity(n, n)))
}

pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a * b - b * a
}

/// `<u|A|u>` for a column vector `u`.
pub fn expectation(a: &Matrix, u: &Vector) -> Complex64 {
    u.dotc(&(a * u))
}

pub fn trace(m: &Matrix) -> Complex64 {
    m.diagonal().iter().sum()
}
