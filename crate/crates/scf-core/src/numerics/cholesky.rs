use alloc::vec::Vec;

use super::matrix::ComplexMatrix;
use crate::real;
use crate::{Complex64, Error, Result};

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: ComplexMatrix,
}

impl CholeskyFactor {
    /// Factors A = L L^H. Fails with [`Error::NotPositiveDefinite`] when a
    /// pivot is non-positive or not finite.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let mut l = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)].conj();
                }
                if i == j {
                    let pivot = sum.re;
                    if !(pivot > 0.0) || !pivot.is_finite() {
                        return Err(Error::NotPositiveDefinite);
                    }
                    l[(i, i)] = Complex64::new(real::sqrt(pivot), 0.0);
                } else {
                    l[(i, j)] = sum / l[(j, j)].re;
                }
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves A x = b given the stored factor.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // Forward: L y = b.
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[(i, k)];
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= self.l[(i, i)].re;
        }
        // Backward: L^H x = y.
        for i in (0..n).rev() {
            for k in i + 1..n {
                let lki = self.l[(k, i)].conj();
                y[i] = y[i] - lki * y[k];
            }
            y[i] /= self.l[(i, i)].re;
        }
        y
    }
}

/// Solves A x = b for Hermitian positive definite A.
pub fn solve_hpd(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(CholeskyFactor::new(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let a = ComplexMatrix::identity(3);
        let b = [
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 3.0),
        ];
        let x = solve_hpd(&a, &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_system() {
        let a = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let b = [Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)];
        let x = solve_hpd(&a, &b).unwrap();
        assert!((x[0] - Complex64::new(1.0, 0.0)).norm_sqr() < 1e-24);
        assert!((x[1] - Complex64::new(1.0, 0.0)).norm_sqr() < 1e-24);
    }

    #[test]
    fn indefinite_input_is_rejected() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = [Complex64::new(1.0, 0.0); 2];
        assert!(matches!(solve_hpd(&a, &b), Err(Error::NotPositiveDefinite)));
    }
}
