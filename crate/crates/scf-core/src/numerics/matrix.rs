use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::real;
use crate::Complex64;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real entries (imaginary parts zero).
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
            })
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Adds `s * x x^H` in place.
    pub fn add_scaled_outer(&mut self, x: &[Complex64], s: f64) {
        assert_eq!(self.rows, x.len());
        assert_eq!(self.cols, x.len());
        for i in 0..self.rows {
            let xi = x[i] * s;
            for j in 0..self.cols {
                self[(i, j)] += xi * x[j].conj();
            }
        }
    }

    /// Adds a real diagonal in place.
    pub fn add_diag(&mut self, d: &[f64]) {
        assert!(self.is_square() && self.rows == d.len());
        for i in 0..self.rows {
            self[(i, i)] += Complex64::new(d[i], 0.0);
        }
    }

    /// Copies `block` into self with its (0,0) at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| {
            let a = real::hypot(z.re, z.im);
            if a > m {
                a
            } else {
                m
            }
        })
    }

    /// Largest deviation from Hermitian symmetry, max |A - A^H|.
    pub fn hermitian_error(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = self[(i, j)] - self[(j, i)].conj();
                let a = real::hypot(d.re, d.im);
                if a > worst {
                    worst = a;
                }
            }
        }
        worst
    }

    /// Returns (A + A^H) / 2.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Hermitian inner product x^H y.
pub fn dot_h(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| a.conj() * b)
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sq(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_matches_hand_computation() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c((i + j) as f64, 1.0));
        let b = ComplexMatrix::identity(2);
        assert_eq!(a.mul(&b), a);

        let x = ComplexMatrix::from_real(2, 1, &[1.0, 2.0]);
        let y = a.mul(&x);
        // row 0: (0+i)*1 + (1+i)*2 = 2 + 3i
        assert_eq!(y[(0, 0)], c(2.0, 3.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let ah = a.adjoint();
        assert_eq!(ah.rows(), 3);
        assert_eq!(ah[(2, 1)], c(1.0, -2.0));
    }

    #[test]
    fn outer_update_is_hermitian() {
        let mut a = ComplexMatrix::zeros(3, 3);
        let x = [c(1.0, 2.0), c(0.0, -1.0), c(0.5, 0.0)];
        a.add_scaled_outer(&x, 2.0);
        assert!(a.hermitian_error() < 1e-15);
        assert!((a[(0, 0)].re - 2.0 * 5.0).abs() < 1e-15);
    }
}
