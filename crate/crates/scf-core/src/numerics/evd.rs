use alloc::vec::Vec;

use super::matrix::ComplexMatrix;
use crate::real;
use crate::{Complex64, Error, Result};

/// Result of a Hermitian eigendecomposition A = U diag(lambda) U^H.
#[derive(Debug, Clone)]
pub struct HermitianEvd {
    /// Eigenvalues sorted in nonincreasing order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, aligned with `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

/// Relative tolerance on ||A - A^H|| accepted before rejecting the input.
const HERMITIAN_TOL: f64 = 1e-10;

/// Off-diagonal mass (relative to the input scale) at which sweeps stop.
const OFF_DIAG_TOL: f64 = 1e-15;

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. The input is symmetrized as (A + A^H)/2 before iterating so
/// that rounding asymmetry cannot leak into the result.
pub fn hermitian_evd(a: &ComplexMatrix) -> Result<HermitianEvd> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    if a.hermitian_error() > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { max_asymmetry: a.hermitian_error() });
    }

    let mut m = a.hermitian_part();
    let mut u = ComplexMatrix::identity(n);

    if n > 1 {
        let stop = OFF_DIAG_TOL * scale;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut off_max = 0.0f64;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = m[(p, q)];
                    let mag = real::hypot(apq.re, apq.im);
                    if mag > off_max {
                        off_max = mag;
                    }
                    if mag <= stop {
                        continue;
                    }
                    rotate(&mut m, &mut u, p, q, mag);
                }
            }
            if off_max <= stop {
                converged = true;
                break;
            }
        }
        if !converged {
            // One more scan: quadratic convergence means leftovers signal a
            // genuinely pathological input.
            let mut off_max = 0.0f64;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let z = m[(p, q)];
                    off_max = off_max.max(real::hypot(z.re, z.im));
                }
            }
            if off_max > 1e-9 * scale {
                return Err(Error::NoConvergence("Jacobi eigensolver"));
            }
        }
    }

    // Sort eigenpairs by descending eigenvalue.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.partial_cmp(&m[(i, i)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);

    Ok(HermitianEvd { eigenvalues, eigenvectors })
}

/// One Jacobi rotation zeroing m[p,q]. The complex pivot is reduced to a real
/// one by absorbing its phase, then the classical symmetric 2x2 rotation is
/// applied: tau = (a_qq - a_pp) / 2|a_pq|, t = sgn(tau)/(|tau| + sqrt(1+tau^2)).
fn rotate(m: &mut ComplexMatrix, u: &mut ComplexMatrix, p: usize, q: usize, mag: f64) {
    let n = m.rows();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = m[(p, q)] / mag; // e^{i phi}

    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + real::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + real::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / real::sqrt(1.0 + t * t);
    let s = t * c;

    // Column update: A <- A R, with R_pp = c, R_pq = s,
    // R_qp = -s conj(phase), R_qq = c conj(phase).
    let ph_c = phase.conj();
    for i in 0..n {
        let aip = m[(i, p)];
        let aiq = m[(i, q)];
        m[(i, p)] = aip * c - aiq * (ph_c * s);
        m[(i, q)] = aip * s + aiq * (ph_c * c);
    }
    // Row update: A <- R^H A.
    for j in 0..n {
        let apj = m[(p, j)];
        let aqj = m[(q, j)];
        m[(p, j)] = apj * c - aqj * (phase * s);
        m[(q, j)] = apj * s + aqj * (phase * c);
    }
    // Pivot pair is known in closed form; writing it directly avoids rounding
    // residue on the zeroed entries.
    m[(p, p)] = Complex64::new(app - t * mag, 0.0);
    m[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);

    // Accumulate eigenvectors: U <- U R.
    for i in 0..n {
        let uip = u[(i, p)];
        let uiq = u[(i, q)];
        u[(i, p)] = uip * c - uiq * (ph_c * s);
        u[(i, q)] = uip * s + uiq * (ph_c * c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::dot_h;

    #[test]
    fn diagonal_matrix_is_its_own_decomposition() {
        let a = ComplexMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        let evd = hermitian_evd(&a).unwrap();
        assert_eq!(evd.eigenvalues, [3.0, 1.0]);
        let u = &evd.eigenvectors;
        assert!((u[(0, 0)].re.abs() - 1.0).abs() < 1e-12);
        assert!((u[(1, 1)].re.abs() - 1.0).abs() < 1e-12);
        assert!(u[(1, 0)].norm_sqr() < 1e-24);
    }

    #[test]
    fn two_by_two_symmetric() {
        let a = ComplexMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let evd = hermitian_evd(&a).unwrap();
        assert!((evd.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((evd.eigenvalues[1] - 1.0).abs() < 1e-12);
        // Eigenvectors are (1,1)/sqrt(2) and (1,-1)/sqrt(2) up to phase.
        let u = &evd.eigenvectors;
        let v0 = u.col(0);
        let expect0 = [
            Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let overlap = dot_h(&expect0, &v0);
        assert!((real::hypot(overlap.re, overlap.im) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_evd(&rect), Err(Error::NotSquare { .. })));

        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(hermitian_evd(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn zero_matrix() {
        let a = ComplexMatrix::zeros(3, 3);
        let evd = hermitian_evd(&a).unwrap();
        assert_eq!(evd.eigenvalues, [0.0, 0.0, 0.0]);
    }
}
