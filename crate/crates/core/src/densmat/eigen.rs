//! Cyclic Jacobi eigenvalue iteration for dense Hermitian matrices.

use num_complex::Complex64;

use super::{DenseHermitian, HERMITIAN_TOL};
use crate::error::{invalid, Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// All eigenvalues in ascending order.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary,
/// then applies the real Jacobi rotation that zeroes it. Sweeps continue
/// until the off-diagonal Frobenius norm falls below `1e-12` (relative to the
/// matrix norm when that exceeds one).
pub fn hermitian_eigenvalues(h: &DenseHermitian) -> Result<Vec<f64>> {
    if h.hermiticity_error() > HERMITIAN_TOL {
        return Err(invalid("eigenvalues requested for a non-Hermitian matrix"));
    }
    let n = h.dim();
    let mut a = h.entries().to_vec();
    let scale = h.purity().sqrt().max(1.0);
    let tol = OFF_DIAGONAL_TOL * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, n) < tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag < f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let theta = (a[q * n + q].re - a[p * n + p].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let back = phase.conj();

                // A <- A G with G_pp = c, G_pq = s, G_qp = -s e^{-ia}, G_qq = c e^{-ia}.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * back * s;
                    a[k * n + q] = akp * s + akq * back * c;
                }
                // A <- G^dagger A.
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * phase * s;
                    a[q * n + k] = apk * s + aqk * phase * c;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) >= tol {
        return Err(Error::Resource(format!(
            "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &DenseHermitian) -> Result<f64> {
    if h.dim() == 0 {
        return Err(invalid("empty matrix"));
    }
    Ok(hermitian_eigenvalues(h)?[0])
}
