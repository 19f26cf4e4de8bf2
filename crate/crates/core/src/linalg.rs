//! Dense linear-algebra helpers shared by the graph and theory modules.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance used to decide whether a matrix is symmetric.
const SYMMETRY_TOL: f64 = 1e-12;

pub fn is_symmetric(m: &DMatrix<f64>) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return false;
            }
        }
    }
    true
}

/// Spectral radius `max |λ|` of a square matrix.
///
/// Symmetric inputs go through a dense symmetric eigensolve; anything else
/// through a real Schur decomposition. If the Schur iteration stalls the
/// result falls back to power iteration, which reports its last iterate on
/// failure.
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension {
            what: "spectral radius needs a square matrix",
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "matrix",
            reason: "non-finite entry".into(),
        });
    }
    if is_symmetric(m) {
        let eig = m.clone().symmetric_eigen();
        return Ok(eig.eigenvalues.amax());
    }
    match m.clone().try_schur(f64::EPSILON, 10_000) {
        Some(schur) => Ok(schur
            .complex_eigenvalues()
            .iter()
            .map(|c| libm::hypot(c.re, c.im))
            .fold(0.0, f64::max)),
        None => power_radius(m, 100_000, 1e-12),
    }
}

/// Largest eigenvalue of a symmetric matrix.
pub fn lambda_max_symmetric(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.max()
}

/// Spectral radius by power iteration on `m^T m`-free growth rates.
///
/// For symmetric `m` this iterates on `m²` (positive semi-definite), which
/// avoids the oscillation caused by a `±ρ` eigenvalue pair; the radius is the
/// square root of the dominant eigenvalue of `m²`. For non-symmetric input the
/// estimate is the geometric growth rate of `‖m^k v‖`.
pub fn power_radius(m: &DMatrix<f64>, max_iter: usize, tol: f64) -> Result<f64> {
    let n = m.nrows();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64) * 1e-3);
    v /= v.norm();
    let symmetric = is_symmetric(m);
    let mut estimate = 0.0;
    let mut residual = f64::INFINITY;
    // Non-symmetric: average growth over a block of iterations.
    let block = if symmetric { 1 } else { 16 };
    for _ in 0..max_iter {
        let mut w = v.clone();
        let mut log_growth = 0.0;
        for _ in 0..block {
            w = m * &w;
            if symmetric {
                w = m * &w;
            }
            let nw = w.norm();
            if nw == 0.0 {
                return Ok(0.0);
            }
            log_growth += libm::log(nw);
            w /= nw;
        }
        let next = if symmetric {
            libm::sqrt(libm::exp(log_growth))
        } else {
            libm::exp(log_growth / block as f64)
        };
        residual = (next - estimate).abs();
        estimate = next;
        v = w;
        if residual <= tol * estimate.max(1e-300) {
            return Ok(estimate);
        }
    }
    Err(Error::NoConvergence {
        method: "power iteration",
        iterations: max_iter,
        residual,
    })
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            if s == 0.0 {
                continue;
            }
            for q in 0..bc {
                for p in 0..br {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization.
pub fn vec_of(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Solves `a x = b` in place for a small SPD matrix stored row-major.
///
/// `a` is overwritten by its Cholesky factor and `b` by the solution.
/// Returns `false` when a non-positive pivot is met.
pub fn cholesky_solve_in_place(a: &mut [f64], n: usize, b: &mut [f64]) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for j in 0..n {
        let mut d = a[j * n + j];
        for p in 0..j {
            d -= a[j * n + p] * a[j * n + p];
        }
        if d <= 0.0 || !d.is_finite() {
            return false;
        }
        let d = libm::sqrt(d);
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for p in 0..j {
                s -= a[i * n + p] * a[j * n + p];
            }
            a[i * n + j] = s / d;
        }
    }
    // forward: L y = b
    for i in 0..n {
        let mut s = b[i];
        for p in 0..i {
            s -= a[i * n + p] * b[p];
        }
        b[i] = s / a[i * n + i];
    }
    // backward: L^T x = y
    for i in (0..n).rev() {
        let mut s = b[i];
        for p in (i + 1)..n {
            s -= a[p * n + i] * b[p];
        }
        b[i] = s / a[i * n + i];
    }
    true
}

/// Symmetric square root factor `L` with `m = L L^T` for a PSD matrix.
///
/// Small negative eigenvalues from round-off are clamped to zero.
pub fn psd_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut v = eig.eigenvectors;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let s = libm::sqrt(lambda.max(0.0));
        v.column_mut(j).scale_mut(s);
    }
    v
}

/// Rows `[S^m]_{k,•}` for `m = 0..order`, for every node `k`.
///
/// Returned as `rows[m]`, an `N×N` matrix whose `k`-th row is the `k`-th row
/// of `S^m`; built by repeated products so `S^m` is never formed from scratch
/// per power.
pub fn shift_powers(s: &DMatrix<f64>, order: usize) -> Vec<DMatrix<f64>> {
    let n = s.nrows();
    let mut out = Vec::with_capacity(order);
    let mut current = DMatrix::identity(n, n);
    for m in 0..order {
        if m > 0 {
            current = &current * s;
        }
        out.push(current.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn path3() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
    }

    #[test]
    fn radius_of_simple_matrices() {
        assert_relative_eq!(
            spectral_radius(&DMatrix::identity(3, 3)).unwrap(),
            1.0,
            max_relative = 1e-8
        );
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        assert_relative_eq!(spectral_radius(&d).unwrap(), 3.0, max_relative = 1e-8);
        assert_relative_eq!(
            spectral_radius(&path3()).unwrap(),
            core::f64::consts::SQRT_2,
            max_relative = 1e-8
        );
    }

    #[test]
    fn power_iteration_agrees_with_dense_solve() {
        assert_relative_eq!(
            power_radius(&path3(), 10_000, 1e-14).unwrap(),
            core::f64::consts::SQRT_2,
            max_relative = 1e-8
        );
        // rotation-scaled: complex pair with modulus 0.5, plus 0.2
        let m = DMatrix::from_row_slice(3, 3, &[0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.2]);
        assert_relative_eq!(spectral_radius(&m).unwrap(), 0.5, max_relative = 1e-8);
        assert_relative_eq!(power_radius(&m, 100_000, 1e-13).unwrap(), 0.5, max_relative = 1e-6);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(spectral_radius(&m).is_err());
    }

    #[test]
    fn kron_and_vec_identity() {
        // vec(X Y Z) = (Z^T ⊗ X) vec(Y)
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let y = DMatrix::from_row_slice(2, 2, &[0.5, -1.0, 2.0, 0.25]);
        let z = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 1.5, 2.0]);
        let lhs = vec_of(&(&x * &y * &z));
        let rhs = kron(&z.transpose(), &x) * vec_of(&y);
        assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn small_cholesky_solve() {
        let mut a = vec![4.0, 1.0, 1.0, 3.0];
        let mut b = vec![1.0, 2.0];
        assert!(cholesky_solve_in_place(&mut a, 2, &mut b));
        // exact solution of [[4,1],[1,3]] x = [1,2]
        assert_relative_eq!(b[0], 1.0 / 11.0, epsilon = 1e-14);
        assert_relative_eq!(b[1], 7.0 / 11.0, epsilon = 1e-14);
        let mut bad = vec![1.0, 2.0, 2.0, 1.0];
        let mut rhs = vec![1.0, 1.0];
        assert!(!cholesky_solve_in_place(&mut bad, 2, &mut rhs));
    }

    #[test]
    fn psd_factor_reconstructs() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let l = psd_factor(&m);
        assert_relative_eq!(&l * l.transpose(), m, epsilon = 1e-12);
    }
}
