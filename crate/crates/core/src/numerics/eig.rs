//! Complex Hermitian eigensolver (cyclic Jacobi).
//!
//! A self-contained, deterministic solver: cyclic sweeps of complex Givens
//! rotations, each chosen to zero one off-diagonal pair exactly. Jacobi is
//! slower than Householder tridiagonalization but is backward stable, keeps
//! the eigenvector matrix unitary to machine precision by construction, and
//! has no convergence-dependent branching beyond the sweep count — the same
//! input always produces bitwise-identical output.

use num_complex::Complex64;

use crate::numerics::matrix::CMatrix;
use crate::tol::TOL_HERM;
use crate::{Error, Result};

/// Hard cap on Jacobi sweeps; cyclic Jacobi on double-precision input
/// converges in well under 20 sweeps at the dimensions we support.
const MAX_SWEEPS: usize = 60;

/// Relative off-diagonal Frobenius mass at which iteration stops.
const OFF_STOP: f64 = 1e-14;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns `(eigenvalues, v)` with eigenvalues sorted in descending order and
/// the columns of `v` the matching orthonormal eigenvectors, so that
/// `h ≈ v · diag(eigenvalues) · v†`.
///
/// Errors if `h` is not square, not Hermitian within [`TOL_HERM`], or if the
/// iteration fails to converge (which indicates non-finite input).
pub fn herm_eig(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    h.check_hermitian(TOL_HERM)?;
    let n = h.rows();

    // Symmetrize so the iteration works on an exactly Hermitian matrix; the
    // input is only guaranteed Hermitian within tolerance.
    let mut a = CMatrix::from_fn(n, n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);

    let fro = a.fro_norm();
    if fro == 0.0 || n == 1 {
        let eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        return sorted(eigs, v);
    }
    let stop = fro * OFF_STOP;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= stop {
            let eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
            return sorted(eigs, v);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let off = off_diagonal_norm(&a);
    if off <= stop {
        let eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        return sorted(eigs, v);
    }
    Err(Error::EigNoConvergence {
        sweeps: MAX_SWEEPS,
        off,
    })
}

/// Largest eigenvalue of a Hermitian matrix (operator norm for PSD input).
pub fn largest_eigenvalue(h: &CMatrix) -> Result<f64> {
    let (eigs, _) = herm_eig(h)?;
    Ok(eigs[0])
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            acc += 2.0 * a[(p, q)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation zeroing `a[(p, q)]`, accumulated into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let h = apq.norm();
    if h == 0.0 {
        return;
    }
    let phase = apq / h; // e^{iφ}
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * h);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let s_phase = phase * s; // s·e^{iφ}
    let s_phase_conj = s_phase.conj(); // s·e^{-iφ}

    let n = a.rows();

    // A ← A·J : columns p and q of every row mix.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s_phase_conj;
        a[(k, q)] = akp * s_phase + akq * c;
    }
    // A ← J†·A : rows p and q of every column mix.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s_phase;
        a[(q, k)] = apk * s_phase_conj + aqk * c;
    }
    // The pivot pair is zero by construction; write it exactly.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    // Diagonal entries are real by the Hermitian invariant; drop roundoff.
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // V ← V·J accumulates eigenvectors in the columns.
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s_phase_conj;
        v[(k, q)] = vkp * s_phase + vkq * c;
    }
}

/// Sorts eigenpairs by descending eigenvalue (stable).
fn sorted(eigs: Vec<f64>, v: CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = eigs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigs[j].partial_cmp(&eigs[i]).expect("finite eigenvalues"));
    let sorted_eigs: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let sorted_v = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((sorted_eigs, sorted_v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::TOL_EIG;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic dense Hermitian test matrix with a spread-out spectrum.
    fn dense_hermitian(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |r, q| {
            if r == q {
                c((r as f64 * 0.37).cos() * 2.0, 0.0)
            } else if r < q {
                let x = r as f64 * 0.7 - q as f64 * 1.3;
                let y = r as f64 * 1.1 + q as f64 * 0.3;
                c(x.sin() * 0.5, y.cos() * 0.5)
            } else {
                let x = q as f64 * 0.7 - r as f64 * 1.3;
                let y = q as f64 * 1.1 + r as f64 * 0.3;
                c(x.sin() * 0.5, -y.cos() * 0.5)
            }
        })
    }

    fn reconstruction_error(h: &CMatrix, eigs: &[f64], v: &CMatrix) -> f64 {
        let lambda = CMatrix::diag(&eigs.iter().map(|&e| c(e, 0.0)).collect::<Vec<_>>());
        let rebuilt = v.matmul(&lambda).matmul(&v.dagger());
        rebuilt.max_abs_diff(h)
    }

    #[test]
    fn pauli_x_eigenpairs() {
        let x = CMatrix::from_fn(2, 2, |r, q| if r == q { c(0.0, 0.0) } else { c(1.0, 0.0) });
        let (eigs, v) = herm_eig(&x).unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-14);
        assert!((eigs[1] + 1.0).abs() < 1e-14);
        // Eigenvector of +1 is (1,1)/√2 up to a global phase: both entries
        // must have modulus 1/√2 and equal phase.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[(0, 0)].norm() - r).abs() < 1e-12);
        assert!((v[(1, 0)].norm() - r).abs() < 1e-12);
        assert!((v[(0, 0)] - v[(1, 0)]).norm() < 1e-12);
        // Eigenvector of -1: entries opposite in sign.
        assert!((v[(0, 1)] + v[(1, 1)]).norm() < 1e-12);
        assert!(reconstruction_error(&x, &eigs, &v) < 1e-13);
    }

    #[test]
    fn diagonal_matrix_is_returned_sorted() {
        let d = CMatrix::diag(&[c(-1.0, 0.0), c(3.0, 0.0), c(0.5, 0.0)]);
        let (eigs, v) = herm_eig(&d).unwrap();
        assert_eq!(eigs.len(), 3);
        assert!((eigs[0] - 3.0).abs() < 1e-15);
        assert!((eigs[1] - 0.5).abs() < 1e-15);
        assert!((eigs[2] + 1.0).abs() < 1e-15);
        assert!(v.unitary_defect() < 1e-14);
    }

    #[test]
    fn complex_two_by_two_with_known_spectrum() {
        // H = [[1, i],[-i, 1]] has eigenvalues 2 and 0.
        let h = CMatrix::from_fn(2, 2, |r, q| match (r, q) {
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(1.0, 0.0),
        });
        let (eigs, v) = herm_eig(&h).unwrap();
        assert!((eigs[0] - 2.0).abs() < 1e-14);
        assert!(eigs[1].abs() < 1e-14);
        assert!(reconstruction_error(&h, &eigs, &v) < 1e-13);
    }

    #[test]
    fn trace_equals_eigenvalue_sum() {
        let h = dense_hermitian(17);
        let (eigs, _) = herm_eig(&h).unwrap();
        let sum: f64 = eigs.iter().sum();
        assert!((sum - h.trace().re).abs() < 1e-10);
    }

    #[test]
    fn degenerate_spectrum_converges() {
        // I + rank-one: eigenvalues {1 + n·w, 1, ..., 1}.
        let n = 8;
        let w = 0.25;
        let h = CMatrix::from_fn(n, n, |r, q| {
            let base = if r == q { c(1.0, 0.0) } else { c(0.0, 0.0) };
            base + c(w, 0.0)
        });
        let (eigs, v) = herm_eig(&h).unwrap();
        assert!((eigs[0] - (1.0 + n as f64 * w)).abs() < 1e-12);
        for e in &eigs[1..] {
            assert!((e - 1.0).abs() < 1e-12);
        }
        assert!(v.unitary_defect() < TOL_EIG);
    }

    #[test]
    fn large_dense_matrix_reconstructs_and_is_orthonormal() {
        let n = 256;
        let h = dense_hermitian(n);
        let (eigs, v) = herm_eig(&h).unwrap();
        let scale = 1.0 + h.fro_norm();
        assert!(v.unitary_defect() < TOL_EIG);
        assert!(reconstruction_error(&h, &eigs, &v) < TOL_EIG * scale);
        // Residual ‖Hv - λv‖ per eigenpair.
        for (k, &lam) in eigs.iter().enumerate() {
            let col: Vec<Complex64> = (0..n).map(|r| v[(r, k)]).collect();
            let hv = h.matvec(&col);
            let mut res = 0.0f64;
            for r in 0..n {
                res += (hv[r] - col[r] * lam).norm_sqr();
            }
            assert!(res.sqrt() < TOL_EIG * scale);
        }
        // Descending order.
        for w in eigs.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let m = CMatrix::from_fn(2, 2, |r, q| c((r + 2 * q) as f64, 1.0));
        assert!(herm_eig(&m).is_err());
    }
}
