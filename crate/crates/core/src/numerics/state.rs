//! Pure states and density operators.

use num_complex::Complex64;

use crate::numerics::eig::herm_eig;
use crate::numerics::matrix::CMatrix;
use crate::tol::{TOL_HERM, TOL_NORM, TOL_PSD};
use crate::{Error, Result};

/// Normalized pure state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Wraps an amplitude vector, requiring unit norm within [`TOL_NORM`].
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::BadParam {
                name: "amps",
                reason: "state vector must be non-empty".into(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::BadNorm {
                norm,
                tol: TOL_NORM,
            });
        }
        Ok(PureState { amps })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::BadParam {
                name: "amps",
                reason: "cannot normalize the zero vector".into(),
            });
        }
        let inv = 1.0 / norm;
        Ok(PureState {
            amps: amps.into_iter().map(|a| a * inv).collect(),
        })
    }

    /// Computational basis state `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        PureState { amps }
    }

    /// Uniform superposition over all `dim` basis states.
    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        PureState {
            amps: vec![a; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Squared overlap `|⟨self|other⟩|²`.
    pub fn overlap_sqr(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |r, c| self.amps[r] * self.amps[c].conj())
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState { amps }
    }

    /// Applies a norm-preserving matrix (validated by renormalization check).
    ///
    /// Errors if `u` is not `dim x dim` or if the image fails unit norm by
    /// more than [`TOL_NORM`] — which means `u` was not an isometry on this
    /// vector.
    pub fn transformed(&self, u: &CMatrix) -> Result<PureState> {
        if u.cols() != self.dim() || u.rows() != self.dim() {
            return Err(Error::DimMismatch {
                context: "state transform",
                expected: self.dim(),
                found: u.cols(),
            });
        }
        PureState::new(u.matvec(&self.amps))
    }
}

/// Density operator: Hermitian, unit trace; positive semidefiniteness is
/// checked on demand via [`DensityOp::check_psd`] because it requires a full
/// eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    mat: CMatrix,
}

impl DensityOp {
    /// Wraps a matrix, requiring it square, Hermitian within [`TOL_HERM`],
    /// and unit-trace within [`TOL_NORM`].
    pub fn new(mat: CMatrix) -> Result<Self> {
        mat.check_hermitian(TOL_HERM)?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_NORM || tr.im.abs() > TOL_NORM {
            return Err(Error::BadTrace {
                trace: tr.re,
                tol: TOL_NORM,
            });
        }
        Ok(DensityOp { mat })
    }

    /// Projector onto a pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        DensityOp {
            mat: psi.projector(),
        }
    }

    /// Wraps a matrix whose density-operator invariants the caller has
    /// already established (used by channel application, which validates
    /// with channel-specific tolerances).
    pub(crate) fn new_unchecked(mat: CMatrix) -> Result<Self> {
        debug_assert!(mat.is_square());
        Ok(DensityOp { mat })
    }

    /// Maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let scale = Complex64::new(1.0 / dim as f64, 0.0);
        DensityOp {
            mat: CMatrix::identity(dim).scale(scale),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(herm_eig(&self.mat)?.0)
    }

    /// Errors if any eigenvalue is below `-TOL_PSD`.
    pub fn check_psd(&self) -> Result<()> {
        let eigs = self.eigenvalues()?;
        if let Some(&min) = eigs.last() {
            if min < -TOL_PSD {
                return Err(Error::NotPsd {
                    eigenvalue: min,
                    tol: TOL_PSD,
                });
            }
        }
        Ok(())
    }

    /// Expectation value `Tr(M ρ)` for an arbitrary operator `M`.
    pub fn expectation(&self, m: &CMatrix) -> Complex64 {
        assert_eq!(m.rows(), self.dim(), "expectation dimension mismatch");
        assert_eq!(m.cols(), self.dim(), "expectation dimension mismatch");
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += m[(i, j)] * self.mat[(j, i)];
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let e0 = PureState::basis(4, 0);
        let e2 = PureState::basis(4, 2);
        assert!((e0.inner(&e0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(e0.inner(&e2).norm() < 1e-15);
    }

    #[test]
    fn new_rejects_unnormalized() {
        assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        let ok = PureState::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(ok.dim(), 2);
    }

    #[test]
    fn normalized_recovers_unit_norm() {
        let s = PureState::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((s.amps()[0].re - 0.6).abs() < 1e-15);
        assert!((s.amps()[1].im - 0.8).abs() < 1e-15);
    }

    #[test]
    fn tensor_of_basis_states_is_basis_state() {
        let a = PureState::basis(2, 1);
        let b = PureState::basis(3, 2);
        let t = a.tensor(&b);
        assert_eq!(t.dim(), 6);
        // Index 1*3 + 2 = 5.
        assert!((t.amps()[5] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn projector_is_idempotent_and_unit_trace() {
        let s = PureState::normalized(vec![c(1.0, 0.5), c(-0.25, 1.0), c(0.0, 0.3)]).unwrap();
        let p = s.projector();
        assert!((p.trace().re - 1.0).abs() < 1e-14);
        assert!(p.matmul(&p).max_abs_diff(&p) < 1e-14);
        let rho = DensityOp::new(p).unwrap();
        rho.check_psd().unwrap();
    }

    #[test]
    fn density_rejects_bad_trace_and_non_hermitian() {
        let two_trace = CMatrix::identity(2);
        assert!(DensityOp::new(two_trace).is_err());
        let mut skew = CMatrix::identity(2).scale(c(0.5, 0.0));
        skew[(0, 1)] = c(0.0, 0.3);
        skew[(1, 0)] = c(0.0, 0.3); // not the conjugate
        assert!(DensityOp::new(skew).is_err());
    }

    #[test]
    fn check_psd_flags_negative_eigenvalue() {
        // diag(1.5, -0.5): Hermitian, trace one, not PSD.
        let m = CMatrix::diag(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        let rho = DensityOp::new(m).unwrap();
        assert!(rho.check_psd().is_err());
    }

    #[test]
    fn expectation_matches_projector_overlap() {
        let psi = PureState::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let phi = PureState::basis(2, 0);
        let rho = DensityOp::from_pure(&psi);
        let m = phi.projector();
        let e = rho.expectation(&m);
        assert!((e.re - psi.overlap_sqr(&phi)).abs() < 1e-14);
        assert!(e.im.abs() < 1e-14);
    }
}
