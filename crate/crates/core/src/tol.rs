//! Numerical tolerances used throughout the crate.
//!
//! Every comparison against an ideal algebraic identity goes through one of
//! these named constants so that the accepted numerical slack is visible and
//! uniform. The constants are ordered: structural identities (unitarity,
//! hermiticity, eigendecomposition residuals) are held to `1e-10`, vector
//! norms to `1e-12`, and derived spectral/convexity checks to `1e-9`.

/// Maximum entrywise defect `|U†U - I|` accepted when validating a unitary,
/// and `|ΣA†A - I|` when validating Kraus completeness. Products of a few
/// hundred double-precision matrix multiplications accumulate error well
/// below this at the dimensions we support (≤ 1024).
pub const TOL_UNITARY: f64 = 1e-10;

/// Maximum entrywise defect `|H - H†|` accepted when validating a Hermitian
/// operator.
pub const TOL_HERM: f64 = 1e-10;

/// Maximum residual `‖Hv - λv‖` (and orthonormality defect) accepted from the
/// Jacobi eigensolver, relative to the Frobenius norm of the input.
pub const TOL_EIG: f64 = 1e-10;

/// Maximum deviation of a state-vector norm (or a density-operator trace)
/// from 1. Norms are single accumulated sums, so they are held tighter than
/// matrix-product identities.
pub const TOL_NORM: f64 = 1e-12;

/// Most-negative eigenvalue accepted when validating positive
/// semidefiniteness, and the floor below which Choi spectrum weight is
/// discarded during Kraus rank reduction. Looser than `TOL_EIG` because the
/// spectra checked here come from long chains of channel applications.
pub const TOL_PSD: f64 = 1e-9;

/// Largest imaginary residue accepted on quantities that are real by theory
/// (fidelities, diagonal expectations of Hermitian operators, double-averaged
/// closeness measures). A violation indicates an invalid channel or a bug,
/// never ordinary roundoff.
pub const TOL_IMAG: f64 = 1e-9;

/// Slack applied to theorem inequalities (`measured ≥ bound - TOL_BOUND`,
/// compositions, convexity) so that exact equality cases pass under roundoff.
pub const TOL_BOUND: f64 = 1e-9;
