//! Linear-algebra substrate: matrices, eigensolver, states, and the standard
//! distance/fidelity functionals used by the certification theorems.

pub mod eig;
pub mod matrix;
pub mod state;

pub use eig::{herm_eig, largest_eigenvalue};
pub use matrix::CMatrix;
pub use state::{DensityOp, PureState};

use num_complex::Complex64;

use crate::tol::TOL_IMAG;
use crate::{Error, Result};

/// Which tensor factor `partial_trace` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// Keep the first (left) factor, trace out the second.
    First,
    /// Keep the second (right) factor, trace out the first.
    Second,
}

/// Tensor product of density operators.
pub fn tensor(a: &DensityOp, b: &DensityOp) -> DensityOp {
    let m = a.matrix().kron(b.matrix());
    DensityOp::new(m).expect("tensor product of density operators is a density operator")
}

/// Partial trace of a bipartite density operator on `C^dim_a ⊗ C^dim_b`.
///
/// Index convention: the composite index is `i = a·dim_b + b` (first factor
/// is the slow index), matching [`CMatrix::kron`] and [`PureState::tensor`].
pub fn partial_trace(rho: &DensityOp, dim_a: usize, dim_b: usize, keep: Keep) -> Result<DensityOp> {
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::BadParam {
            name: "dim_a/dim_b",
            reason: "factor dimensions must be positive".into(),
        });
    }
    if dim_a * dim_b != rho.dim() {
        return Err(Error::DimMismatch {
            context: "partial_trace",
            expected: rho.dim(),
            found: dim_a * dim_b,
        });
    }
    let m = rho.matrix();
    let out = match keep {
        Keep::First => CMatrix::from_fn(dim_a, dim_a, |a1, a2| {
            (0..dim_b).map(|b| m[(a1 * dim_b + b, a2 * dim_b + b)]).sum()
        }),
        Keep::Second => CMatrix::from_fn(dim_b, dim_b, |b1, b2| {
            (0..dim_a).map(|a| m[(a * dim_b + b1, a * dim_b + b2)]).sum()
        }),
    };
    DensityOp::new(out)
}

/// Fidelity `⟨ψ|ρ|ψ⟩` between a density operator and a pure state.
///
/// The value is real for Hermitian `ρ`; an imaginary residue beyond
/// [`TOL_IMAG`] is reported as an error. The result is clamped to `[0, 1]`.
pub fn fidelity_pure(rho: &DensityOp, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimMismatch {
            context: "fidelity_pure",
            expected: rho.dim(),
            found: psi.dim(),
        });
    }
    let m = rho.matrix();
    let a = psi.amps();
    let n = psi.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let ai = a[i].conj();
        for j in 0..n {
            acc += ai * m[(i, j)] * a[j];
        }
    }
    if acc.im.abs() > TOL_IMAG {
        return Err(Error::ImaginaryResidue {
            imag: acc.im,
            tol: TOL_IMAG,
        });
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Trace distance `½‖ρ - σ‖₁` between density operators.
pub fn trace_distance(rho: &DensityOp, sigma: &DensityOp) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            context: "trace_distance",
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let (eigs, _) = herm_eig(&diff)?;
    Ok(0.5 * eigs.iter().map(|e| e.abs()).sum::<f64>())
}

/// Two-step fidelity chain bound: given `F(ρ_a, ρ_b) ≥ f_ab` and
/// `F(ρ_b, ρ_c) ≥ f_bc`, returns the implied lower bound
/// `1 - √(1 - f_ab) - √(1 - f_bc)` on `F(ρ_a, ρ_c)`.
///
/// The result is deliberately *not* clamped: a non-positive value means the
/// chain certifies nothing. Inputs outside `[0, 1]` are rejected.
pub fn fidelity_chain_bound(f_ab: f64, f_bc: f64) -> Result<f64> {
    for (name, v) in [("f_ab", f_ab), ("f_bc", f_bc)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::BadParam {
                name: "fidelity",
                reason: format!("{name} = {v} outside [0, 1]"),
            });
        }
    }
    Ok(1.0 - (1.0 - f_ab).sqrt() - (1.0 - f_bc).sqrt())
}

/// Unitary `exp(i·scale·H)` of a Hermitian matrix via eigendecomposition.
pub fn herm_exp_i(h: &CMatrix, scale: f64) -> Result<CMatrix> {
    let (eigs, v) = herm_eig(h)?;
    let n = h.rows();
    let phases: Vec<Complex64> = eigs
        .iter()
        .map(|&lam| Complex64::from_polar(1.0, scale * lam))
        .collect();
    // V · diag(e^{iθλ}) · V†
    let mut scaled = v.clone();
    for c in 0..n {
        for r in 0..n {
            scaled[(r, c)] *= phases[c];
        }
    }
    Ok(scaled.matmul(&v.dagger()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_state() -> PureState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]).unwrap()
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let rho = DensityOp::from_pure(&bell_state());
        for keep in [Keep::First, Keep::Second] {
            let red = partial_trace(&rho, 2, 2, keep).unwrap();
            let target = DensityOp::maximally_mixed(2);
            assert!(red.matrix().max_abs_diff(target.matrix()) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_recovers_product_factors() {
        let a = DensityOp::from_pure(&PureState::normalized(vec![c(1.0, 0.2), c(0.3, -0.4)]).unwrap());
        let b = DensityOp::maximally_mixed(3);
        let joint = tensor(&a, &b);
        let left = partial_trace(&joint, 2, 3, Keep::First).unwrap();
        let right = partial_trace(&joint, 2, 3, Keep::Second).unwrap();
        assert!(left.matrix().max_abs_diff(a.matrix()) < 1e-13);
        assert!(right.matrix().max_abs_diff(b.matrix()) < 1e-13);
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let rho = DensityOp::maximally_mixed(6);
        assert!(partial_trace(&rho, 4, 2, Keep::First).is_err());
        assert!(partial_trace(&rho, 2, 3, Keep::First).is_ok());
    }

    #[test]
    fn fidelity_oracles() {
        let mixed = DensityOp::maximally_mixed(2);
        let zero = PureState::basis(2, 0);
        assert!((fidelity_pure(&mixed, &zero).unwrap() - 0.5).abs() < 1e-14);

        let psi = PureState::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let rho = DensityOp::from_pure(&psi);
        assert!((fidelity_pure(&rho, &psi).unwrap() - 1.0).abs() < 1e-14);

        let orth = PureState::new(vec![
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(0.0, -std::f64::consts::FRAC_1_SQRT_2),
        ])
        .unwrap();
        assert!(fidelity_pure(&rho, &orth).unwrap() < 1e-14);
    }

    #[test]
    fn trace_distance_oracles() {
        let mixed = DensityOp::maximally_mixed(2);
        let zero = DensityOp::from_pure(&PureState::basis(2, 0));
        let one = DensityOp::from_pure(&PureState::basis(2, 1));
        assert!((trace_distance(&mixed, &zero).unwrap() - 0.5).abs() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-14);
    }

    #[test]
    fn chain_bound_oracles() {
        assert!((fidelity_chain_bound(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity_chain_bound(0.99, 0.99).unwrap() - 0.8).abs() < 1e-12);
        // The bound may be vacuous (negative) and must be reported as such.
        let loose = fidelity_chain_bound(0.5, 0.5).unwrap();
        assert!((loose - (1.0 - 2.0 * 0.5f64.sqrt())).abs() < 1e-12);
        assert!(loose < 0.0);
        assert!(fidelity_chain_bound(1.2, 0.5).is_err());
        assert!(fidelity_chain_bound(0.5, -0.1).is_err());
    }

    #[test]
    fn herm_exp_of_pauli_x() {
        let x = CMatrix::from_fn(2, 2, |r, q| if r == q { c(0.0, 0.0) } else { c(1.0, 0.0) });
        // e^{iπX} = -I, e^{i(π/2)X} = iX.
        let m1 = herm_exp_i(&x, std::f64::consts::PI).unwrap();
        assert!(m1.max_abs_diff(&CMatrix::identity(2).scale(c(-1.0, 0.0))) < 1e-13);
        let m2 = herm_exp_i(&x, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(m2.max_abs_diff(&x.scale(c(0.0, 1.0))) < 1e-13);
        m2.expect_unitary().unwrap();
    }

    /// Fuchs–van de Graaf relations with one side pure:
    /// `1 - √F ≤ T ≤ √(1 - F)` and the strengthened `1 - F ≤ T`.
    #[test]
    fn fuchs_van_de_graaf_relations_hold_on_random_pairs() {
        let mut r = rng::substream(0xF00D, "fvdg", 0);
        for trial in 0..200 {
            let dim = 2 + (trial % 3);
            let rho = rng::random_density(dim, &mut r);
            let psi = rng::random_state(dim, &mut r);
            let f = fidelity_pure(&rho, &psi).unwrap();
            let t = trace_distance(&rho, &DensityOp::from_pure(&psi)).unwrap();
            assert!(1.0 - f.sqrt() <= t + 1e-10, "1-√F ≤ T failed: F={f}, T={t}");
            assert!(t <= (1.0 - f).sqrt() + 1e-10, "T ≤ √(1-F) failed: F={f}, T={t}");
            assert!(1.0 - f <= t + 1e-10, "1-F ≤ T failed: F={f}, T={t}");
        }
    }

    /// Soundness of the chain bound: for random mixed ρ and pure σ, ψ,
    /// the actual fidelity F(ρ, ψ) dominates the chained lower bound built
    /// from F(ρ, σ) and |⟨σ|ψ⟩|².
    #[test]
    fn chain_bound_is_sound_on_random_triples() {
        let mut r = rng::substream(0xBEEF, "chain", 0);
        for trial in 0..100 {
            let dim = 2 + (trial % 4);
            let rho = rng::random_density(dim, &mut r);
            let sigma = rng::random_state(dim, &mut r);
            let psi = rng::random_state(dim, &mut r);
            let f_ab = fidelity_pure(&rho, &sigma).unwrap();
            let f_bc = sigma.overlap_sqr(&psi);
            let bound = fidelity_chain_bound(f_ab, f_bc).unwrap();
            let actual = fidelity_pure(&rho, &psi).unwrap();
            assert!(
                actual >= bound - 1e-10,
                "chain bound unsound: actual={actual}, bound={bound}"
            );
        }
    }
}
