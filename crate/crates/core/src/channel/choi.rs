//! Transfer-matrix and Choi-spectrum machinery for composing channels and
//! reducing oversized Kraus families.
//!
//! The transfer matrix `T = Σ A ⊗ conj(A)` represents a channel as a single
//! `N²×N²` matrix acting on vectorized operators, so composition becomes a
//! matrix product. The Choi operator is the same data reshuffled,
//! `J[(i,a),(j,b)] = T[(a,b),(i,j)]`; its eigendecomposition yields a minimal
//! Kraus family (at most `N²` operators) for any completely positive map.

use crate::numerics::{herm_eig, CMatrix};
use crate::tol::{TOL_HERM, TOL_PSD};
use crate::{Error, Result};

use super::KrausChannel;

/// Transfer matrix `Σ_m A_m ⊗ conj(A_m)` of a Kraus family.
pub(crate) fn transfer_matrix(ops: &[CMatrix], dim: usize) -> CMatrix {
    let mut t = CMatrix::zeros(dim * dim, dim * dim);
    for a in ops {
        t = &t + &a.kron(&a.conjugate());
    }
    t
}

/// Reshuffles a transfer matrix into the Choi operator
/// `J[(i,a),(j,b)] = Σ_m A_m[a,i]·conj(A_m[b,j]) = T[(a,b),(i,j)]`.
pub(crate) fn choi_from_transfer(t: &CMatrix, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim * dim, dim * dim, |row, col| {
        let (i, a) = (row / dim, row % dim);
        let (j, b) = (col / dim, col % dim);
        t[(a * dim + b, i * dim + j)]
    })
}

/// Extracts a minimal Kraus family from a Choi operator: eigenvectors with
/// eigenvalue above [`TOL_PSD`] become operators `A_s[a,i] = √λ_s·v_s[iN+a]`.
///
/// Errors if the Choi operator has an eigenvalue below `-TOL_PSD` (the map
/// is not completely positive) or is not Hermitian.
pub(crate) fn kraus_from_choi(j: &CMatrix, dim: usize) -> Result<Vec<CMatrix>> {
    j.check_hermitian(TOL_HERM)?;
    let (eigs, v) = herm_eig(j)?;
    if let Some(&min) = eigs.last() {
        if min < -TOL_PSD {
            return Err(Error::NotPsd {
                eigenvalue: min,
                tol: TOL_PSD,
            });
        }
    }
    let mut ops = Vec::new();
    for (s, &lam) in eigs.iter().enumerate() {
        if lam <= TOL_PSD {
            continue;
        }
        let w = lam.sqrt();
        let mut a = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for out in 0..dim {
                a[(out, i)] = v[(i * dim + out, s)] * w;
            }
        }
        ops.push(a);
    }
    if ops.is_empty() {
        return Err(Error::BadParam {
            name: "choi",
            reason: "Choi operator has no spectrum above the PSD floor; not a channel".into(),
        });
    }
    Ok(ops)
}

/// Reduces a Kraus family to a minimal equivalent one via the Choi spectrum.
pub(crate) fn reduce_kraus(ops: &[CMatrix], dim: usize) -> Result<Vec<CMatrix>> {
    let t = transfer_matrix(ops, dim);
    let j = choi_from_transfer(&t, dim);
    kraus_from_choi(&j, dim)
}

/// Choi operator of a channel (unnormalized convention: `Tr J = N`).
pub fn choi_matrix(c: &KrausChannel) -> CMatrix {
    let t = transfer_matrix(c.ops(), c.dim());
    choi_from_transfer(&t, c.dim())
}
