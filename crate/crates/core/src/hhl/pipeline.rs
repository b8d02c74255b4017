//! The seven-step solver pipeline on registers
//! `(phase N) ⊗ (system d) ⊗ (ancilla 2)`, basis index `(t·d + s)·2 + a`.
//!
//! For shift `l` the pipeline runs, starting from
//! `|+⟩^{⊗n} ⊗ |b⟩ ⊗ |0⟩`:
//!
//! 1. controlled evolution `Σ_t |t⟩⟨t| ⊗ e^{2πi(A + l/N)t} ⊗ I₂`,
//! 2. the decoder slot (exact `F†`, a unitary stand-in, or a channel),
//! 3. the eigenvalue rotation `Σ_t |t⟩⟨t| ⊗ I_d ⊗ rot(f(((t-l) mod N)/N))`,
//! 4. the encoder slot (exact `F`, a unitary stand-in, or a channel),
//! 5. the inverse controlled evolution,
//! 6. `H^{⊗n} ⊗ I` returning the phase register to `|0ⁿ⟩`.
//!
//! `rot(v)` maps the ancilla `|0⟩ ↦ v|0⟩ + √(1-v²)|1⟩`, so the ancilla-`|0⟩`
//! branch carries the filtered amplitudes `f(σ_j)`.

use num_complex::Complex64;

use super::HHLInstance;
use crate::channel::{apply_lifted, hadamard_transform, qft_matrix, KrausChannel};
use crate::numerics::{CMatrix, DensityOp, PureState};
use crate::tol::TOL_UNITARY;
use crate::{Error, Result};

/// `u ⊗ I_right`.
fn lift_phase(u: &CMatrix, right: usize) -> CMatrix {
    u.kron(&CMatrix::identity(right))
}

/// `|+⟩^{⊗n} ⊗ |b⟩ ⊗ |0⟩`.
fn initial_state(inst: &HHLInstance) -> PureState {
    PureState::uniform(inst.phase_dim())
        .tensor(inst.rhs())
        .tensor(&PureState::basis(2, 0))
}

/// `Σ_t |t⟩⟨t| ⊗ e^{sign·2πi(A + l/N)t} ⊗ I₂`, built from the instance's
/// cached eigendecomposition so dyadic spectra stay numerically exact.
fn controlled_evolution(inst: &HHLInstance, l: usize, sign: f64) -> CMatrix {
    let big_n = inst.phase_dim();
    let d = inst.d();
    let v = inst.basis();
    let tau = 2.0 * std::f64::consts::PI;
    let mut u = CMatrix::zeros(inst.total_dim(), inst.total_dim());
    for t in 0..big_n {
        // block = V · diag(e^{sign·2πi(σ_j + l/N)t}) · V†  (d × d)
        let phases: Vec<Complex64> = inst
            .sigmas()
            .iter()
            .map(|&s| {
                let angle = sign * tau * (s + l as f64 / big_n as f64) * t as f64;
                Complex64::from_polar(1.0, angle)
            })
            .collect();
        for r in 0..d {
            for c in 0..d {
                let mut e = Complex64::new(0.0, 0.0);
                for (j, ph) in phases.iter().enumerate() {
                    e += *ph * v[(r, j)] * v[(c, j)].conj();
                }
                for anc in 0..2 {
                    u[((t * d + r) * 2 + anc, (t * d + c) * 2 + anc)] = e;
                }
            }
        }
    }
    u
}

/// `Σ_t |t⟩⟨t| ⊗ I_d ⊗ rot(f(((t-l) mod N)/N))`.
fn rotation_step(inst: &HHLInstance, l: usize) -> CMatrix {
    let big_n = inst.phase_dim();
    let d = inst.d();
    let mut u = CMatrix::zeros(inst.total_dim(), inst.total_dim());
    for t in 0..big_n {
        let x = (t as i64 - l as i64).rem_euclid(big_n as i64) as f64 / big_n as f64;
        let val = inst.scalar_fn().eval(x, big_n);
        debug_assert!((0.0..=1.0).contains(&val), "filter output {val} outside [0,1]");
        let w = (1.0 - val * val).max(0.0).sqrt();
        for s in 0..d {
            let base = (t * d + s) * 2;
            u[(base, base)] = Complex64::new(val, 0.0);
            u[(base, base + 1)] = Complex64::new(-w, 0.0);
            u[(base + 1, base)] = Complex64::new(w, 0.0);
            u[(base + 1, base + 1)] = Complex64::new(val, 0.0);
        }
    }
    u
}

fn check_slot(inst: &HHLInstance, u: &CMatrix, context: &'static str) -> Result<()> {
    if u.rows() != inst.phase_dim() || u.cols() != inst.phase_dim() {
        return Err(Error::DimMismatch {
            context,
            expected: inst.phase_dim(),
            found: u.rows(),
        });
    }
    u.check_unitary(TOL_UNITARY)
}

/// Pure-state pipeline with arbitrary unitaries in the decoder (`u3`) and
/// encoder (`u5`) slots. The shift `l` is taken mod `N`.
pub fn run_unitary(
    inst: &HHLInstance,
    l: usize,
    u3: &CMatrix,
    u5: &CMatrix,
) -> Result<PureState> {
    check_slot(inst, u3, "decoder slot")?;
    check_slot(inst, u5, "encoder slot")?;
    let l = l % inst.phase_dim();
    let right = 2 * inst.d();
    let mut v = initial_state(inst).amps().to_vec();
    v = controlled_evolution(inst, l, 1.0).matvec(&v);
    v = lift_phase(u3, right).matvec(&v);
    v = rotation_step(inst, l).matvec(&v);
    v = lift_phase(u5, right).matvec(&v);
    v = controlled_evolution(inst, l, -1.0).matvec(&v);
    v = lift_phase(&hadamard_transform(inst.n())?, right).matvec(&v);
    PureState::new(v)
}

/// Reference pipeline: exact `F†` and `F` in the transform slots.
pub fn run_ideal(inst: &HHLInstance, l: usize) -> Result<PureState> {
    let f = qft_matrix(inst.n())?;
    run_unitary(inst, l, &f.dagger(), &f)
}

/// Density-matrix pipeline with the decoder channel `c` and encoder channel
/// `p` in the transform slots.
pub fn run_noisy(
    inst: &HHLInstance,
    c: &KrausChannel,
    p: &KrausChannel,
    l: usize,
) -> Result<DensityOp> {
    for (chan, context) in [(c, "decoder slot"), (p, "encoder slot")] {
        if chan.dim() != inst.phase_dim() {
            return Err(Error::DimMismatch {
                context,
                expected: inst.phase_dim(),
                found: chan.dim(),
            });
        }
    }
    let l = l % inst.phase_dim();
    let right = 2 * inst.d();
    let conjugated = |rho: &DensityOp, u: &CMatrix| -> DensityOp {
        DensityOp::new_unchecked(u.matmul(rho.matrix()).matmul(&u.dagger()))
            .expect("conjugation keeps the matrix square")
    };

    let mut rho = DensityOp::from_pure(&initial_state(inst));
    rho = conjugated(&rho, &controlled_evolution(inst, l, 1.0));
    rho = apply_lifted(c, right, &rho)?;
    rho = conjugated(&rho, &rotation_step(inst, l));
    rho = apply_lifted(p, right, &rho)?;
    rho = conjugated(&rho, &controlled_evolution(inst, l, -1.0));
    rho = conjugated(&rho, &lift_phase(&hadamard_transform(inst.n())?, right));
    Ok(rho)
}
