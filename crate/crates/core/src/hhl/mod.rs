//! Linear-system pipeline instances and the spectral analysis behind the
//! shift-averaged certification bounds.
//!
//! An [`HHLInstance`] bundles a Hermitian matrix `A` with spectrum in
//! `[0, 1)`, a right-hand side `|b⟩`, and a scalar filter `f` applied to the
//! estimated eigenvalues. The seven-step pipeline in [`pipeline`] runs it on
//! the register layout `(phase N) ⊗ (system d) ⊗ (ancilla 2)`, with the two
//! transform slots filled either by the exact transforms or by the channels
//! under test; [`ensemble`] averages over the `N` spectral shifts
//! `A ↦ A + l/N·I` and compares the result against closeness-derived bounds.

mod ensemble;
mod pipeline;

pub use ensemble::{
    ensemble_cp_mode, ensemble_fidelity, ensemble_unitary_inverse, expectation_error,
    expectation_error_batch, CpLemma, EnsembleMode, EnsembleResult, ExpectationError,
};
pub use pipeline::{run_ideal, run_noisy, run_unitary};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{qft_matrix, KrausChannel, ShiftSpec};
use crate::closeness;
use crate::numerics::{herm_eig, CMatrix, PureState};
use crate::rng;
use crate::tol::{TOL_BOUND, TOL_HERM};
use crate::{Error, Result};

/// Scalar filter applied to the recovered eigenvalue estimate `x = t/N`.
/// Values must land in `[0, 1]` since they become rotation amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    /// `f(x) = x`.
    Identity,
    /// `f(x) = 1` — the ancilla is left untouched.
    One,
    /// `f(x) = 0` — the ancilla is flipped unconditionally.
    Zero,
    /// The usual matrix-inversion filter: zero below `cutoff/N`, then
    /// `(cutoff/N)/x` capped at one.
    TruncatedInverse { cutoff: f64 },
}

impl ScalarFn {
    /// Evaluates the filter at `x ∈ [0, 1)` for a phase register of
    /// dimension `phase_dim`.
    pub fn eval(&self, x: f64, phase_dim: usize) -> f64 {
        match *self {
            ScalarFn::Identity => x,
            ScalarFn::One => 1.0,
            ScalarFn::Zero => 0.0,
            ScalarFn::TruncatedInverse { cutoff } => {
                let thresh = cutoff / phase_dim as f64;
                if x < thresh {
                    0.0
                } else {
                    (thresh / x).min(1.0)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let ScalarFn::TruncatedInverse { cutoff } = *self {
            if !(cutoff.is_finite() && cutoff > 0.0) {
                return Err(Error::BadParam {
                    name: "cutoff",
                    reason: format!("truncation cutoff {cutoff} must be positive and finite"),
                });
            }
        }
        Ok(())
    }
}

/// A linear-system instance prepared for the pipeline: `A` (Hermitian,
/// spectrum in `[0, 1)`), right-hand side `|b⟩`, filter `f`, and whether the
/// rescaled spectrum is exactly dyadic (`σ·N ∈ ℤ`, the "perfect" case for
/// which the sharp bounds hold).
#[derive(Debug, Clone)]
pub struct HHLInstance {
    n: u32,
    d: usize,
    a: CMatrix,
    b: PureState,
    f: ScalarFn,
    perfect: bool,
    sigmas: Vec<f64>,
    eigvecs: CMatrix,
    betas: Vec<Complex64>,
}

impl HHLInstance {
    pub fn new(
        n: u32,
        d: usize,
        a: CMatrix,
        b: PureState,
        f: ScalarFn,
        perfect: bool,
    ) -> Result<Self> {
        let reg = ShiftSpec::new(n)?;
        if d == 0 {
            return Err(Error::BadParam {
                name: "d",
                reason: "system dimension must be at least 1".into(),
            });
        }
        if a.rows() != d || a.cols() != d {
            return Err(Error::DimMismatch {
                context: "instance matrix",
                expected: d,
                found: a.rows(),
            });
        }
        a.check_hermitian(TOL_HERM)?;
        if b.dim() != d {
            return Err(Error::DimMismatch {
                context: "instance right-hand side",
                expected: d,
                found: b.dim(),
            });
        }
        f.validate()?;
        let (sigmas, eigvecs) = herm_eig(&a)?;
        let big_n = reg.dim() as f64;
        for &s in &sigmas {
            if !(s.is_finite() && (0.0..1.0).contains(&s)) {
                return Err(Error::BadParam {
                    name: "eigenvalues",
                    reason: format!("eigenvalue {s} outside [0, 1)"),
                });
            }
            if perfect && (s * big_n - (s * big_n).round()).abs() > TOL_BOUND {
                return Err(Error::BadParam {
                    name: "perfect",
                    reason: format!(
                        "eigenvalue {s} is not dyadic at phase dimension {big_n}"
                    ),
                });
            }
        }
        // β_j = ⟨u_j|b⟩ with u_j the j-th eigenvector column.
        let betas = (0..d)
            .map(|j| {
                (0..d)
                    .map(|i| eigvecs[(i, j)].conj() * b.amps()[i])
                    .sum::<Complex64>()
            })
            .collect();
        Ok(HHLInstance {
            n,
            d,
            a,
            b,
            f,
            perfect,
            sigmas,
            eigvecs,
            betas,
        })
    }

    /// Builds the instance from a prescribed spectrum: `A = V·diag(σ)·V†`
    /// with `V` either the identity (`basis_seed: None`) or a seeded random
    /// orthonormal basis.
    pub fn from_spectrum(
        n: u32,
        d: usize,
        spectrum: &[f64],
        basis_seed: Option<u64>,
        b: PureState,
        f: ScalarFn,
        perfect: bool,
    ) -> Result<Self> {
        if spectrum.len() != d {
            return Err(Error::DimMismatch {
                context: "instance spectrum",
                expected: d,
                found: spectrum.len(),
            });
        }
        let v = match basis_seed {
            None => CMatrix::identity(d),
            Some(seed) => rng::random_basis(d, &mut rng::substream(seed, "hhl-basis", 0)),
        };
        let diag: Vec<Complex64> = spectrum.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        let a = v.matmul(&CMatrix::diag(&diag)).matmul(&v.dagger());
        HHLInstance::new(n, d, a, b, f, perfect)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Phase-register dimension `N = 2^n`.
    pub fn phase_dim(&self) -> usize {
        1 << self.n
    }

    /// System dimension `d`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Full register dimension `N·d·2`.
    pub fn total_dim(&self) -> usize {
        self.phase_dim() * self.d * 2
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &PureState {
        &self.b
    }

    pub fn scalar_fn(&self) -> ScalarFn {
        self.f
    }

    pub fn is_perfect(&self) -> bool {
        self.perfect
    }

    /// Eigenvalues of `A`, descending.
    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Eigenvector columns matching [`sigmas`](Self::sigmas).
    pub fn basis(&self) -> &CMatrix {
        &self.eigvecs
    }

    /// Eigenbasis amplitudes of the right-hand side, `β_j = ⟨u_j|b⟩`.
    pub fn betas(&self) -> &[Complex64] {
        &self.betas
    }
}

/// The built-in demonstration instance: `n = 2`, `A = diag(1/4, 1/2)`,
/// `|b⟩ = (|0⟩+|1⟩)/√2`, identity filter — dyadic, so the sharp bounds apply.
pub fn demo_instance() -> HHLInstance {
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let b = PureState::new(vec![Complex64::new(amp, 0.0); 2]).expect("unit norm");
    HHLInstance::from_spectrum(2, 2, &[0.25, 0.5], None, b, ScalarFn::Identity, true)
        .expect("demo instance parameters are valid")
}

/// Fourier-tail analysis of one rescaled eigenvalue: the window of `2K`
/// estimates around `⌊σN⌋`, the full overlap coefficients
/// `α_g = (1/N)·Σ_j e^{2πij(σ - g/N)}`, and the weight escaping the window.
#[derive(Debug, Clone)]
pub struct GoodSet {
    pub sigma: f64,
    /// `⌊σN⌋`.
    pub anchor: usize,
    /// The window `{⌊σN⌋-K+1, …, ⌊σN⌋+K} mod N`, deduplicated and sorted.
    pub members: Vec<usize>,
    /// All `N` overlap coefficients.
    pub alphas: Vec<Complex64>,
    /// `1 - Σ_{g ∈ members} |α_g|²`, clamped nonnegative.
    pub tail: f64,
}

/// Computes the good set of `sigma` at window parameter `K ≥ 2`, checking
/// the guaranteed tail decay `tail ≤ 2/(K-1)`.
pub fn good_set(sigma: f64, n: u32, k_param: usize) -> Result<GoodSet> {
    let reg = ShiftSpec::new(n)?;
    if k_param < 2 {
        return Err(Error::BadParam {
            name: "k_param",
            reason: format!("window parameter {k_param} must be at least 2"),
        });
    }
    if !(sigma.is_finite() && (0.0..1.0).contains(&sigma)) {
        return Err(Error::BadParam {
            name: "sigma",
            reason: format!("eigenvalue {sigma} outside [0, 1)"),
        });
    }
    let big_n = reg.dim();
    let anchor = ((sigma * big_n as f64).floor() as usize).min(big_n - 1);
    let mut members: Vec<usize> = ((anchor as i64 - k_param as i64 + 1)
        ..=(anchor as i64 + k_param as i64))
        .map(|g| reg.reduce(g))
        .collect();
    members.sort_unstable();
    members.dedup();

    let step = 2.0 * std::f64::consts::PI;
    let alphas: Vec<Complex64> = (0..big_n)
        .map(|g| {
            let x = sigma - g as f64 / big_n as f64;
            let sum: Complex64 = (0..big_n)
                .map(|j| Complex64::from_polar(1.0, step * x * j as f64))
                .sum();
            sum / big_n as f64
        })
        .collect();
    let captured: f64 = members.iter().map(|&g| alphas[g].norm_sqr()).sum();
    let tail = (1.0 - captured).max(0.0);
    assert!(
        tail <= 2.0 / (k_param as f64 - 1.0) + TOL_BOUND,
        "internal error: spectral tail {tail} exceeds 2/(K-1) at K={k_param}"
    );
    Ok(GoodSet {
        sigma,
        anchor,
        members,
        alphas,
        tail,
    })
}

/// Good sets for every eigenvalue of an instance, with the aggregate tail
/// weighted by the right-hand side's eigenbasis mass.
#[derive(Debug, Clone)]
pub struct GoodSetDecomposition {
    pub k_param: usize,
    pub sets: Vec<GoodSet>,
    /// `Σ_j |β_j|² · tail_j`.
    pub tail: f64,
}

pub fn good_set_decompose(inst: &HHLInstance, k_param: usize) -> Result<GoodSetDecomposition> {
    let sets: Vec<GoodSet> = inst
        .sigmas()
        .iter()
        .map(|&s| good_set(s, inst.n(), k_param))
        .collect::<Result<_>>()?;
    let tail = inst
        .betas()
        .iter()
        .zip(&sets)
        .map(|(beta, set)| beta.norm_sqr() * set.tail)
        .sum();
    Ok(GoodSetDecomposition {
        k_param,
        sets,
        tail,
    })
}

/// Shift-averaged decoding-error identity for one eigenvalue.
///
/// For the phase states `ψ_l = Σ_g α_g |ĝ+l⟩` and their rounded versions
/// `φ_l = Σ_g α_g |g+l⟩`, the per-operator error
/// `Err_i = E_l⟨φ_l|A_i|ψ_l⟩ - (1-δ)·Tr(A_i F)/N` must satisfy
/// `Σ_i |Err_i|² ≤ 2η|G|² + 18δ`, with `η` the coherent deviation of the
/// channel and `δ` the good-set tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaErr {
    pub lhs: f64,
    pub rhs: f64,
    pub tail: f64,
    pub holds: bool,
}

pub fn lemma_err(c: &KrausChannel, sigma: f64, k_param: usize) -> Result<LemmaErr> {
    let reg = ShiftSpec::from_dim(c.dim())?;
    let big_n = reg.dim();
    let gs = good_set(sigma, reg.qubits(), k_param)?;
    let delta = gs.tail;
    let f = qft_matrix(reg.qubits())?;

    // E_l ⟨φ_l|A_i|ψ_l⟩ accumulated per operator.
    let mut terms = vec![Complex64::new(0.0, 0.0); c.rank()];
    for l in 0..big_n {
        // ψ_l[t] = Σ_g α_g · F[t, g+l];  φ_l[(g+l) mod N] = α_g.
        let mut psi = vec![Complex64::new(0.0, 0.0); big_n];
        let mut phi = vec![Complex64::new(0.0, 0.0); big_n];
        for (g, &alpha) in gs.alphas.iter().enumerate() {
            let shifted = reg.add(g, l as i64);
            for (t, p) in psi.iter_mut().enumerate() {
                *p += alpha * f[(t, shifted)];
            }
            phi[shifted] += alpha;
        }
        for (term, op) in terms.iter_mut().zip(c.ops()) {
            let av = op.matvec(&psi);
            let overlap: Complex64 = phi.iter().zip(&av).map(|(p, a)| p.conj() * a).sum();
            *term += overlap / big_n as f64;
        }
    }

    let mut lhs = 0.0;
    for (term, op) in terms.iter().zip(c.ops()) {
        let trace_part = op.matmul(&f).trace() / big_n as f64;
        lhs += (term - trace_part * (1.0 - delta)).norm_sqr();
    }
    let eta = closeness::eta_s3(c)?;
    let g_size = gs.members.len() as f64;
    let rhs = 2.0 * eta * g_size * g_size + 18.0 * delta;
    Ok(LemmaErr {
        lhs,
        rhs,
        tail: delta,
        holds: lhs <= rhs + TOL_BOUND,
    })
}
