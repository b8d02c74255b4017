//! Average-case closeness measures between a channel and the (inverse)
//! Fourier transform, computed by exact enumeration over basis states —
//! never by sampling.
//!
//! The `S` family grades a decoder channel `C` against the inverse QFT:
//!
//! * `s1`: average probability that `C` maps `|k̂⟩` to outcome `k`;
//! * `s2`: average fidelity of `C(|k⟩⟨k|)` with the reflected Fourier state
//!   `|-k̂⟩`;
//! * `s3`: coherent average `Σ_i |Tr(A_i F_N)/N|²`, equal to the double
//!   average `E_{k,l}⟨k|C(|k̂⟩⟨l̂|)|l⟩` over all `N²` input pairs.
//!
//! The `T` family grades an encoder channel `P` against the forward QFT
//! symmetrically. `s3 ≤ min(s1, s2)` always; the gap is exactly the phase
//! incoherence that outcome-level tests cannot see.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{fourier_basis_state, qft_matrix, KrausChannel, ShiftSpec};
use crate::numerics::CMatrix;
use crate::tol::TOL_IMAG;
use crate::{Error, Result};

/// Mismatch ceiling between the two independent evaluation routes of the
/// coherent measures; larger disagreement indicates a bug, not roundoff.
const ROUTE_TOL: f64 = 1e-9;

fn register_of(c: &KrausChannel) -> Result<ShiftSpec> {
    ShiftSpec::from_dim(c.dim())
}

/// Fourier columns `f_k = F|k⟩` for `k = 0..N`, as amplitude vectors.
fn fourier_columns(n: u32) -> Result<Vec<Vec<Complex64>>> {
    let big_n = 1usize << n;
    (0..big_n as i64)
        .map(|k| Ok(fourier_basis_state(k, n)?.amps().to_vec()))
        .collect()
}

/// `s1`: average over `k` of `⟨k|C(|k̂⟩⟨k̂|)|k⟩` — the probability that the
/// decoder returns the index of the Fourier basis state it was fed.
pub fn s1_measure(c: &KrausChannel) -> Result<f64> {
    let reg = register_of(c)?;
    let cols = fourier_columns(reg.qubits())?;
    let mut acc = 0.0;
    for (k, col) in cols.iter().enumerate() {
        for a in c.ops() {
            acc += a.matvec(col)[k].norm_sqr();
        }
    }
    Ok(acc / reg.dim() as f64)
}

/// `s2`: average over `k` of `⟨-k̂|C(|k⟩⟨k|)|-k̂⟩` — the fidelity of the
/// decoder acting on computational inputs with the ideal image `F†|k⟩`.
pub fn s2_measure(c: &KrausChannel) -> Result<f64> {
    let reg = register_of(c)?;
    let n = reg.qubits();
    let mut acc = 0.0;
    for k in 0..reg.dim() {
        let target = fourier_basis_state(-(k as i64), n)?;
        for a in c.ops() {
            // A|k⟩ is column k of A.
            let overlap: Complex64 = (0..reg.dim())
                .map(|j| target.amps()[j].conj() * a[(j, k)])
                .sum();
            acc += overlap.norm_sqr();
        }
    }
    Ok(acc / reg.dim() as f64)
}

/// Diagonal Fourier elements `x_i[k] = ⟨k|A_i|k̂⟩` per Kraus operator.
fn decoder_diagonals(c: &KrausChannel) -> Result<Vec<Vec<Complex64>>> {
    let reg = register_of(c)?;
    let cols = fourier_columns(reg.qubits())?;
    Ok(c.ops()
        .iter()
        .map(|a| {
            (0..reg.dim())
                .map(|k| a.matvec(&cols[k])[k])
                .collect::<Vec<_>>()
        })
        .collect())
}

/// Encoder diagonals `y_i[k] = ⟨k̂|B_i|k⟩` per Kraus operator.
fn encoder_diagonals(p: &KrausChannel) -> Result<Vec<Vec<Complex64>>> {
    let reg = register_of(p)?;
    let cols = fourier_columns(reg.qubits())?;
    Ok(p.ops()
        .iter()
        .map(|b| {
            (0..reg.dim())
                .map(|k| {
                    (0..reg.dim())
                        .map(|j| cols[k][j].conj() * b[(j, k)])
                        .sum()
                })
                .collect::<Vec<_>>()
        })
        .collect())
}

/// Coherent double average `E_{k,l} Σ_i d_i[k]·conj(d_i[l])`, evaluated
/// honestly over all `N²` index pairs.
fn pairwise_double_average(diags: &[Vec<Complex64>], big_n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..big_n {
        for l in 0..big_n {
            for d in diags {
                acc += d[k] * d[l].conj();
            }
        }
    }
    acc / (big_n * big_n) as f64
}

/// `s3`: the coherent decoder measure `Σ_i |Tr(A_i F_N)/N|²`.
///
/// Evaluated by two independent routes — the trace formula and the direct
/// double average `E_{k,l}⟨k|C(|k̂⟩⟨l̂|)|l⟩` over all `N²` pairs. The double
/// average must be real (its imaginary part beyond [`TOL_IMAG`] reports an
/// invalid channel); disagreement between the routes beyond `1e-9` is an
/// internal bug and panics.
pub fn s3_measure(c: &KrausChannel) -> Result<f64> {
    let reg = register_of(c)?;
    let big_n = reg.dim();
    let diags = decoder_diagonals(c)?;

    let trace_route: f64 = diags
        .iter()
        .map(|d| {
            let mean = d.iter().sum::<Complex64>() / big_n as f64;
            mean.norm_sqr()
        })
        .sum();

    let double = pairwise_double_average(&diags, big_n);
    if double.im.abs() > TOL_IMAG {
        return Err(Error::ImaginaryResidue {
            imag: double.im,
            tol: TOL_IMAG,
        });
    }
    assert!(
        (trace_route - double.re).abs() <= ROUTE_TOL,
        "internal error: s3 evaluation routes disagree ({trace_route} vs {})",
        double.re
    );
    Ok(trace_route)
}

/// `t1`: average over `k` of `⟨-k|P(|k̂⟩⟨k̂|)|-k⟩` — the probability that the
/// encoder maps Fourier states back to the reflected index.
pub fn t1_measure(p: &KrausChannel) -> Result<f64> {
    let reg = register_of(p)?;
    let cols = fourier_columns(reg.qubits())?;
    let mut acc = 0.0;
    for (k, col) in cols.iter().enumerate() {
        let neg = reg.neg(k);
        for b in p.ops() {
            acc += b.matvec(col)[neg].norm_sqr();
        }
    }
    Ok(acc / reg.dim() as f64)
}

/// `t2`: average over `k` of `⟨k̂|P(|k⟩⟨k|)|k̂⟩` — the fidelity of the encoder
/// on computational inputs with the ideal Fourier image.
pub fn t2_measure(p: &KrausChannel) -> Result<f64> {
    let reg = register_of(p)?;
    let diags = encoder_diagonals(p)?;
    let mut acc = 0.0;
    for d in &diags {
        for k in 0..reg.dim() {
            acc += d[k].norm_sqr();
        }
    }
    Ok(acc / reg.dim() as f64)
}

/// `t3`: the coherent encoder measure `Σ_i |Tr(F†B_i)/N|²`, double-route
/// checked exactly like [`s3_measure`].
pub fn t3_measure(p: &KrausChannel) -> Result<f64> {
    let reg = register_of(p)?;
    let big_n = reg.dim();
    let diags = encoder_diagonals(p)?;

    let trace_route: f64 = diags
        .iter()
        .map(|d| {
            let mean = d.iter().sum::<Complex64>() / big_n as f64;
            mean.norm_sqr()
        })
        .sum();

    let double = pairwise_double_average(&diags, big_n);
    if double.im.abs() > TOL_IMAG {
        return Err(Error::ImaginaryResidue {
            imag: double.im,
            tol: TOL_IMAG,
        });
    }
    assert!(
        (trace_route - double.re).abs() <= ROUTE_TOL,
        "internal error: t3 evaluation routes disagree ({trace_route} vs {})",
        double.re
    );
    Ok(trace_route)
}

/// Deviations `η = 1 - measure`.
pub fn eta_s1(c: &KrausChannel) -> Result<f64> {
    Ok(1.0 - s1_measure(c)?)
}
pub fn eta_s2(c: &KrausChannel) -> Result<f64> {
    Ok(1.0 - s2_measure(c)?)
}
pub fn eta_s3(c: &KrausChannel) -> Result<f64> {
    Ok(1.0 - s3_measure(c)?)
}
pub fn eta_t1(p: &KrausChannel) -> Result<f64> {
    Ok(1.0 - t1_measure(p)?)
}
pub fn eta_t2(p: &KrausChannel) -> Result<f64> {
    Ok(1.0 - t2_measure(p)?)
}
pub fn eta_t3(p: &KrausChannel) -> Result<f64> {
    Ok(1.0 - t3_measure(p)?)
}

/// Average probability mass the decoder leaks onto the outcome shifted by
/// `k ≠ 0`: `E_l ⟨k+l|C(|l̂⟩⟨l̂|)|k+l⟩`. Bounded above by `eta_s1`.
pub fn offdiag_leakage(c: &KrausChannel, k: i64) -> Result<f64> {
    let reg = register_of(c)?;
    if reg.reduce(k) == 0 {
        return Err(Error::BadParam {
            name: "k",
            reason: "leakage offset must be non-zero mod N".into(),
        });
    }
    let cols = fourier_columns(reg.qubits())?;
    let mut acc = 0.0;
    for (l, col) in cols.iter().enumerate() {
        let shifted = reg.add(l, k);
        for a in c.ops() {
            acc += a.matvec(col)[shifted].norm_sqr();
        }
    }
    Ok(acc / reg.dim() as f64)
}

/// Coherent decoder measure in an arbitrary orthonormal basis (the columns
/// of `basis`): `E_{k,l} ⟨u_k|C(F|u_k⟩⟨u_l|F†)|u_l⟩`, evaluated over all
/// `N²` pairs. With the computational basis this is exactly the `s3` double
/// average; basis independence of the value is a theorem about the measure,
/// not an assumption of the implementation.
pub fn orthobasis_measure(c: &KrausChannel, basis: &CMatrix) -> Result<f64> {
    let reg = register_of(c)?;
    let big_n = reg.dim();
    if basis.rows() != big_n || basis.cols() != big_n {
        return Err(Error::DimMismatch {
            context: "orthobasis_measure",
            expected: big_n,
            found: basis.rows(),
        });
    }
    basis.expect_unitary()?;
    let f = qft_matrix(reg.qubits())?;

    // z_i[k] = ⟨u_k| A_i |F u_k⟩.
    let mut diags: Vec<Vec<Complex64>> = Vec::with_capacity(c.rank());
    for a in c.ops() {
        let mut z = Vec::with_capacity(big_n);
        for k in 0..big_n {
            let u_k: Vec<Complex64> = (0..big_n).map(|r| basis[(r, k)]).collect();
            let w_k = f.matvec(&u_k);
            let aw = a.matvec(&w_k);
            let val: Complex64 = u_k.iter().zip(&aw).map(|(u, w)| u.conj() * w).sum();
            z.push(val);
        }
        diags.push(z);
    }

    let double = pairwise_double_average(&diags, big_n);
    if double.im.abs() > TOL_IMAG {
        return Err(Error::ImaginaryResidue {
            imag: double.im,
            tol: TOL_IMAG,
        });
    }
    Ok(double.re)
}

/// Joint closeness of a unitary decoder/encoder pair: `|Tr(U_C·U_P)/N|`.
/// Errors unless both channels are unitary.
pub fn cp_trace_measure(c: &KrausChannel, p: &KrausChannel) -> Result<f64> {
    let (uc, up) = match (c.unitary(), p.unitary()) {
        (Some(uc), Some(up)) => (uc, up),
        _ => {
            return Err(Error::BadParam {
                name: "channel",
                reason: "the joint trace measure is defined for unitary channels only".into(),
            })
        }
    };
    if c.dim() != p.dim() {
        return Err(Error::DimMismatch {
            context: "cp_trace_measure",
            expected: c.dim(),
            found: p.dim(),
        });
    }
    Ok((uc.matmul(up).trace() / c.dim() as f64).norm())
}

/// Phase statistics of a family of complex amplitudes with moduli ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCoherence {
    /// `|E_p x_p|²` — the coherent mean square.
    pub mean_sq: f64,
    /// `E_{p,q} cos(θ_p - θ_q)` over all ordered pairs (including `p = q`),
    /// where `θ` is the argument of `x` (zero for zero amplitudes).
    pub cos_avg: f64,
}

/// Computes [`PhaseCoherence`] for a family of amplitudes. Moduli larger
/// than `1 + 1e-12` are rejected.
pub fn phase_coherence(xs: &[Complex64]) -> Result<PhaseCoherence> {
    if xs.is_empty() {
        return Err(Error::BadParam {
            name: "xs",
            reason: "phase statistics need at least one amplitude".into(),
        });
    }
    for x in xs {
        if x.norm() > 1.0 + 1e-12 {
            return Err(Error::BadParam {
                name: "xs",
                reason: format!("amplitude modulus {} exceeds 1", x.norm()),
            });
        }
    }
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<Complex64>() / m;
    let thetas: Vec<f64> = xs
        .iter()
        .map(|x| if x.norm() == 0.0 { 0.0 } else { x.arg() })
        .collect();
    let mut cos_acc = 0.0;
    for &tp in &thetas {
        for &tq in &thetas {
            cos_acc += (tp - tq).cos();
        }
    }
    Ok(PhaseCoherence {
        mean_sq: mean.norm_sqr(),
        cos_avg: cos_acc / (m * m),
    })
}

/// All six measures and their deviations for a decoder/encoder pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub eta_s1: f64,
    pub eta_s2: f64,
    pub eta_s3: f64,
    pub eta_t1: f64,
    pub eta_t2: f64,
    pub eta_t3: f64,
    /// `|Tr(U_C·U_P)/N|` when both channels are unitary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cp_trace: Option<f64>,
}

/// Full report for a decoder/encoder pair; `cp_trace` is present exactly
/// when both channels are unitary.
pub fn report_pair(c: &KrausChannel, p: &KrausChannel) -> Result<ClosenessReport> {
    let (s1, s2, s3) = (s1_measure(c)?, s2_measure(c)?, s3_measure(c)?);
    let (t1, t2, t3) = (t1_measure(p)?, t2_measure(p)?, t3_measure(p)?);
    let cp_trace = if c.is_unitary() && p.is_unitary() && c.dim() == p.dim() {
        Some(cp_trace_measure(c, p)?)
    } else {
        None
    };
    Ok(ClosenessReport {
        s1,
        s2,
        s3,
        t1,
        t2,
        t3,
        eta_s1: 1.0 - s1,
        eta_s2: 1.0 - s2,
        eta_s3: 1.0 - s3,
        eta_t1: 1.0 - t1,
        eta_t2: 1.0 - t2,
        eta_t3: 1.0 - t3,
        cp_trace: None,
    }
    .with_cp(cp_trace))
}

impl ClosenessReport {
    fn with_cp(mut self, cp: Option<f64>) -> Self {
        self.cp_trace = cp;
        self
    }
}

/// Report grading a single channel in both roles (no joint trace).
pub fn report_single(c: &KrausChannel) -> Result<ClosenessReport> {
    let mut rep = report_pair(c, c)?;
    rep.cp_trace = None;
    Ok(rep)
}
