//! Shot-based verification protocols.
//!
//! Each protocol prepares a uniformly random basis or Fourier-basis input,
//! runs it through the channel under test, measures in a fixed basis, and
//! counts successes. The per-shot success probability of each protocol
//! *equals* one of the exact closeness measures:
//!
//! | protocol | prepares | succeeds on        | estimates |
//! |----------|----------|--------------------|-----------|
//! | TA1      | `\|k̂⟩`   | outcome `k`        | `s1`      |
//! | TA2      | `\|k⟩`   | `0ⁿ` after `HⁿU_k` | `s2`      |
//! | TP1      | `\|k̂⟩`   | outcome `-k`       | `t1`      |
//! | TP2      | `\|k⟩`   | `0ⁿ` after `HⁿU_₋k`| `t2`      |
//! | CP       | `\|k⟩`   | outcome `k`        | `E_k\|⟨k\|U_CU_P\|k⟩\|²` |
//!
//! Sampling is deterministic: shot `i` draws from `substream(seed, "shot", i)`,
//! so estimates are reproducible and independent of batching.
//!
//! Note the CP protocol estimates the *mean of squared moduli* of the
//! diagonal, which upper-bounds the squared modulus of the mean
//! `cp_trace_measure²`; the two differ exactly when the diagonal phases
//! disagree. Certification must combine this test with phase-sensitive ones.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{fourier_basis_state, hadamard_transform, phase_unitary, KrausChannel, ShiftSpec};
use crate::numerics::CMatrix;
use crate::rng;
use crate::{Error, Result};

/// Sampling budget sized by a Hoeffding two-sided tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotPlan {
    /// Additive accuracy target.
    pub epsilon: f64,
    /// Failure probability target.
    pub delta: f64,
    /// Number of shots; at least [`shots_needed`]`(epsilon, delta)`.
    pub shots: u64,
}

/// Minimum shot count guaranteeing `P(|est - truth| > ε) ≤ δ`:
/// `⌈ln(2/δ) / (2ε²)⌉`.
pub fn shots_needed(epsilon: f64, delta: f64) -> Result<u64> {
    check_eps_delta(epsilon, delta)?;
    let raw = ((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil();
    Ok(raw as u64)
}

fn check_eps_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadParam {
            name: "epsilon",
            reason: format!("accuracy {epsilon} outside (0, 1)"),
        });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParam {
            name: "delta",
            reason: format!("confidence {delta} outside (0, 1)"),
        });
    }
    Ok(())
}

impl ShotPlan {
    /// Plan with exactly the Hoeffding-minimal number of shots.
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        Ok(ShotPlan {
            epsilon,
            delta,
            shots: shots_needed(epsilon, delta)?,
        })
    }

    /// Plan with an explicit shot count, which must meet the minimum.
    pub fn with_shots(epsilon: f64, delta: f64, shots: u64) -> Result<Self> {
        let min = shots_needed(epsilon, delta)?;
        if shots < min {
            return Err(Error::BadParam {
                name: "shots",
                reason: format!("{shots} shots below the Hoeffding minimum {min}"),
            });
        }
        Ok(ShotPlan {
            epsilon,
            delta,
            shots,
        })
    }
}

/// Protocol identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Ta1,
    Ta2,
    Tp1,
    Tp2,
    Cp,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Ta1 => "ta1",
            Protocol::Ta2 => "ta2",
            Protocol::Tp1 => "tp1",
            Protocol::Tp2 => "tp2",
            Protocol::Cp => "cp",
        }
    }
}

/// Outcome of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub protocol: Protocol,
    /// Success frequency over the shots.
    pub estimate: f64,
    pub shots_used: u64,
    pub seed: u64,
    /// `estimate ≥ threshold`, with `threshold = 1 - ε`: the strictest
    /// single-protocol certificate the plan supports (an estimate at least
    /// `1-ε` certifies the exact measure is at least `1-2ε` with confidence
    /// `1-δ`). Joint decisions use [`decide_s3`].
    pub accept: bool,
    pub threshold: f64,
}

/// Per-input-outcome distributions for one (channel, protocol) pair:
/// `dists[k]` is the measurement distribution given input index `k`, and
/// `success[k]` the accepting outcome.
struct OutcomeTables {
    dists: Vec<Vec<f64>>,
    success: Vec<usize>,
}

impl OutcomeTables {
    /// Exact per-shot success probability: the protocol's estimand.
    fn exact_success(&self) -> f64 {
        let n = self.dists.len() as f64;
        self.dists
            .iter()
            .zip(&self.success)
            .map(|(d, &s)| d[s])
            .sum::<f64>()
            / n
    }
}

/// Diagonal of `C(|v⟩⟨v|)` in the computational basis: `Σ_i |A_i v|²`
/// entrywise, clamped nonnegative and sanity-checked to sum to one.
fn outcome_distribution(c: &KrausChannel, input: &[Complex64]) -> Vec<f64> {
    let n = c.dim();
    let mut diag = vec![0.0f64; n];
    for a in c.ops() {
        let av = a.matvec(input);
        for (d, amp) in diag.iter_mut().zip(&av) {
            *d += amp.norm_sqr();
        }
    }
    normalize_distribution(diag)
}

fn normalize_distribution(mut diag: Vec<f64>) -> Vec<f64> {
    for d in &mut diag {
        *d = d.max(0.0);
    }
    let total: f64 = diag.iter().sum();
    assert!(
        (total - 1.0).abs() <= 1e-9,
        "internal error: outcome distribution sums to {total}"
    );
    diag
}

/// Distribution of measuring `W σ W†` in the computational basis, where `W`
/// scales computational columns by `phases` and then applies `H^{⊗n}`:
/// `W = H^{⊗n}·diag(phases)`.
fn conjugated_distribution(sigma: &CMatrix, hada: &CMatrix, phases: &[Complex64]) -> Vec<f64> {
    let n = sigma.rows();
    let mut diag = vec![0.0f64; n];
    for (j, d) in diag.iter_mut().enumerate() {
        // w_j = W† e_j has entries conj(W[j,m]) = conj(H[j,m]·phases[m]).
        let w_j: Vec<Complex64> = (0..n).map(|m| (hada[(j, m)] * phases[m]).conj()).collect();
        let sv = sigma.matvec(&w_j);
        let val: Complex64 = w_j.iter().zip(&sv).map(|(w, s)| w.conj() * s).sum();
        *d = val.re;
    }
    normalize_distribution(diag)
}

fn tables_ta1(c: &KrausChannel) -> Result<OutcomeTables> {
    let reg = ShiftSpec::from_dim(c.dim())?;
    let mut dists = Vec::with_capacity(reg.dim());
    for k in 0..reg.dim() {
        let input = fourier_basis_state(k as i64, reg.qubits())?;
        dists.push(outcome_distribution(c, input.amps()));
    }
    Ok(OutcomeTables {
        dists,
        success: (0..reg.dim()).collect(),
    })
}

fn tables_tp1(p: &KrausChannel) -> Result<OutcomeTables> {
    let reg = ShiftSpec::from_dim(p.dim())?;
    let mut dists = Vec::with_capacity(reg.dim());
    for k in 0..reg.dim() {
        let input = fourier_basis_state(k as i64, reg.qubits())?;
        dists.push(outcome_distribution(p, input.amps()));
    }
    Ok(OutcomeTables {
        dists,
        success: (0..reg.dim()).map(|k| reg.neg(k)).collect(),
    })
}

/// Tables for the conjugated tests: prepare `|k⟩`, apply the channel, then
/// `H^{⊗n}·U_{sign·k}`, accept on all-zeros.
fn tables_conjugated(chan: &KrausChannel, sign: i64) -> Result<OutcomeTables> {
    let reg = ShiftSpec::from_dim(chan.dim())?;
    let n = reg.qubits();
    let hada = hadamard_transform(n)?;
    let mut dists = Vec::with_capacity(reg.dim());
    for k in 0..reg.dim() {
        let mut e_k = vec![Complex64::new(0.0, 0.0); reg.dim()];
        e_k[k] = Complex64::new(1.0, 0.0);
        let sigma = chan.apply_outer(&e_k, &e_k);
        let u = phase_unitary(sign * k as i64, n)?;
        let phases: Vec<Complex64> = (0..reg.dim()).map(|m| u[(m, m)]).collect();
        dists.push(conjugated_distribution(&sigma, &hada, &phases));
    }
    Ok(OutcomeTables {
        dists,
        success: vec![0; reg.dim()],
    })
}

fn tables_cp(c: &KrausChannel, p: &KrausChannel) -> Result<OutcomeTables> {
    let (uc, up) = match (c.unitary(), p.unitary()) {
        (Some(uc), Some(up)) => (uc, up),
        _ => {
            return Err(Error::BadParam {
                name: "channel",
                reason: "the CP round-trip test is defined for unitary channels only".into(),
            })
        }
    };
    if c.dim() != p.dim() {
        return Err(Error::DimMismatch {
            context: "cp protocol",
            expected: c.dim(),
            found: p.dim(),
        });
    }
    let u = uc.matmul(up);
    let n = c.dim();
    let dists = (0..n)
        .map(|k| normalize_distribution((0..n).map(|j| u[(j, k)].norm_sqr()).collect()))
        .collect();
    Ok(OutcomeTables {
        dists,
        success: (0..n).collect(),
    })
}

/// Samples the protocol: shot `i` draws input `k` uniformly and an outcome
/// from `dists[k]`, both from `substream(seed, "shot", i)`.
fn run_tables(
    tables: &OutcomeTables,
    protocol: Protocol,
    plan: &ShotPlan,
    seed: u64,
) -> ProtocolResult {
    let n = tables.dists.len();
    let mut hits: u64 = 0;
    for shot in 0..plan.shots {
        let mut r = rng::substream(seed, "shot", shot);
        let k = r.gen_range(0..n);
        let u: f64 = r.gen();
        let dist = &tables.dists[k];
        let total: f64 = dist.iter().sum();
        let mut acc = 0.0;
        let mut outcome = n - 1;
        for (j, &w) in dist.iter().enumerate() {
            acc += w;
            if u * total < acc {
                outcome = j;
                break;
            }
        }
        if outcome == tables.success[k] {
            hits += 1;
        }
    }
    let estimate = hits as f64 / plan.shots as f64;
    let threshold = 1.0 - plan.epsilon;
    ProtocolResult {
        protocol,
        estimate,
        shots_used: plan.shots,
        seed,
        accept: estimate >= threshold,
        threshold,
    }
}

/// TA1: decoder outcome test (estimates `s1`).
pub fn run_ta1(c: &KrausChannel, plan: &ShotPlan, seed: u64) -> Result<ProtocolResult> {
    Ok(run_tables(&tables_ta1(c)?, Protocol::Ta1, plan, seed))
}

/// TA2: decoder interference test (estimates `s2`).
pub fn run_ta2(c: &KrausChannel, plan: &ShotPlan, seed: u64) -> Result<ProtocolResult> {
    Ok(run_tables(
        &tables_conjugated(c, 1)?,
        Protocol::Ta2,
        plan,
        seed,
    ))
}

/// TP1: encoder outcome test (estimates `t1`).
pub fn run_tp1(p: &KrausChannel, plan: &ShotPlan, seed: u64) -> Result<ProtocolResult> {
    Ok(run_tables(&tables_tp1(p)?, Protocol::Tp1, plan, seed))
}

/// TP2: encoder interference test (estimates `t2`).
pub fn run_tp2(p: &KrausChannel, plan: &ShotPlan, seed: u64) -> Result<ProtocolResult> {
    Ok(run_tables(
        &tables_conjugated(p, -1)?,
        Protocol::Tp2,
        plan,
        seed,
    ))
}

/// CP round-trip test for a unitary pair (estimates
/// `E_k |⟨k|U_C U_P|k⟩|²`).
pub fn run_cp(
    c: &KrausChannel,
    p: &KrausChannel,
    plan: &ShotPlan,
    seed: u64,
) -> Result<ProtocolResult> {
    Ok(run_tables(&tables_cp(c, p)?, Protocol::Cp, plan, seed))
}

/// Exact estimand of each protocol (the quantity shots converge to).
pub fn exact_ta1(c: &KrausChannel) -> Result<f64> {
    Ok(tables_ta1(c)?.exact_success())
}
pub fn exact_ta2(c: &KrausChannel) -> Result<f64> {
    Ok(tables_conjugated(c, 1)?.exact_success())
}
pub fn exact_tp1(p: &KrausChannel) -> Result<f64> {
    Ok(tables_tp1(p)?.exact_success())
}
pub fn exact_tp2(p: &KrausChannel) -> Result<f64> {
    Ok(tables_conjugated(p, -1)?.exact_success())
}
pub fn exact_cp(c: &KrausChannel, p: &KrausChannel) -> Result<f64> {
    Ok(tables_cp(c, p)?.exact_success())
}

/// Joint decision from TA1 and TA2 runs at accuracy `ε` against target
/// deviation `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum S3Decision {
    /// Both estimates cleared `1 - η + ε`: with confidence `1 - 2δ` the
    /// coherent deviation satisfies `eta_s3 ≤ eta_upper = 2η + 2ε`.
    Accept { eta_upper: f64 },
    /// Some estimate fell short: with the same confidence
    /// `eta_s3 > eta_lower = η - 2ε` fails, i.e. the channel is *not*
    /// within `η - 2ε` coherent deviation.
    Reject { eta_lower: f64 },
}

/// Combines TA1/TA2 estimates into a coherent-closeness decision.
///
/// Requires `ε < η/2` (otherwise the accept and reject regions overlap and
/// the test is uninformative) and `η ≤ 1`.
pub fn decide_s3(
    ta1: &ProtocolResult,
    ta2: &ProtocolResult,
    eta: f64,
    epsilon: f64,
) -> Result<S3Decision> {
    if ta1.protocol != Protocol::Ta1 || ta2.protocol != Protocol::Ta2 {
        return Err(Error::BadParam {
            name: "results",
            reason: format!(
                "decide_s3 needs a (ta1, ta2) pair, got ({}, {})",
                ta1.protocol.name(),
                ta2.protocol.name()
            ),
        });
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::BadParam {
            name: "eta",
            reason: format!("target deviation {eta} outside (0, 1]"),
        });
    }
    if !(epsilon > 0.0 && epsilon < eta / 2.0) {
        return Err(Error::BadParam {
            name: "epsilon",
            reason: format!("accuracy {epsilon} must lie in (0, η/2) = (0, {})", eta / 2.0),
        });
    }
    let cut = 1.0 - eta + epsilon;
    if ta1.estimate >= cut && ta2.estimate >= cut {
        Ok(S3Decision::Accept {
            eta_upper: 2.0 * eta + 2.0 * epsilon,
        })
    } else {
        Ok(S3Decision::Reject {
            eta_lower: eta - 2.0 * epsilon,
        })
    }
}
