//! Noise-channel factories: parametrized families of imperfect Fourier
//! transforms used as test subjects throughout the crate.
//!
//! Every family is built around the ideal transform on `n` qubits — the
//! inverse QFT `F†` for channels playing the "decoder" role (`C`), or the
//! forward QFT `F` for channels playing the "encoder" role (`P`) — with a
//! structured deviation:
//!
//! * `diag_after`: phase noise after the transform, `diag(e^{iθ})·F^±`;
//! * `diag_before`: phase noise before the transform, `F^±·diag(e^{iθ})`;
//! * `depolarized`: convex mix with the maximally mixing channel;
//! * `perturbed_unitary`: coherent drift `exp(iεH)·F^±` with random
//!   Hermitian `H` of unit operator norm;
//! * `mixed_unitary`: a random convex mixture of phase-noised transforms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{qft_matrix, KrausChannel, ShiftSpec};
use crate::numerics::{herm_exp_i, CMatrix};
use crate::rng::{self, derive_seed};
use crate::{Error, Result};

use rand::Rng;

/// Which ideal transform the family deviates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Decoder role: the channel approximates the inverse QFT `F†`.
    #[default]
    InverseQft,
    /// Encoder role: the channel approximates the forward QFT `F`.
    Qft,
}

/// Family-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    /// `diag(e^{iθ_k}) · F^±`: phase noise on the output side.
    DiagAfter { thetas: Vec<f64> },
    /// `F^± · diag(e^{iθ_k})`: phase noise on the input side.
    DiagBefore { thetas: Vec<f64> },
    /// `(1-p)·F^± ρ (F^±)† + p·I/N`.
    Depolarized { p: f64 },
    /// `exp(iεH) · F^±` with `H` random Hermitian, `‖H‖ = 1`.
    PerturbedUnitary { eps: f64 },
    /// Convex mixture of `components` phase-noised transforms with random
    /// weights; phases drawn uniformly from `[-π·spread, π·spread]`.
    MixedUnitary { components: usize, spread: f64 },
}

impl NoiseKind {
    /// Short family name for case identifiers.
    pub fn family_name(&self) -> &'static str {
        match self {
            NoiseKind::DiagAfter { .. } => "diag_after",
            NoiseKind::DiagBefore { .. } => "diag_before",
            NoiseKind::Depolarized { .. } => "depolarized",
            NoiseKind::PerturbedUnitary { .. } => "perturbed_unitary",
            NoiseKind::MixedUnitary { .. } => "mixed_unitary",
        }
    }

    /// True for families whose construction consumes randomness.
    pub fn needs_seed(&self) -> bool {
        matches!(
            self,
            NoiseKind::PerturbedUnitary { .. } | NoiseKind::MixedUnitary { .. }
        )
    }
}

/// Complete, buildable description of one noise channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub kind: NoiseKind,
    /// Register width in qubits.
    pub n: u32,
    /// Construction seed; required when [`NoiseKind::needs_seed`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Which ideal transform the channel approximates.
    #[serde(default)]
    pub target: Target,
}

impl NoiseSpec {
    /// Builds the channel this spec describes.
    pub fn build(&self) -> Result<KrausChannel> {
        make_channel(self)
    }

    /// Validates the spec's parameters without constructing the channel,
    /// applying the same rules the builders enforce.
    pub fn check(&self) -> Result<()> {
        if self.kind.needs_seed() && self.seed.is_none() {
            return Err(Error::BadParam {
                name: "seed",
                reason: format!(
                    "family `{}` is randomized and requires a seed",
                    self.kind.family_name()
                ),
            });
        }
        match &self.kind {
            NoiseKind::DiagAfter { thetas } | NoiseKind::DiagBefore { thetas } => {
                check_thetas(thetas, self.n).map(|_| ())
            }
            NoiseKind::Depolarized { p } => {
                ShiftSpec::new(self.n)?;
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::BadParam {
                        name: "p",
                        reason: format!("depolarizing weight {p} outside [0, 1]"),
                    });
                }
                Ok(())
            }
            NoiseKind::PerturbedUnitary { eps } => {
                ShiftSpec::new(self.n)?;
                if !(0.0..=1.0).contains(eps) {
                    return Err(Error::BadParam {
                        name: "eps",
                        reason: format!("perturbation strength {eps} outside [0, 1]"),
                    });
                }
                Ok(())
            }
            NoiseKind::MixedUnitary { components, spread } => {
                ShiftSpec::new(self.n)?;
                if *components == 0 || *components > 64 {
                    return Err(Error::BadParam {
                        name: "components",
                        reason: format!("component count {components} outside 1..=64"),
                    });
                }
                if !(0.0..=1.0).contains(spread) {
                    return Err(Error::BadParam {
                        name: "spread",
                        reason: format!("phase spread {spread} outside [0, 1]"),
                    });
                }
                Ok(())
            }
        }
    }
}

/// The ideal transform matrix for a target on `n` qubits.
fn target_matrix(target: Target, n: u32) -> Result<CMatrix> {
    let f = qft_matrix(n)?;
    Ok(match target {
        Target::InverseQft => f.dagger(),
        Target::Qft => f,
    })
}

fn check_thetas(thetas: &[f64], n: u32) -> Result<ShiftSpec> {
    let spec = ShiftSpec::new(n)?;
    if thetas.len() != spec.dim() {
        return Err(Error::BadParam {
            name: "thetas",
            reason: format!(
                "expected {} phases for n = {n}, got {}",
                spec.dim(),
                thetas.len()
            ),
        });
    }
    for t in thetas {
        if !t.is_finite() {
            return Err(Error::BadParam {
                name: "thetas",
                reason: "phases must be finite".into(),
            });
        }
    }
    Ok(spec)
}

fn phase_diag(thetas: &[f64]) -> CMatrix {
    let entries: Vec<Complex64> = thetas
        .iter()
        .map(|&t| Complex64::from_polar(1.0, t))
        .collect();
    CMatrix::diag(&entries)
}

/// `diag(e^{iθ}) · F^±` with the diagonal applied after the transform.
pub fn make_diag_after(thetas: &[f64], n: u32, target: Target) -> Result<KrausChannel> {
    check_thetas(thetas, n)?;
    let u = phase_diag(thetas).matmul(&target_matrix(target, n)?);
    crate::channel::unitary_channel(&u)
}

/// `F^± · diag(e^{iθ})` with the diagonal applied before the transform.
pub fn make_diag_before(thetas: &[f64], n: u32, target: Target) -> Result<KrausChannel> {
    check_thetas(thetas, n)?;
    let u = target_matrix(target, n)?.matmul(&phase_diag(thetas));
    crate::channel::unitary_channel(&u)
}

/// Depolarized transform: `ρ ↦ (1-p)·UρU† + p·I/N`.
///
/// Built as an exactly minimal Kraus family of `N²` operators using the
/// Weyl–Heisenberg twirl `Σ_{a,b} X^aZ^b ρ (X^aZ^b)†/N² = Tr(ρ)·I/N`:
/// the identity-word term merges with the coherent part, so no Choi
/// reduction is needed.
pub fn make_depolarized(p: f64, n: u32, target: Target) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParam {
            name: "p",
            reason: format!("depolarizing weight {p} outside [0, 1]"),
        });
    }
    let spec = ShiftSpec::new(n)?;
    let big_n = spec.dim();
    let u = target_matrix(target, n)?;
    let nn = (big_n * big_n) as f64;

    let mut ops = Vec::with_capacity(big_n * big_n);
    ops.push(u.scale(Complex64::new((1.0 - p + p / nn).sqrt(), 0.0)));
    let w = (p / nn).sqrt();
    if w > 0.0 {
        let step = 2.0 * std::f64::consts::PI / big_n as f64;
        for a in 0..big_n {
            for b in 0..big_n {
                if a == 0 && b == 0 {
                    continue;
                }
                // X^a Z^b : |j⟩ ↦ ω^{bj} |j+a⟩, composed with U on the right.
                let mut pauli = CMatrix::zeros(big_n, big_n);
                for j in 0..big_n {
                    let phase = Complex64::from_polar(w, step * ((b * j) % big_n) as f64);
                    pauli[(spec.add(j, a as i64), j)] = phase;
                }
                ops.push(pauli.matmul(&u));
            }
        }
    }
    KrausChannel::new(ops)
}

/// Coherently perturbed transform `exp(iεH)·F^±`, `H` random Hermitian with
/// unit operator norm drawn from `substream(seed, "perturb", 0)`.
pub fn make_perturbed_unitary(eps: f64, n: u32, seed: u64, target: Target) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::BadParam {
            name: "eps",
            reason: format!("perturbation strength {eps} outside [0, 1]"),
        });
    }
    let spec = ShiftSpec::new(n)?;
    let mut r = rng::substream(seed, "perturb", 0);
    let h = rng::random_hermitian_unit_norm(spec.dim(), &mut r);
    let drift = herm_exp_i(&h, eps)?;
    crate::channel::unitary_channel(&drift.matmul(&target_matrix(target, n)?))
}

/// Random convex mixture of `components` phase-noised transforms
/// `{√q_i · diag(e^{iθ_i})·F^±}` with weights and phases drawn from
/// `substream(seed, "mixed", 0)`.
pub fn make_mixed_unitary(
    components: usize,
    spread: f64,
    n: u32,
    seed: u64,
    target: Target,
) -> Result<KrausChannel> {
    if components == 0 || components > 64 {
        return Err(Error::BadParam {
            name: "components",
            reason: format!("component count {components} outside 1..=64"),
        });
    }
    if !(0.0..=1.0).contains(&spread) {
        return Err(Error::BadParam {
            name: "spread",
            reason: format!("phase spread {spread} outside [0, 1]"),
        });
    }
    let spec = ShiftSpec::new(n)?;
    let big_n = spec.dim();
    let u = target_matrix(target, n)?;
    let mut r = rng::substream(seed, "mixed", 0);

    let raw: Vec<f64> = (0..components).map(|_| r.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut ops = Vec::with_capacity(components);
    for q in raw {
        let weight = (q / total).sqrt();
        let thetas: Vec<f64> = (0..big_n)
            .map(|_| r.gen_range(-std::f64::consts::PI * spread..=std::f64::consts::PI * spread))
            .collect();
        ops.push(phase_diag(&thetas).scale(Complex64::new(weight, 0.0)).matmul(&u));
    }
    KrausChannel::new(ops)
}

/// Builds the channel described by a [`NoiseSpec`].
pub fn make_channel(spec: &NoiseSpec) -> Result<KrausChannel> {
    let seed = match (spec.kind.needs_seed(), spec.seed) {
        (true, None) => {
            return Err(Error::BadParam {
                name: "seed",
                reason: format!(
                    "family `{}` is randomized and requires a seed",
                    spec.kind.family_name()
                ),
            })
        }
        (_, s) => s.unwrap_or(0),
    };
    match &spec.kind {
        NoiseKind::DiagAfter { thetas } => make_diag_after(thetas, spec.n, spec.target),
        NoiseKind::DiagBefore { thetas } => make_diag_before(thetas, spec.n, spec.target),
        NoiseKind::Depolarized { p } => make_depolarized(*p, spec.n, spec.target),
        NoiseKind::PerturbedUnitary { eps } => {
            make_perturbed_unitary(*eps, spec.n, seed, spec.target)
        }
        NoiseKind::MixedUnitary { components, spread } => {
            make_mixed_unitary(*components, *spread, spec.n, seed, spec.target)
        }
    }
}

/// Builds an encoder-role channel: the spec with its target forced to the
/// forward QFT.
pub fn make_p_channel(spec: &NoiseSpec) -> Result<KrausChannel> {
    let mut forward = spec.clone();
    forward.target = Target::Qft;
    make_channel(&forward)
}

/// The adversarial phase preset on two qubits: alternating output phases
/// `(0, π, 0, π)` after an exact inverse QFT.
///
/// This channel decodes every Fourier basis state to the correct
/// computational outcome (so diagonal-outcome tests accept it with
/// probability one) while its output phases are engineered to average to
/// zero, destroying every coherent superposition — the canonical separation
/// between outcome-level and amplitude-level closeness.
pub fn adversarial_preset() -> NoiseSpec {
    NoiseSpec {
        kind: NoiseKind::DiagAfter {
            thetas: vec![0.0, std::f64::consts::PI, 0.0, std::f64::consts::PI],
        },
        n: 2,
        seed: None,
        target: Target::InverseQft,
    }
}

/// Identifier of a noise family, for population grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DiagAfter,
    DiagBefore,
    Depolarized,
    PerturbedUnitary,
    MixedUnitary,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::DiagAfter,
        Family::DiagBefore,
        Family::Depolarized,
        Family::PerturbedUnitary,
        Family::MixedUnitary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::DiagAfter => "diag_after",
            Family::DiagBefore => "diag_before",
            Family::Depolarized => "depolarized",
            Family::PerturbedUnitary => "perturbed_unitary",
            Family::MixedUnitary => "mixed_unitary",
        }
    }
}

/// Deterministic population grid: `per_cell` channels for each
/// `(family, n)` pair, with strengths spread over `(0, strength]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub families: Vec<Family>,
    pub n_values: Vec<u32>,
    pub per_cell: usize,
    /// Upper end of the noise-strength grid (phase spread fraction,
    /// depolarizing weight, or perturbation strength, by family).
    pub strength: f64,
    pub seed: u64,
    #[serde(default)]
    pub target: Target,
}

/// Expands a population grid into concrete channel specs. The expansion is
/// a pure function of the spec: element `i` is identical across calls.
pub fn population(spec: &PopulationSpec) -> Result<Vec<NoiseSpec>> {
    if spec.per_cell == 0 {
        return Err(Error::BadParam {
            name: "per_cell",
            reason: "population cells must be non-empty".into(),
        });
    }
    if !(0.0..=1.0).contains(&spec.strength) || spec.strength == 0.0 {
        return Err(Error::BadParam {
            name: "strength",
            reason: format!("strength {} outside (0, 1]", spec.strength),
        });
    }
    let mut out = Vec::new();
    let mut counter: u64 = 0;
    for &family in &spec.families {
        for &n in &spec.n_values {
            let reg = ShiftSpec::new(n)?;
            for idx in 0..spec.per_cell {
                // Strength grid over (0, strength]; deterministic per index.
                let level = spec.strength * (idx + 1) as f64 / spec.per_cell as f64;
                let kind = match family {
                    Family::DiagAfter | Family::DiagBefore => {
                        let mut r = rng::substream(spec.seed, "pop-thetas", counter);
                        let thetas: Vec<f64> = (0..reg.dim())
                            .map(|_| {
                                r.gen_range(
                                    -std::f64::consts::PI * level..=std::f64::consts::PI * level,
                                )
                            })
                            .collect();
                        if family == Family::DiagAfter {
                            NoiseKind::DiagAfter { thetas }
                        } else {
                            NoiseKind::DiagBefore { thetas }
                        }
                    }
                    Family::Depolarized => NoiseKind::Depolarized { p: level },
                    Family::PerturbedUnitary => NoiseKind::PerturbedUnitary { eps: level },
                    Family::MixedUnitary => NoiseKind::MixedUnitary {
                        components: 2 + (idx % 3),
                        spread: level,
                    },
                };
                out.push(NoiseSpec {
                    kind,
                    n,
                    seed: Some(derive_seed(spec.seed, "pop-member", counter)),
                    target: spec.target,
                });
                counter += 1;
            }
        }
    }
    Ok(out)
}
