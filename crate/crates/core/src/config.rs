//! TOML experiment configuration: parsing, exhaustive validation, and the
//! canonical hash that ties every report to the exact inputs it came from.
//!
//! Validation is collecting: [`parse_config`] gathers *every* problem it can
//! find into one [`Error::ConfigInvalid`] so a config can be fixed in a
//! single pass.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::MAX_QUBITS;
use crate::hhl::{HHLInstance, ScalarFn};
use crate::noise::{NoiseSpec, PopulationSpec};
use crate::numerics::PureState;
use crate::verify::ShotPlan;
use crate::{Complex64, Error, Result};

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    /// Exact closeness measures for every channel, with the additive and
    /// ordering relations between them checked.
    ClosenessAudit,
    /// Repeated shot-based runs of each protocol against its exact estimand.
    ProtocolCalibration,
    /// Reflection-transport identities relating encoder and decoder
    /// measures under composition.
    TheoremS3,
    /// Pipeline fidelity bounds for dyadic instances (sharp form).
    HhlPerfect,
    /// Pipeline fidelity bounds at good-set windows (general form).
    HhlGeneral,
    /// Unitary decoders paired with their own adjoints.
    HhlUnitaryInverse,
    /// Unitary pairs certified through the cheap tests plus the round-trip
    /// trace.
    HhlCpMode,
    /// The built-in outcome-vs-amplitude separation demonstration.
    AdversarialDemo,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::ClosenessAudit => "closeness_audit",
            SuiteKind::ProtocolCalibration => "protocol_calibration",
            SuiteKind::TheoremS3 => "theorem_s3",
            SuiteKind::HhlPerfect => "hhl_perfect",
            SuiteKind::HhlGeneral => "hhl_general",
            SuiteKind::HhlUnitaryInverse => "hhl_unitary_inverse",
            SuiteKind::HhlCpMode => "hhl_cp_mode",
            SuiteKind::AdversarialDemo => "adversarial_demo",
        }
    }
}

/// Shot-plan parameters; `shots` defaults to the Hoeffding minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanCfg {
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
}

impl PlanCfg {
    pub fn build(&self) -> Result<ShotPlan> {
        match self.shots {
            None => ShotPlan::new(self.epsilon, self.delta),
            Some(s) => ShotPlan::with_shots(self.epsilon, self.delta, s),
        }
    }
}

/// Right-hand side of a pipeline instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RhsCfg {
    /// `(1/√d)·Σ|i⟩`.
    Uniform,
    /// Explicit `[re, im]` pairs; normalized automatically.
    Amplitudes { values: Vec<[f64; 2]> },
}

impl Default for RhsCfg {
    fn default() -> Self {
        RhsCfg::Uniform
    }
}

impl RhsCfg {
    fn build(&self, d: usize) -> Result<PureState> {
        match self {
            RhsCfg::Uniform => Ok(PureState::uniform(d)),
            RhsCfg::Amplitudes { values } => {
                if values.len() != d {
                    return Err(Error::DimMismatch {
                        context: "right-hand side",
                        expected: d,
                        found: values.len(),
                    });
                }
                let amps = values
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                PureState::normalized(amps)
            }
        }
    }
}

/// One pipeline instance, specified by its spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceCfg {
    pub n: u32,
    pub d: usize,
    pub eigenvalues: Vec<f64>,
    /// Seed for a random eigenbasis; omit for a diagonal matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_seed: Option<u64>,
    /// Declare the rescaled spectrum exactly dyadic (enables sharp bounds).
    #[serde(default)]
    pub perfect: bool,
    #[serde(default)]
    pub b: RhsCfg,
    pub f: ScalarFn,
}

impl InstanceCfg {
    pub fn build(&self) -> Result<HHLInstance> {
        HHLInstance::from_spectrum(
            self.n,
            self.d,
            &self.eigenvalues,
            self.basis_seed,
            self.b.build(self.d)?,
            self.f,
            self.perfect,
        )
    }
}

/// A full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    // Scalar fields stay ahead of the table-valued ones so the canonical
    // TOML rendering is valid (values must precede tables).
    /// Config format version; this build reads version 1.
    pub schema_version: u32,
    pub suite: SuiteKind,
    /// Master seed; every stochastic quantity in a run derives from it.
    pub seed: u64,
    /// Good-set windows for the general-form bounds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_values: Vec<usize>,
    /// Repetitions for calibration suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reruns: Option<u32>,
    /// Default report path; the command line can override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<PopulationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<NoiseSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<InstanceCfg>,
}

impl ExperimentConfig {
    /// The built-in demonstration run, used when the demo command is given
    /// no config file.
    pub fn demo_default() -> Self {
        ExperimentConfig {
            schema_version: 1,
            suite: SuiteKind::AdversarialDemo,
            seed: 7,
            k_values: Vec::new(),
            reruns: None,
            out: None,
            plan: None,
            population: None,
            channels: Vec::new(),
            instances: Vec::new(),
        }
    }
}

/// Parses and validates a config, reporting every problem found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::ConfigInvalid {
        errors: vec![e.to_string()],
    })?;
    validate(&cfg)?;
    Ok(cfg)
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    let mut errors = Vec::new();

    if cfg.schema_version != 1 {
        errors.push(format!(
            "schema_version {} is not supported (this build reads version 1)",
            cfg.schema_version
        ));
    }

    if let Some(plan) = &cfg.plan {
        if let Err(e) = plan.build() {
            errors.push(format!("plan: {e}"));
        }
    }

    for (i, k) in cfg.k_values.iter().enumerate() {
        if *k < 2 {
            errors.push(format!("k_values[{i}]: window {k} must be at least 2"));
        }
    }
    if cfg.reruns == Some(0) {
        errors.push("reruns must be at least 1".into());
    }

    for (i, spec) in cfg.channels.iter().enumerate() {
        if let Err(e) = spec.check() {
            errors.push(format!("channels[{i}]: {e}"));
        }
    }

    if let Some(pop) = &cfg.population {
        if pop.families.is_empty() {
            errors.push("population: families must be non-empty".into());
        }
        if pop.n_values.is_empty() {
            errors.push("population: n_values must be non-empty".into());
        }
        for n in &pop.n_values {
            if *n == 0 || *n > MAX_QUBITS {
                errors.push(format!(
                    "population: register width {n} outside 1..={MAX_QUBITS}"
                ));
            }
        }
        if pop.per_cell == 0 {
            errors.push("population: per_cell must be at least 1".into());
        }
        if !(pop.strength.is_finite() && pop.strength > 0.0 && pop.strength <= 1.0) {
            errors.push(format!(
                "population: strength {} outside (0, 1]",
                pop.strength
            ));
        }
    }

    for (i, inst) in cfg.instances.iter().enumerate() {
        if let Err(e) = inst.build() {
            errors.push(format!("instances[{i}]: {e}"));
        }
    }

    let has_channels = !cfg.channels.is_empty() || cfg.population.is_some();
    match cfg.suite {
        SuiteKind::ClosenessAudit | SuiteKind::TheoremS3 => {
            if !has_channels {
                errors.push(format!(
                    "suite {}: needs at least one channel or a population",
                    cfg.suite.name()
                ));
            }
        }
        SuiteKind::ProtocolCalibration => {
            if !has_channels {
                errors.push(format!(
                    "suite {}: needs at least one channel or a population",
                    cfg.suite.name()
                ));
            }
            if cfg.plan.is_none() {
                errors.push("suite protocol_calibration: needs a [plan] table".into());
            }
        }
        SuiteKind::HhlPerfect
        | SuiteKind::HhlGeneral
        | SuiteKind::HhlUnitaryInverse
        | SuiteKind::HhlCpMode => {
            if cfg.channels.is_empty() {
                errors.push(format!(
                    "suite {}: needs at least one [[channels]] entry",
                    cfg.suite.name()
                ));
            }
            if cfg.instances.is_empty() {
                errors.push(format!(
                    "suite {}: needs at least one [[instances]] entry",
                    cfg.suite.name()
                ));
            }
            match cfg.suite {
                SuiteKind::HhlPerfect => {
                    for (i, inst) in cfg.instances.iter().enumerate() {
                        if !inst.perfect {
                            errors.push(format!(
                                "suite hhl_perfect: instances[{i}] must declare perfect = true"
                            ));
                        }
                    }
                }
                SuiteKind::HhlGeneral => {
                    if cfg.k_values.is_empty() {
                        errors.push("suite hhl_general: needs a non-empty k_values list".into());
                    }
                }
                _ => {}
            }
        }
        SuiteKind::AdversarialDemo => {}
    }

    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::ConfigInvalid { errors })
    }
}

/// Canonical serialized form of a config: the TOML rendering of the parsed
/// structure, independent of input formatting and comments.
pub fn canonical_bytes(cfg: &ExperimentConfig) -> Result<Vec<u8>> {
    let text = toml::to_string(cfg).map_err(|e| Error::ConfigInvalid {
        errors: vec![format!("config cannot be canonicalized: {e}")],
    })?;
    Ok(text.into_bytes())
}

/// SHA-256 of [`canonical_bytes`], lowercase hex. Recorded in every report;
/// a seed override changes the hash because it changes the config.
pub fn config_hash(cfg: &ExperimentConfig) -> Result<String> {
    let bytes = canonical_bytes(cfg)?;
    let digest = Sha256::digest(&bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    Ok(out)
}
