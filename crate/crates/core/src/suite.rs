//! Suite orchestration: expands a validated config into cases, runs them,
//! and assembles the report.
//!
//! Determinism: every stochastic quantity inside a suite derives from the
//! config's master seed through labeled substreams, so a rerun of the same
//! config produces identical measured values (and identical tabular
//! reports).
//!
//! Suites that pair channels with pipeline instances take the cartesian
//! product of compatible combinations (matching register width) and fail if
//! nothing is compatible, rather than reporting a trivially green run.

use crate::channel::{compose, qft_channel, reflection_channel, ShiftSpec};
use crate::closeness;
use crate::config::{ExperimentConfig, SuiteKind};
use crate::hhl::{
    demo_instance, ensemble_cp_mode, ensemble_fidelity, ensemble_unitary_inverse, EnsembleResult,
};
use crate::noise::{self, adversarial_preset, make_p_channel, NoiseSpec};
use crate::report::{CaseResult, ReportRecord};
use crate::rng::derive_seed;
use crate::tol::TOL_BOUND;
use crate::verify::{self, Protocol, ShotPlan};
use crate::{Error, Result};

/// Runs the configured suite and assembles the report record.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<ReportRecord> {
    let hash = crate::config::config_hash(cfg)?;
    let cases = match cfg.suite {
        SuiteKind::ClosenessAudit => run_closeness_audit(cfg)?,
        SuiteKind::ProtocolCalibration => run_protocol_calibration(cfg)?,
        SuiteKind::TheoremS3 => run_theorem_s3(cfg)?,
        SuiteKind::HhlPerfect
        | SuiteKind::HhlGeneral
        | SuiteKind::HhlUnitaryInverse
        | SuiteKind::HhlCpMode => run_hhl_suite(cfg)?,
        SuiteKind::AdversarialDemo => run_adversarial_demo(cfg)?,
    };
    if cases.is_empty() {
        return Err(Error::BadParam {
            name: "suite",
            reason: "the configuration produced no cases \
                     (check channel/instance register widths)"
                .into(),
        });
    }
    Ok(ReportRecord::new(cfg.suite.name(), hash, cfg.seed, cases))
}

/// Explicit channels plus expanded population members, with stable ids.
fn labeled_channels(cfg: &ExperimentConfig) -> Result<Vec<(String, NoiseSpec)>> {
    let mut out = Vec::new();
    for (i, spec) in cfg.channels.iter().enumerate() {
        out.push((format!("ch{i:03}/{}", spec.kind.family_name()), spec.clone()));
    }
    if let Some(pop) = &cfg.population {
        for (i, spec) in noise::population(pop)?.into_iter().enumerate() {
            let id = format!("pop{i:04}/{}-n{}", spec.kind.family_name(), spec.n);
            out.push((id, spec));
        }
    }
    Ok(out)
}

/// Exact closeness audit: reports every measure and checks the two exact
/// relations `eta_s3 ≤ eta_s1 + eta_s2` and `s3 ≤ min(s1, s2)`.
fn run_closeness_audit(cfg: &ExperimentConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for (id, spec) in labeled_channels(cfg)? {
        let c = spec.build()?;
        let rep = closeness::report_single(&c)?;
        let measured = rep.eta_s3;
        let bound = rep.eta_s1 + rep.eta_s2;
        let additive = measured <= bound + TOL_BOUND;
        let ordered = rep.s3 <= rep.s1.min(rep.s2) + TOL_BOUND;
        cases.push(CaseResult {
            id,
            pass: additive && ordered,
            etas: vec![rep.eta_s1, rep.eta_s2, rep.eta_s3],
            measured,
            bound,
            detail: serde_json::to_string(&rep).expect("report serializes"),
        });
    }
    Ok(cases)
}

/// Shot-protocol calibration: each protocol's estimate must land within the
/// plan's ε of its exact estimand in all but a δ-fraction of reruns (with a
/// three-sigma allowance on the observed fraction).
fn run_protocol_calibration(cfg: &ExperimentConfig) -> Result<Vec<CaseResult>> {
    let plan: ShotPlan = cfg
        .plan
        .as_ref()
        .ok_or_else(|| Error::BadParam {
            name: "plan",
            reason: "protocol calibration needs a [plan] table".into(),
        })?
        .build()?;
    let reruns = cfg.reruns.unwrap_or(200).max(1);
    let mut cases = Vec::new();
    for (id, spec) in labeled_channels(cfg)? {
        let c = spec.build()?;
        let p = make_p_channel(&spec)?;
        let mut jobs = vec![
            (Protocol::Ta1, verify::exact_ta1(&c)?),
            (Protocol::Ta2, verify::exact_ta2(&c)?),
            (Protocol::Tp1, verify::exact_tp1(&p)?),
            (Protocol::Tp2, verify::exact_tp2(&p)?),
        ];
        if c.is_unitary() && p.is_unitary() {
            jobs.push((Protocol::Cp, verify::exact_cp(&c, &p)?));
        }
        for (proto, exact) in jobs {
            let label = format!("calib/{id}/{}", proto.name());
            let mut failures = 0u32;
            for r in 0..reruns {
                let seed = derive_seed(cfg.seed, &label, r as u64);
                let res = match proto {
                    Protocol::Ta1 => verify::run_ta1(&c, &plan, seed)?,
                    Protocol::Ta2 => verify::run_ta2(&c, &plan, seed)?,
                    Protocol::Tp1 => verify::run_tp1(&p, &plan, seed)?,
                    Protocol::Tp2 => verify::run_tp2(&p, &plan, seed)?,
                    Protocol::Cp => verify::run_cp(&c, &p, &plan, seed)?,
                };
                if (res.estimate - exact).abs() > plan.epsilon {
                    failures += 1;
                }
            }
            let measured = f64::from(failures) / f64::from(reruns);
            let bound = plan.delta
                + 3.0 * (plan.delta * (1.0 - plan.delta) / f64::from(reruns)).sqrt();
            cases.push(CaseResult {
                id: format!("{id}/{}", proto.name()),
                pass: measured <= bound,
                etas: vec![],
                measured,
                bound,
                detail: format!(
                    "exact={exact} epsilon={} shots={} reruns={reruns}",
                    plan.epsilon, plan.shots
                ),
            });
        }
    }
    Ok(cases)
}

/// Reflection-transport identities: composing a decoder with the index
/// reflection turns it into an encoder, and each encoder measure of `C∘R`
/// must reach the matching decoder measure of `C`.
fn run_theorem_s3(cfg: &ExperimentConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for (id, spec) in labeled_channels(cfg)? {
        let c = spec.build()?;
        let reg = ShiftSpec::from_dim(c.dim())?;
        let transported = compose(&c, &reflection_channel(reg.qubits())?)?;
        let s = [
            closeness::s1_measure(&c)?,
            closeness::s2_measure(&c)?,
            closeness::s3_measure(&c)?,
        ];
        let t = [
            closeness::t1_measure(&transported)?,
            closeness::t2_measure(&transported)?,
            closeness::t3_measure(&transported)?,
        ];
        for (i, (ti, si)) in t.iter().zip(&s).enumerate() {
            cases.push(CaseResult {
                id: format!("{id}/transport-t{}", i + 1),
                pass: *ti >= si - TOL_BOUND,
                etas: vec![],
                measured: *ti,
                bound: *si,
                detail: format!("t{0}(C∘R) >= s{0}(C)", i + 1),
            });
        }
    }
    Ok(cases)
}

fn ensemble_case(id: String, r: &EnsembleResult) -> CaseResult {
    CaseResult {
        id,
        pass: r.pass,
        etas: r.etas.clone(),
        measured: r.mean,
        bound: r.bound,
        detail: format!(
            "bound: {} [k={:?}] per_l={:?}",
            r.bound_formula, r.k_param, r.per_l
        ),
    }
}

/// The four pipeline suites share one expansion: compatible channel ×
/// instance pairs, optionally swept over good-set windows.
fn run_hhl_suite(cfg: &ExperimentConfig) -> Result<Vec<CaseResult>> {
    let windows: Vec<Option<usize>> = match cfg.suite {
        SuiteKind::HhlPerfect => vec![None],
        SuiteKind::HhlGeneral => cfg.k_values.iter().map(|&k| Some(k)).collect(),
        _ => {
            if cfg.k_values.is_empty() {
                vec![None]
            } else {
                cfg.k_values.iter().map(|&k| Some(k)).collect()
            }
        }
    };
    let mut cases = Vec::new();
    for (ci, spec) in cfg.channels.iter().enumerate() {
        let c = spec.build()?;
        for (ii, icfg) in cfg.instances.iter().enumerate() {
            if icfg.n != spec.n {
                continue;
            }
            let inst = icfg.build()?;
            let base = format!("ch{ci:03}-inst{ii:03}");
            match cfg.suite {
                SuiteKind::HhlPerfect | SuiteKind::HhlGeneral => {
                    let p = make_p_channel(spec)?;
                    for &k in &windows {
                        let r = ensemble_fidelity(&inst, &c, &p, k)?;
                        let id = match k {
                            None => format!("{base}/fidelity"),
                            Some(kk) => format!("{base}/fidelity-k{kk}"),
                        };
                        cases.push(ensemble_case(id, &r));
                    }
                }
                SuiteKind::HhlUnitaryInverse => {
                    for &k in &windows {
                        let r = ensemble_unitary_inverse(&inst, &c, k)?;
                        let id = match k {
                            None => format!("{base}/distance"),
                            Some(kk) => format!("{base}/distance-k{kk}"),
                        };
                        cases.push(ensemble_case(id, &r));
                    }
                }
                SuiteKind::HhlCpMode => {
                    let p = make_p_channel(spec)?;
                    for &k in &windows {
                        let (r, lemma) = ensemble_cp_mode(&inst, &c, &p, k)?;
                        let (dist_id, lemma_id) = match k {
                            None => (format!("{base}/distance"), format!("{base}/lemma")),
                            Some(kk) => (
                                format!("{base}/distance-k{kk}"),
                                format!("{base}/lemma-k{kk}"),
                            ),
                        };
                        cases.push(ensemble_case(dist_id, &r));
                        cases.push(CaseResult {
                            id: lemma_id,
                            pass: lemma.holds,
                            etas: r.etas.clone(),
                            measured: lemma.lhs,
                            bound: lemma.rhs,
                            detail: "diagonal cross-correlation >= 1 - (eta1+eta2+eta3)".into(),
                        });
                    }
                }
                _ => unreachable!("non-pipeline suites are dispatched elsewhere"),
            }
        }
    }
    Ok(cases)
}

/// The built-in separation demonstration: a channel that passes every
/// outcome-level test with certainty while failing every amplitude-level
/// one.
fn run_adversarial_demo(cfg: &ExperimentConfig) -> Result<Vec<CaseResult>> {
    let spec = adversarial_preset();
    let c = spec.build()?;
    let plan = match &cfg.plan {
        Some(p) => p.build()?,
        None => ShotPlan::new(0.05, 0.05)?,
    };
    let mut cases = Vec::new();

    let ta1 = verify::run_ta1(&c, &plan, derive_seed(cfg.seed, "demo/ta1", 0))?;
    cases.push(CaseResult {
        id: "demo/ta1".into(),
        pass: ta1.estimate == 1.0,
        etas: vec![],
        measured: ta1.estimate,
        bound: 1.0,
        detail: format!(
            "outcome test must succeed on every one of {} shots",
            ta1.shots_used
        ),
    });

    let s3 = closeness::s3_measure(&c)?;
    cases.push(CaseResult {
        id: "demo/s3".into(),
        pass: s3 <= 1e-12,
        etas: vec![],
        measured: s3,
        bound: 1e-12,
        detail: "coherent measure must vanish: the output phases average to zero".into(),
    });

    let ta2 = verify::run_ta2(&c, &plan, derive_seed(cfg.seed, "demo/ta2", 0))?;
    cases.push(CaseResult {
        id: "demo/ta2".into(),
        pass: ta2.estimate < 1.0,
        etas: vec![],
        measured: ta2.estimate,
        bound: 1.0,
        detail: "interference test must detect the phases".into(),
    });

    let inst = demo_instance();
    let p = qft_channel(inst.n())?;
    let ens = ensemble_fidelity(&inst, &c, &p, None)?;
    cases.push(CaseResult {
        id: "demo/hhl-fidelity".into(),
        pass: ens.mean < 0.6,
        etas: ens.etas.clone(),
        measured: ens.mean,
        bound: 0.6,
        detail: format!(
            "pipeline output must be destroyed; per_l={:?}, lower bound {} is vacuous as \
             eta_s3 = 1",
            ens.per_l, ens.bound
        ),
    });

    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn closeness_audit_reports_pass_for_standard_families() {
        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "closeness_audit"
            seed = 21

            [[channels]]
            kind = "depolarized"
            p = 0.2
            n = 2

            [[channels]]
            kind = "diag_after"
            thetas = [0.0, 0.4, -0.2, 0.9]
            n = 2

            [population]
            families = ["mixed_unitary"]
            n_values = [2]
            per_cell = 2
            strength = 0.5
            seed = 3
            "#,
        )
        .unwrap();
        let rec = run_suite(&cfg).unwrap();
        assert_eq!(rec.suite, "closeness_audit");
        assert_eq!(rec.cases.len(), 4);
        assert!(rec.all_pass(), "{rec:?}");
        // Sorted ids, population members included.
        assert!(rec.cases[0].id.starts_with("ch000"));
        assert!(rec.cases.iter().any(|c| c.id.starts_with("pop")));
    }

    #[test]
    fn calibration_passes_and_is_deterministic() {
        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "protocol_calibration"
            seed = 5
            reruns = 40

            [plan]
            epsilon = 0.1
            delta = 0.1

            [[channels]]
            kind = "depolarized"
            p = 0.15
            n = 2
            "#,
        )
        .unwrap();
        let a = run_suite(&cfg).unwrap();
        assert_eq!(a.cases.len(), 4, "depolarized channel is not unitary");
        assert!(a.all_pass(), "{a:?}");
        let b = run_suite(&cfg).unwrap();
        for (x, y) in a.cases.iter().zip(&b.cases) {
            assert_eq!(x.measured, y.measured);
        }
    }

    #[test]
    fn calibration_includes_cp_for_unitary_channels() {
        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "protocol_calibration"
            seed = 5
            reruns = 25

            [plan]
            epsilon = 0.12
            delta = 0.15

            [[channels]]
            kind = "perturbed_unitary"
            eps = 0.1
            n = 2
            seed = 8
            "#,
        )
        .unwrap();
        let rec = run_suite(&cfg).unwrap();
        assert_eq!(rec.cases.len(), 5);
        assert!(rec.cases.iter().any(|c| c.id.ends_with("/cp")));
        assert!(rec.all_pass(), "{rec:?}");
    }

    #[test]
    fn theorem_s3_transport_holds() {
        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "theorem_s3"
            seed = 2

            [[channels]]
            kind = "depolarized"
            p = 0.3
            n = 3

            [[channels]]
            kind = "mixed_unitary"
            components = 3
            spread = 0.4
            n = 2
            seed = 12
            "#,
        )
        .unwrap();
        let rec = run_suite(&cfg).unwrap();
        assert_eq!(rec.cases.len(), 6);
        assert!(rec.all_pass(), "{rec:?}");
        // Transport is an equality for these channels.
        for case in &rec.cases {
            assert!((case.measured - case.bound).abs() < 1e-9, "{case:?}");
        }
    }

    #[test]
    fn hhl_perfect_suite_runs_compatible_pairs_only() {
        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "hhl_perfect"
            seed = 4

            [[channels]]
            kind = "depolarized"
            p = 0.1
            n = 2

            [[channels]]
            kind = "depolarized"
            p = 0.1
            n = 3

            [[instances]]
            n = 2
            d = 2
            eigenvalues = [0.25, 0.5]
            perfect = true
            f = { kind = "identity" }
            "#,
        )
        .unwrap();
        let rec = run_suite(&cfg).unwrap();
        // Only the n = 2 channel matches the instance.
        assert_eq!(rec.cases.len(), 1);
        assert_eq!(rec.cases[0].id, "ch000-inst000/fidelity");
        assert!(rec.all_pass(), "{rec:?}");
        assert_eq!(rec.cases[0].etas.len(), 2);
    }

    #[test]
    fn hhl_general_sweeps_windows() {
        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "hhl_general"
            seed = 4
            k_values = [2, 4]

            [[channels]]
            kind = "depolarized"
            p = 0.05
            n = 2

            [[instances]]
            n = 2
            d = 2
            eigenvalues = [0.3, 0.6]
            f = { kind = "truncated_inverse", cutoff = 1.0 }
            "#,
        )
        .unwrap();
        let rec = run_suite(&cfg).unwrap();
        assert_eq!(rec.cases.len(), 2);
        assert!(rec.cases[0].id.ends_with("fidelity-k2"));
        assert!(rec.cases[1].id.ends_with("fidelity-k4"));
        assert!(rec.all_pass(), "{rec:?}");
    }

    #[test]
    fn hhl_unitary_inverse_and_cp_suites() {
        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "hhl_unitary_inverse"
            seed = 4

            [[channels]]
            kind = "perturbed_unitary"
            eps = 0.05
            n = 2
            seed = 31

            [[instances]]
            n = 2
            d = 2
            eigenvalues = [0.25, 0.75]
            perfect = true
            f = { kind = "identity" }
            "#,
        )
        .unwrap();
        let rec = run_suite(&cfg).unwrap();
        assert_eq!(rec.cases.len(), 1);
        assert!(rec.all_pass(), "{rec:?}");

        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "hhl_cp_mode"
            seed = 4

            [[channels]]
            kind = "diag_after"
            thetas = [0.0, 0.2, -0.1, 0.3]
            n = 2

            [[instances]]
            n = 2
            d = 2
            eigenvalues = [0.25, 0.75]
            perfect = true
            f = { kind = "identity" }
            "#,
        )
        .unwrap();
        let rec = run_suite(&cfg).unwrap();
        assert_eq!(rec.cases.len(), 2, "distance + lemma");
        assert!(rec.all_pass(), "{rec:?}");
    }

    #[test]
    fn incompatible_widths_produce_an_error_not_an_empty_pass() {
        let cfg = parse_config(
            r#"
            schema_version = 1
            suite = "hhl_perfect"
            seed = 4

            [[channels]]
            kind = "depolarized"
            p = 0.1
            n = 3

            [[instances]]
            n = 2
            d = 2
            eigenvalues = [0.25, 0.5]
            perfect = true
            f = { kind = "identity" }
            "#,
        )
        .unwrap();
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn adversarial_demo_separates_the_measures() {
        let cfg = ExperimentConfig::demo_default();
        let rec = run_suite(&cfg).unwrap();
        assert_eq!(rec.cases.len(), 4);
        assert!(rec.all_pass(), "{rec:?}");
        let ta1 = rec.cases.iter().find(|c| c.id == "demo/ta1").unwrap();
        assert_eq!(ta1.measured, 1.0);
        let s3 = rec.cases.iter().find(|c| c.id == "demo/s3").unwrap();
        assert!(s3.measured <= 1e-12);
        let fid = rec.cases.iter().find(|c| c.id == "demo/hhl-fidelity").unwrap();
        assert!(fid.measured < 0.6);
    }
}
