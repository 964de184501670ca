//! Running one configured experiment and writing its artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::codec::{encode_pair, Instance};
use crate::harness::artifacts::{
    read_json, read_measurements, ArtifactDir, ArtifactError, Failure, CERTIFICATE_JSON, FAILURE_JSON,
    MEASUREMENTS_CSV, REPORT_JSON, SUMMARY_MD,
};
use crate::harness::config::{ConfigInvalid, ExperimentConfig, ExperimentKind, Language};
use crate::harness::corpus::{generate_corpus, label, Label, LabeledInstance};
use crate::languages::decide::verify_path;
use crate::languages::pool::{pool_pair, HaltingPair};
use crate::languages::reference::{reference_cobhp_acceptor_with_budget, reference_codbhp_acceptor};
use crate::levin::{bhp_oracle, levin_search_doubling, levin_search_witness, schnorr_search_from_decision};
use crate::runtime::{run_measured, Acceptor, MeasurementRow, Outcome};
use crate::speedup::cap::detect_runtime_cap_with_reports;
use crate::speedup::certify::{certify, measure_b_speedup, on_s_id, validate_certificate, SpeedupCertificate, Violation};
use crate::speedup::dominance::{dominance_from_samples, fit_envelopes, StarProbeReport};
use crate::speedup::reduction::{
    compose_with_reduction, padding_self_reduction, reduction_dbhp_to_bhp, strip_padding_reduction,
};
use crate::speedup::shortcuts::{dead_start_shortcut, finite_orbit_shortcut, no_accept_shortcut};
use crate::speedup::transform::hardwire_transform;

/// First budget of the Levin doubling sequence.
pub const LEVIN_START_BUDGET: u64 = 1 << 10;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigInvalid),
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentOutcome {
    pub kind: ExperimentKind,
    pub failure: Option<Failure>,
    pub out_dir: PathBuf,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

struct KindResult {
    rows: Vec<MeasurementRow>,
    report: serde_json::Value,
    certificate: Option<SpeedupCertificate>,
    extra: Vec<(&'static str, String)>,
    summary: String,
    failure: Option<(&'static str, String)>,
}

impl KindResult {
    fn new(rows: Vec<MeasurementRow>, report: serde_json::Value, summary: String) -> Self {
        KindResult {
            rows,
            report,
            certificate: None,
            extra: Vec::new(),
            summary,
            failure: None,
        }
    }
}

pub fn reference_for(language: Language, decider_budget: u64) -> Acceptor {
    match language {
        Language::Cobhp => reference_cobhp_acceptor_with_budget(decider_budget),
        Language::Codbhp => reference_codbhp_acceptor(),
    }
}

/// Resolves one of [`ACCEPTOR_CHOICES`](crate::harness::config::ACCEPTOR_CHOICES).
pub fn acceptor_by_name(name: &str, cfg: &ExperimentConfig, pair: &HaltingPair) -> Result<Acceptor, ConfigInvalid> {
    let reference = reference_for(cfg.language, cfg.decider_budget);
    Ok(match name {
        "reference" => reference,
        "transformed" => hardwire_transform(&reference, pair).map_err(|e| ConfigInvalid::single("pair", e.to_string()))?,
        "shortcut-no-accept" => no_accept_shortcut(),
        "shortcut-dead-start" => dead_start_shortcut(),
        "shortcut-finite-orbit" => finite_orbit_shortcut(),
        other => return Err(ConfigInvalid::single("acceptor", format!("unknown acceptor {other:?}"))),
    })
}

fn md_table(headers: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("| {} |\n|{}\n", headers.join(" | "), "---|".repeat(headers.len()));
    for r in rows {
        s.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    s
}

/// Runs `cfg` and writes `measurements.csv`, `report.json`, `summary.md`
/// (plus `certificate.json`, `levin.csv` or `failure.json` where they
/// apply) into the output directory. Only `run.log` carries timestamps.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    cfg.validate_for_run()?;
    let dir = ArtifactDir::new(&cfg.out_dir);
    dir.clear()?;
    dir.log(&format!("start kind={} seed={}", cfg.kind, cfg.seed))?;
    let pair = pool_pair(&cfg.pair).expect("validated pair name");
    let result = match cfg.kind {
        ExperimentKind::BSpeedup => b_speedup(cfg, &pair)?,
        ExperimentKind::CapDetect => cap_detect(cfg, &pair)?,
        ExperimentKind::StarProbe => star_probe(cfg, &pair)?,
        ExperimentKind::Levin => levin(cfg)?,
        ExperimentKind::Dominance => dominance(cfg, &pair)?,
        ExperimentKind::ComposeCheck => compose_check(cfg)?,
    };
    let mut failure = result.failure;
    if failure.is_none() {
        if let Some(r) = result.rows.iter().find(|r| !r.satisfies_floor()) {
            failure = Some(("costModelFloor", format!("{} on {}: steps {} with maxPosRead {:?}", r.acceptor, r.input_id, r.steps, r.max_pos_read)));
        }
    }
    dir.write_measurements(&result.rows)?;
    dir.write_json(REPORT_JSON, &result.report)?;
    for (name, text) in &result.extra {
        dir.write_text(name, text)?;
    }
    if let Some(cert) = &result.certificate {
        dir.write_json(CERTIFICATE_JSON, cert)?;
        if failure.is_none() {
            if let Err(e) = verify_certificate_files(&cfg.out_dir) {
                failure = Some(("certificateRevalidation", e.to_string()));
            }
        }
    }
    let failure = failure.map(|(invariant, detail)| Failure {
        experiment: cfg.kind.to_string(),
        invariant: invariant.to_string(),
        detail,
    });
    let status = match &failure {
        None => "PASS".to_string(),
        Some(f) => format!("FAIL ({}: {})", f.invariant, f.detail),
    };
    let summary = format!(
        "# {} experiment\n\nseed {}, t in [{}, {}], {} measurement rows\n\nstatus: {status}\n\n{}",
        cfg.kind,
        cfg.seed,
        cfg.t_min,
        cfg.t_max,
        result.rows.len(),
        result.summary
    );
    dir.write_text(SUMMARY_MD, &summary)?;
    if let Some(f) = &failure {
        dir.write_json(FAILURE_JSON, f)?;
    }
    dir.log(&format!("end kind={} status={}", cfg.kind, if failure.is_none() { "pass" } else { "fail" }))?;
    Ok(ExperimentOutcome {
        kind: cfg.kind,
        failure,
        out_dir: cfg.out_dir.clone(),
    })
}

#[derive(Debug, Error)]
pub enum CertificateCheckError {
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
    #[error("certificate rejected: {0}")]
    Violation(#[from] Violation),
}

/// Re-validates `certificate.json` in `dir` against `measurements.csv`.
pub fn verify_certificate_files(dir: &Path) -> Result<SpeedupCertificate, CertificateCheckError> {
    let cert: SpeedupCertificate = read_json(&dir.join(CERTIFICATE_JSON))?;
    let rows = read_measurements(&dir.join(MEASUREMENTS_CSV))?;
    validate_certificate(&cert, &rows)?;
    Ok(cert)
}

fn b_speedup(cfg: &ExperimentConfig, pair: &HaltingPair) -> Result<KindResult, HarnessError> {
    let base = reference_for(cfg.language, cfg.decider_budget);
    let fast = acceptor_by_name("transformed", cfg, pair)?;
    let off: Vec<(String, Instance)> = generate_corpus(cfg)?
        .into_iter()
        .filter(|li| !pair.same_pair(li.instance.machine(), li.instance.input()))
        .map(|li| (li.id, li.instance))
        .collect();
    let meas = measure_b_speedup(&base, &fast, pair, (cfg.t_min, cfg.t_max), &off, cfg.step_budget);
    let rows = meas.rows();
    let p = encode_pair(&pair.machine, &pair.input).len() as u64;
    let flagged = rows.iter().filter(|r| r.outcome == Outcome::BudgetFlag).count();

    let mut summary = String::from("## Steps on S\n\n");
    summary += &md_table(
        &["t", "base", "transformed"],
        meas.on_s.iter().map(|(t, b, a)| vec![t.to_string(), b.steps.to_string(), a.steps.to_string()]),
    );
    let mut overheads: BTreeMap<i64, usize> = BTreeMap::new();
    for (b, a) in &meas.off_s {
        *overheads.entry(a.steps as i64 - b.steps as i64).or_default() += 1;
    }
    summary += "\n## Overhead off S (transformed - base)\n\n";
    summary += &md_table(&["overhead", "instances"], overheads.iter().map(|(o, n)| vec![o.to_string(), n.to_string()]));

    let mut result = match certify(&meas, &off) {
        Ok(cert) => {
            let report = json!({
                "kind": cfg.kind,
                "language": cfg.language,
                "pair": pair.name,
                "prefixLength": p,
                "expectedConstant": p + 2,
                "constantC": cert.constant_c,
                "additiveCs": cert.additive_cs,
                "tRange": [cfg.t_min, cfg.t_max],
                "onS": cert.on_s.len(),
                "offS": cert.off_s.len(),
                "flaggedRows": flagged,
            });
            let mut r = KindResult::new(rows, report, summary);
            if cert.constant_c != p + 2 {
                r.failure = Some(("transformConstant", format!("constant {} but p + 2 = {}", cert.constant_c, p + 2)));
            } else if cert.additive_cs > p + 2 {
                r.failure = Some(("additiveOverheadBound", format!("additive overhead {} exceeds p + 2 = {}", cert.additive_cs, p + 2)));
            }
            r.certificate = Some(cert);
            r
        }
        Err(v) => {
            let report = json!({
                "kind": cfg.kind,
                "language": cfg.language,
                "pair": pair.name,
                "prefixLength": p,
                "violation": v,
                "flaggedRows": flagged,
            });
            let mut r = KindResult::new(rows, report, summary);
            r.failure = Some(("bSpeedup", v.to_string()));
            r
        }
    };
    result.summary.push('\n');
    Ok(result)
}

fn cap_detect(cfg: &ExperimentConfig, pair: &HaltingPair) -> Result<KindResult, HarnessError> {
    let a = acceptor_by_name(&cfg.acceptor, cfg, pair)?;
    let (rep, reports) = detect_runtime_cap_with_reports(&a, &pair.machine, &pair.input, cfg.t_max, cfg.step_budget);
    let rows: Vec<MeasurementRow> = reports
        .iter()
        .map(|(t, r)| MeasurementRow::from_report(on_s_id(pair, *t), r))
        .collect();
    let summary = md_table(
        &["t", "steps", "outcome"],
        reports.iter().map(|(t, r)| vec![t.to_string(), r.steps.to_string(), r.outcome.to_string()]),
    );
    let confirmed = rep.confirmed();
    let report = json!({
        "kind": cfg.kind,
        "acceptor": a.name(),
        "pair": pair.name,
        "tMax": cfg.t_max,
        "cap": rep,
    });
    let mut r = KindResult::new(rows, report, summary);
    if !confirmed {
        r.failure = Some(("capPropagation", "a transcript replay diverged".into()));
    }
    Ok(r)
}

fn star_probe(cfg: &ExperimentConfig, pair: &HaltingPair) -> Result<KindResult, HarnessError> {
    let a = acceptor_by_name(&cfg.acceptor, cfg, pair)?;
    let base = Instance::new(pair.machine.clone(), pair.input.clone(), 0);
    let rows: Vec<MeasurementRow> = (cfg.t_min..=cfg.t_max)
        .into_par_iter()
        .map(|t| MeasurementRow::from_report(on_s_id(pair, t), &run_measured(&a, base.with_bound(t).encoded(), cfg.step_budget)))
        .collect();
    let samples: Vec<(u64, u64)> = (cfg.t_min..=cfg.t_max)
        .zip(&rows)
        .filter(|(_, r)| r.outcome != Outcome::BudgetFlag)
        .map(|(t, r)| (t, r.steps))
        .collect();
    let degrees: Vec<u32> = (0..=cfg.max_degree).collect();
    let probe = StarProbeReport {
        acceptor: a.name().to_string(),
        pair: pair.name.clone(),
        fits: fit_envelopes(&samples, &degrees),
        samples,
    };
    let mut summary = md_table(
        &["degree", "smallest c", "early c", "first violation"],
        probe.fits.iter().map(|f| {
            vec![
                f.degree.to_string(),
                f.smallest_c.to_string(),
                f.early_c.to_string(),
                f.first_violation.map_or("-".into(), |t| t.to_string()),
            ]
        }),
    );
    summary += "\n";
    summary += &md_table(&["t", "steps"], probe.samples.iter().map(|(t, s)| vec![t.to_string(), s.to_string()]));
    let report = serde_json::to_value(&probe).expect("probe report serializes");
    Ok(KindResult::new(rows, report, summary))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevinRow {
    pub input_id: String,
    pub label: Label,
    pub levin_found: bool,
    pub path_length: Option<usize>,
    pub program_index: Option<u64>,
    pub phase: Option<u64>,
    pub steps_used: u64,
    pub accounting_ok: bool,
    pub schnorr_found: bool,
    pub schnorr_calls: u64,
    pub schnorr_call_bound: u64,
}

/// Levin and Schnorr search on one labeled instance. Yes instances use the
/// doubling schedule from [`LEVIN_START_BUDGET`]; No instances run once at
/// the full budget, which is the last round of that schedule (every earlier
/// round is a prefix of it). Returns the row and the first failed check.
pub fn levin_check(li: &LabeledInstance, levin_budget: u64, decider_budget: u64) -> (LevinRow, Option<(&'static str, String)>) {
    let i = &li.instance;
    let out = match li.label {
        Label::Yes => levin_search_doubling(i, LEVIN_START_BUDGET, levin_budget),
        _ => levin_search_witness(i, levin_budget),
    };
    let schnorr = schnorr_search_from_decision(i, bhp_oracle(decider_budget));
    let w = out.witness.as_ref();
    let mut row = LevinRow {
        input_id: li.id.clone(),
        label: li.label,
        levin_found: w.is_some(),
        path_length: w.map(|w| w.path.len()),
        program_index: w.map(|w| w.program_index),
        phase: w.map(|w| w.phase),
        steps_used: out.steps_used,
        accounting_ok: out.accounting_ok,
        schnorr_found: false,
        schnorr_calls: 0,
        schnorr_call_bound: 0,
    };
    let mut fail = None;
    match &schnorr {
        Ok(s) => {
            row.schnorr_found = s.path.is_some();
            row.schnorr_calls = s.oracle_calls;
            row.schnorr_call_bound = s.call_bound;
        }
        Err(e) => fail = Some(("schnorrOracle", format!("{}: {e}", li.id))),
    }
    if !out.accounting_ok {
        fail.get_or_insert(("scheduleAccounting", li.id.clone()));
    }
    match li.label {
        Label::Yes => {
            if !w.is_some_and(|w| verify_path(i, &w.path)) {
                fail.get_or_insert(("levinWitness", format!("{}: no verified path", li.id)));
            }
            if let Ok(s) = &schnorr {
                if !s.path.as_ref().is_some_and(|p| verify_path(i, p)) || s.oracle_calls > s.call_bound {
                    fail.get_or_insert(("schnorrWitness", format!("{}: {} calls, bound {}", li.id, s.oracle_calls, s.call_bound)));
                }
            }
        }
        Label::No => {
            if w.is_some() {
                fail.get_or_insert(("levinWitness", format!("{}: path found on a No instance", li.id)));
            }
            if schnorr.as_ref().is_ok_and(|s| s.path.is_some()) {
                fail.get_or_insert(("schnorrWitness", format!("{}: path found on a No instance", li.id)));
            }
        }
        Label::Unknown => {}
    }
    (row, fail)
}

fn levin(cfg: &ExperimentConfig) -> Result<KindResult, HarnessError> {
    let corpus = generate_corpus(cfg)?;
    let checked: Vec<(LevinRow, Option<(&'static str, String)>)> = corpus
        .par_iter()
        .filter(|li| li.label != Label::Unknown)
        .map(|li| levin_check(li, cfg.levin_budget, cfg.decider_budget))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    for (row, _) in &checked {
        w.serialize(row).expect("levin row serializes");
    }
    let levin_csv = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8");
    let yes = checked.iter().filter(|(r, _)| r.label == Label::Yes).count();
    let no = checked.len() - yes;
    let found = checked.iter().filter(|(r, _)| r.levin_found).count();
    let max_steps = checked.iter().map(|(r, _)| r.steps_used).max().unwrap_or(0);
    let report = json!({
        "kind": cfg.kind,
        "levinBudget": cfg.levin_budget,
        "yesInstances": yes,
        "noInstances": no,
        "unknownInstances": corpus.len() - checked.len(),
        "levinFound": found,
        "maxStepsUsed": max_steps,
    });
    let summary = md_table(
        &["label", "instances", "levin found", "schnorr found"],
        [Label::Yes, Label::No].into_iter().map(|l| {
            let of = checked.iter().filter(|(r, _)| r.label == l);
            vec![
                format!("{l:?}"),
                of.clone().count().to_string(),
                of.clone().filter(|(r, _)| r.levin_found).count().to_string(),
                of.filter(|(r, _)| r.schnorr_found).count().to_string(),
            ]
        }),
    );
    let mut r = KindResult::new(Vec::new(), report, summary);
    r.extra.push(("levin.csv", levin_csv));
    r.failure = checked.into_iter().find_map(|(_, f)| f);
    Ok(r)
}

fn dominance(cfg: &ExperimentConfig, pair: &HaltingPair) -> Result<KindResult, HarnessError> {
    let base = reference_for(cfg.language, cfg.decider_budget);
    let fast = acceptor_by_name("transformed", cfg, pair)?;
    let s = Instance::new(pair.machine.clone(), pair.input.clone(), 0);
    let mut members: Vec<(String, Instance)> = (cfg.t_min..=cfg.t_max).map(|t| (on_s_id(pair, t), s.with_bound(t))).collect();
    members.extend(
        generate_corpus(cfg)?
            .into_iter()
            .filter(|li| li.label == Label::No && (cfg.language == Language::Cobhp || li.instance.machine().is_deterministic()))
            .map(|li| (li.id, li.instance)),
    );
    let measured: Vec<(MeasurementRow, MeasurementRow, u64)> = members
        .par_iter()
        .map(|(id, i)| {
            let rb = run_measured(&base, i.encoded(), cfg.step_budget);
            let rf = run_measured(&fast, i.encoded(), cfg.step_budget);
            (MeasurementRow::from_report(id, &rb), MeasurementRow::from_report(id, &rf), i.encoded().len() as u64)
        })
        .collect();
    let rows: Vec<MeasurementRow> = measured.iter().flat_map(|(b, f, _)| [b.clone(), f.clone()]).collect();
    let outside = measured
        .iter()
        .flat_map(|(b, f, _)| [b, f])
        .find(|r| r.outcome != Outcome::Accept);
    let base_over_fast: Vec<(u64, u64, u64)> = measured.iter().map(|(b, f, n)| (*n, b.steps, f.steps)).collect();
    let fast_over_base: Vec<(u64, u64, u64)> = measured.iter().map(|(b, f, n)| (*n, f.steps, b.steps)).collect();
    let d1 = dominance_from_samples(&base_over_fast, cfg.max_degree, cfg.c_cap);
    let d2 = dominance_from_samples(&fast_over_base, cfg.max_degree, cfg.c_cap);
    let report = json!({
        "kind": cfg.kind,
        "members": members.len(),
        "maxDegree": cfg.max_degree,
        "cCap": cfg.c_cap,
        "baseOverTransformed": d1,
        "transformedOverBase": d2,
        "note": "fits hold on this corpus only",
    });
    let summary = format!(
        "steps_base <= c (|x| + steps_transformed)^d: {d1:?}\n\nsteps_transformed <= c (|x| + steps_base)^d: {d2:?}\n"
    );
    let mut r = KindResult::new(rows, report, summary);
    if let Some(o) = outside {
        r.failure = Some(("corpusOutsideL", format!("{} answers {} on {}", o.acceptor, o.outcome, o.input_id)));
    }
    Ok(r)
}

fn compose_check(cfg: &ExperimentConfig) -> Result<KindResult, HarnessError> {
    let corpus = generate_corpus(cfg)?;
    let composed = compose_with_reduction(&reference_cobhp_acceptor_with_budget(cfg.decider_budget), &reduction_dbhp_to_bhp());
    let direct = reference_codbhp_acceptor();
    let pad = padding_self_reduction();
    let strip = strip_padding_reduction();
    type Checked = (MeasurementRow, MeasurementRow, Option<(&'static str, String)>);
    let checked: Vec<Checked> = corpus
        .par_iter()
        .map(|li| {
            let i = &li.instance;
            let rc = MeasurementRow::from_report(&li.id, &run_measured(&composed, i.encoded(), cfg.step_budget));
            let rd = MeasurementRow::from_report(&li.id, &run_measured(&direct, i.encoded(), cfg.step_budget));
            let flagged = rc.outcome == Outcome::BudgetFlag || rd.outcome == Outcome::BudgetFlag;
            let mut fail = None;
            if !flagged && rc.outcome != rd.outcome {
                fail = Some(("composeAgreement", format!("{}: composed {}, direct {}", li.id, rc.outcome, rd.outcome)));
            }
            match pad.apply(i) {
                Ok(padded) => {
                    if label(&padded, cfg.decider_budget) != li.label {
                        fail.get_or_insert(("paddingPreservation", li.id.clone()));
                    }
                    if strip.apply(&padded).as_ref() != Ok(i) {
                        fail.get_or_insert(("paddingInverse", li.id.clone()));
                    }
                }
                Err(e) => {
                    fail.get_or_insert(("reductionFailure", e.to_string()));
                }
            }
            (rc, rd, fail)
        })
        .collect();
    let deterministic = corpus.iter().filter(|li| li.instance.machine().is_deterministic()).count();
    let disagreements = checked.iter().filter(|(_, _, f)| f.is_some()).count();
    let report = json!({
        "kind": cfg.kind,
        "instances": corpus.len(),
        "deterministic": deterministic,
        "disagreements": disagreements,
    });
    let summary = format!("{} instances ({deterministic} deterministic), {disagreements} disagreements\n", corpus.len());
    let failure = checked.iter().find_map(|(_, _, f)| f.clone());
    let rows = checked.into_iter().flat_map(|(a, b, _)| [a, b]).collect();
    let mut r = KindResult::new(rows, report, summary);
    r.failure = failure;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::CoreLimits;

    fn cfg(kind: ExperimentKind, dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            out_dir: dir.to_path_buf(),
            corpus_size: 120,
            t_max: 40,
            core: Some(CoreLimits {
                max_states: 1,
                max_entries: 1,
                max_input_len: 1,
                t_max: 1,
            }),
            ..Default::default()
        }
    }

    #[test]
    fn b_speedup_emits_a_revalidated_certificate() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&cfg(ExperimentKind::BSpeedup, dir.path())).unwrap();
        assert!(out.passed(), "{:?}", out.failure);
        let cert = verify_certificate_files(dir.path()).unwrap();
        assert_eq!(cert.constant_c, 34);
        assert!(dir.path().join(SUMMARY_MD).exists());
        assert!(!dir.path().join(FAILURE_JSON).exists());
    }

    #[test]
    fn cap_detect_on_reference_finds_no_cap() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&cfg(ExperimentKind::CapDetect, dir.path())).unwrap();
        assert!(out.passed());
        let report: serde_json::Value = read_json(&dir.path().join(REPORT_JSON)).unwrap();
        assert_eq!(report["cap"]["result"], "noCapUpTo");
    }

    #[test]
    fn failing_experiment_writes_failure_json() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig {
            t_max: 10,
            ..cfg(ExperimentKind::BSpeedup, dir.path())
        };
        let out = run_experiment(&c).unwrap();
        assert!(!out.passed());
        let f: Failure = read_json(&dir.path().join(FAILURE_JSON)).unwrap();
        assert_eq!(f.invariant, "bSpeedup");
    }

    #[test]
    fn missing_out_dir_is_config_invalid() {
        let c = cfg(ExperimentKind::CapDetect, Path::new("/no/such/dir"));
        assert!(matches!(run_experiment(&c), Err(HarnessError::Config(_))));
    }

    #[test]
    fn artifacts_are_reproducible() {
        for kind in [ExperimentKind::StarProbe, ExperimentKind::ComposeCheck, ExperimentKind::Dominance] {
            let a = tempfile::tempdir().unwrap();
            let b = tempfile::tempdir().unwrap();
            assert!(run_experiment(&cfg(kind, a.path())).unwrap().passed());
            assert!(run_experiment(&cfg(kind, b.path())).unwrap().passed());
            for name in [MEASUREMENTS_CSV, REPORT_JSON, SUMMARY_MD] {
                let x = std::fs::read(a.path().join(name)).unwrap();
                let y = std::fs::read(b.path().join(name)).unwrap();
                assert_eq!(x, y, "{kind} {name}");
            }
        }
    }
}
