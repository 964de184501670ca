//! Measuring and certifying a b-speedup of one acceptor over another.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::Instance;
use crate::languages::pool::HaltingPair;
use crate::runtime::{run_measured, Acceptor, MeasurementRow, Outcome};

/// Minimum number of distinct pad lengths in a certificate.
pub const MIN_T_VALUES: usize = 32;
/// Minimum number of off-S instances in a certificate.
pub const MIN_OFF_S: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OnSRow {
    pub t: u64,
    pub steps_base: u64,
    pub steps_transformed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OffSRow {
    pub instance_id: String,
    pub steps_base: u64,
    pub steps_transformed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpeedupCertificate {
    pub base_acceptor: String,
    pub transformed_acceptor: String,
    pub pair: HaltingPair,
    pub t_range: (u64, u64),
    pub on_s: Vec<OnSRow>,
    pub off_s: Vec<OffSRow>,
    pub constant_c: u64,
    pub additive_cs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "camelCase")]
pub enum Violation {
    #[error("outcomes differ on {input_id}: base {base}, transformed {transformed}")]
    OutcomeDisagreement {
        input_id: String,
        base: Outcome,
        transformed: Outcome,
    },
    #[error("pad instance {input_id} is not accepted")]
    NotAcceptedOnS { input_id: String },
    #[error("base is bounded on S: {steps} steps at t = {t}")]
    BaseBoundedOnS { t: u64, steps: u64 },
    #[error("base never exceeds the transformed constant {constant} on S")]
    BaseNotAboveConstant { constant: u64 },
    #[error("transformed is not constant on S: {steps} steps at t = {t}, {expected} at the first t")]
    TransformedNotConstant { t: u64, steps: u64, expected: u64 },
    #[error("off-S instance {input_id} lies in S")]
    OffCorpusTouchesS { input_id: String },
    #[error("not enough evidence: {t_values} pad lengths, {off_s} off-S instances")]
    InsufficientEvidence { t_values: usize, off_s: usize },
    #[error("off-S overhead {overhead} on {input_id} exceeds the stated {additive_cs}")]
    OverheadExceeded {
        input_id: String,
        overhead: u64,
        additive_cs: u64,
    },
    #[error("certificate disagrees with raw measurements: {what}")]
    RawMismatch { what: String },
}

/// Raw measurements on S and off S, one report pair per input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeedupMeasurements {
    pub base_acceptor: String,
    pub transformed_acceptor: String,
    pub pair: HaltingPair,
    pub t_range: (u64, u64),
    /// `(t, base, transformed)`.
    pub on_s: Vec<(u64, MeasurementRow, MeasurementRow)>,
    /// `(base, transformed)`, in corpus order.
    pub off_s: Vec<(MeasurementRow, MeasurementRow)>,
}

impl SpeedupMeasurements {
    /// All rows, base before transformed, S first.
    pub fn rows(&self) -> Vec<MeasurementRow> {
        let on = self.on_s.iter().flat_map(|(_, b, a)| [b.clone(), a.clone()]);
        let off = self.off_s.iter().flat_map(|(b, a)| [b.clone(), a.clone()]);
        on.chain(off).collect()
    }
}

pub fn on_s_id(pair: &HaltingPair, t: u64) -> String {
    format!("S:{}:t={t}", pair.name)
}

/// Runs both acceptors on `<pair, 1^t>` for every `t` in `t_range` and on
/// every `(id, instance)` of `off_corpus`.
pub fn measure_b_speedup(
    base: &Acceptor,
    transformed: &Acceptor,
    pair: &HaltingPair,
    t_range: (u64, u64),
    off_corpus: &[(String, Instance)],
    step_budget: u64,
) -> SpeedupMeasurements {
    let measure = |id: &str, inst: &Instance| {
        let b = run_measured(base, inst.encoded(), step_budget);
        let a = run_measured(transformed, inst.encoded(), step_budget);
        (MeasurementRow::from_report(id, &b), MeasurementRow::from_report(id, &a))
    };
    let s = Instance::new(pair.machine.clone(), pair.input.clone(), 0);
    let on_s = (t_range.0..=t_range.1)
        .into_par_iter()
        .map(|t| {
            let (b, a) = measure(&on_s_id(pair, t), &s.with_bound(t));
            (t, b, a)
        })
        .collect();
    let off_s = off_corpus.par_iter().map(|(id, inst)| measure(id, inst)).collect();
    SpeedupMeasurements {
        base_acceptor: base.name().to_string(),
        transformed_acceptor: transformed.name().to_string(),
        pair: pair.clone(),
        t_range,
        on_s,
        off_s,
    }
}

/// Turns measurements into a certificate, or names the first failed
/// condition. Flagged rows are left out.
pub fn certify(
    meas: &SpeedupMeasurements,
    off_corpus: &[(String, Instance)],
) -> Result<SpeedupCertificate, Violation> {
    let ok = |r: &MeasurementRow| r.outcome != Outcome::BudgetFlag;
    for (b, a) in meas.on_s.iter().map(|(_, b, a)| (b, a)).chain(meas.off_s.iter().map(|(b, a)| (b, a))) {
        if ok(b) && ok(a) && b.outcome != a.outcome {
            return Err(Violation::OutcomeDisagreement {
                input_id: b.input_id.clone(),
                base: b.outcome,
                transformed: a.outcome,
            });
        }
    }
    for (id, inst) in off_corpus {
        if meas.pair.same_pair(inst.machine(), inst.input()) {
            return Err(Violation::OffCorpusTouchesS { input_id: id.clone() });
        }
    }

    let on_s: Vec<OnSRow> = meas
        .on_s
        .iter()
        .filter(|(_, b, a)| ok(b) && ok(a))
        .map(|(t, b, a)| OnSRow {
            t: *t,
            steps_base: b.steps,
            steps_transformed: a.steps,
        })
        .collect();
    for (_, b, a) in &meas.on_s {
        for r in [b, a] {
            if ok(r) && r.outcome != Outcome::Accept {
                return Err(Violation::NotAcceptedOnS { input_id: r.input_id.clone() });
            }
        }
    }
    for row in &on_s {
        if row.steps_base < row.t {
            return Err(Violation::BaseBoundedOnS {
                t: row.t,
                steps: row.steps_base,
            });
        }
    }
    let constant_c = on_s.first().map_or(0, |r| r.steps_transformed);
    if let Some(row) = on_s.iter().find(|r| r.steps_transformed != constant_c) {
        return Err(Violation::TransformedNotConstant {
            t: row.t,
            steps: row.steps_transformed,
            expected: constant_c,
        });
    }
    if !on_s.iter().any(|r| r.steps_base > constant_c) {
        return Err(Violation::BaseNotAboveConstant { constant: constant_c });
    }

    let off_s: Vec<OffSRow> = meas
        .off_s
        .iter()
        .filter(|(b, a)| ok(b) && ok(a))
        .map(|(b, a)| OffSRow {
            instance_id: b.input_id.clone(),
            steps_base: b.steps,
            steps_transformed: a.steps,
        })
        .collect();
    let t_values = on_s.iter().map(|r| r.t).collect::<BTreeSet<_>>().len();
    if t_values < MIN_T_VALUES || off_s.len() < MIN_OFF_S {
        return Err(Violation::InsufficientEvidence {
            t_values,
            off_s: off_s.len(),
        });
    }
    let additive_cs = off_s
        .iter()
        .map(|r| r.steps_transformed.saturating_sub(r.steps_base))
        .max()
        .unwrap_or(0);
    Ok(SpeedupCertificate {
        base_acceptor: meas.base_acceptor.clone(),
        transformed_acceptor: meas.transformed_acceptor.clone(),
        pair: meas.pair.clone(),
        t_range: meas.t_range,
        on_s,
        off_s,
        constant_c,
        additive_cs,
    })
}

/// Measures and certifies in one go.
pub fn check_b_speedup(
    base: &Acceptor,
    transformed: &Acceptor,
    pair: &HaltingPair,
    t_range: (u64, u64),
    off_corpus: &[(String, Instance)],
    step_budget: u64,
) -> Result<SpeedupCertificate, Violation> {
    let meas = measure_b_speedup(base, transformed, pair, t_range, off_corpus, step_budget);
    certify(&meas, off_corpus)
}

/// Re-checks a certificate's invariants and that every row it cites
/// matches the raw CSV measurements.
pub fn validate_certificate(cert: &SpeedupCertificate, raw: &[MeasurementRow]) -> Result<(), Violation> {
    let mismatch = |what: String| Err(Violation::RawMismatch { what });
    let index: HashMap<(&str, &str), &MeasurementRow> = raw
        .iter()
        .map(|r| ((r.acceptor.as_str(), r.input_id.as_str()), r))
        .collect();
    let lookup = |acceptor: &str, id: &str| index.get(&(acceptor, id)).copied();

    for row in &cert.on_s {
        if row.t < cert.t_range.0 || row.t > cert.t_range.1 {
            return mismatch(format!("t = {} outside the stated range", row.t));
        }
        if row.steps_base < row.t {
            return Err(Violation::BaseBoundedOnS {
                t: row.t,
                steps: row.steps_base,
            });
        }
        if row.steps_transformed != cert.constant_c {
            return Err(Violation::TransformedNotConstant {
                t: row.t,
                steps: row.steps_transformed,
                expected: cert.constant_c,
            });
        }
        let id = on_s_id(&cert.pair, row.t);
        for (acc, steps) in [
            (&cert.base_acceptor, row.steps_base),
            (&cert.transformed_acceptor, row.steps_transformed),
        ] {
            match lookup(acc, &id) {
                Some(r) if r.steps == steps && r.outcome == Outcome::Accept => {}
                Some(r) => return mismatch(format!("{acc} on {id}: raw {} {} steps", r.outcome, r.steps)),
                None => return mismatch(format!("no raw row for {acc} on {id}")),
            }
        }
    }
    for row in &cert.off_s {
        let overhead = row.steps_transformed.saturating_sub(row.steps_base);
        if overhead > cert.additive_cs {
            return Err(Violation::OverheadExceeded {
                input_id: row.instance_id.clone(),
                overhead,
                additive_cs: cert.additive_cs,
            });
        }
        let b = lookup(&cert.base_acceptor, &row.instance_id);
        let a = lookup(&cert.transformed_acceptor, &row.instance_id);
        match (b, a) {
            (Some(b), Some(a)) => {
                if b.steps != row.steps_base || a.steps != row.steps_transformed {
                    return mismatch(format!("steps of {} differ from raw rows", row.instance_id));
                }
                if b.outcome != a.outcome {
                    return Err(Violation::OutcomeDisagreement {
                        input_id: row.instance_id.clone(),
                        base: b.outcome,
                        transformed: a.outcome,
                    });
                }
            }
            _ => return mismatch(format!("no raw rows for {}", row.instance_id)),
        }
    }
    let t_values = cert.on_s.iter().map(|r| r.t).collect::<BTreeSet<_>>().len();
    if t_values < MIN_T_VALUES || cert.off_s.len() < MIN_OFF_S {
        return Err(Violation::InsufficientEvidence {
            t_values,
            off_s: cert.off_s.len(),
        });
    }
    if !cert.on_s.iter().any(|r| r.steps_base > cert.constant_c) {
        return Err(Violation::BaseNotAboveConstant { constant: cert.constant_c });
    }
    Ok(())
}
