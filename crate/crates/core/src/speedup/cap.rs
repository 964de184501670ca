//! Detecting acceptors that answer pad instances without reading the pad.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::codec::{BitString, Instance};
use crate::languages::pool::HaltingPair;
use crate::machine::Machine;
use crate::runtime::{replay_transcript, run_measured, Acceptor, Outcome, RunReport};

/// One replay of the capped run against a longer pad.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CapConfirmation {
    pub t: u64,
    pub outcome: Outcome,
    pub steps: u64,
    pub matched: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum CapReport {
    #[serde(rename_all = "camelCase")]
    Cap {
        t0: u64,
        steps0: u64,
        outcome: Outcome,
        confirmations: Vec<CapConfirmation>,
    },
    #[serde(rename_all = "camelCase")]
    NoCapUpTo { t_max: u64 },
}

impl CapReport {
    pub fn is_cap(&self) -> bool {
        matches!(self, CapReport::Cap { .. })
    }

    /// True for `NoCapUpTo`, and for a cap whose every replay matched.
    pub fn confirmed(&self) -> bool {
        match self {
            CapReport::Cap { confirmations, .. } => confirmations.iter().all(|c| c.matched),
            CapReport::NoCapUpTo { .. } => true,
        }
    }
}

/// Replay points for a cap found at `t0`: `t0 + 1`, `2 t0` and `t_max`,
/// keeping only those beyond `t0`.
pub fn replay_points(t0: u64, t_max: u64) -> Vec<u64> {
    [t0 + 1, 2 * t0, t_max]
        .into_iter()
        .filter(|&t| t > t0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Runs `a` on `<machine, input, 1^t>` for `t = 1..=t_max` and stops at the
/// first `t0` with `steps < t0`. Flagged runs never count as a cap. A cap is
/// confirmed by replaying its transcript on longer pads.
///
/// Also returns every report measured, keyed by `t`.
pub fn detect_runtime_cap_with_reports(
    a: &Acceptor,
    machine: &Machine,
    input: &BitString,
    t_max: u64,
    step_budget: u64,
) -> (CapReport, Vec<(u64, RunReport)>) {
    let base = Instance::new(machine.clone(), input.clone(), 0);
    let mut reports = Vec::new();
    for t in 1..=t_max {
        let inst = base.with_bound(t);
        let r = run_measured(a, inst.encoded(), step_budget);
        let capped = !r.is_flagged() && r.steps < t;
        reports.push((t, r.clone()));
        if !capped {
            continue;
        }
        let confirmations = replay_points(t, t_max)
            .into_iter()
            .map(|t2| {
                let longer = base.with_bound(t2);
                match replay_transcript(a, &r, longer.encoded(), step_budget) {
                    Ok(again) => {
                        let c = CapConfirmation {
                            t: t2,
                            outcome: again.outcome,
                            steps: again.steps,
                            matched: true,
                            mismatch: None,
                        };
                        reports.push((t2, again));
                        c
                    }
                    Err(e) => CapConfirmation {
                        t: t2,
                        outcome: Outcome::BudgetFlag,
                        steps: 0,
                        matched: false,
                        mismatch: Some(e.to_string()),
                    },
                }
            })
            .collect();
        let report = CapReport::Cap {
            t0: t,
            steps0: r.steps,
            outcome: r.outcome,
            confirmations,
        };
        return (report, reports);
    }
    (CapReport::NoCapUpTo { t_max }, reports)
}

pub fn detect_runtime_cap(
    a: &Acceptor,
    machine: &Machine,
    input: &BitString,
    t_max: u64,
    step_budget: u64,
) -> CapReport {
    detect_runtime_cap_with_reports(a, machine, input, t_max, step_budget).0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum HardPairResult {
    HardPair { pair: HaltingPair },
    NoneFound,
}

/// The first pool pair on which `a` shows no cap up to `t_max`.
pub fn find_hard_pair(
    a: &Acceptor,
    pool: &[HaltingPair],
    t_max: u64,
    step_budget: u64,
) -> HardPairResult {
    pool.iter()
        .find(|p| !detect_runtime_cap(a, &p.machine, &p.input, t_max, step_budget).is_cap())
        .map_or(HardPairResult::NoneFound, |p| HardPairResult::HardPair { pair: p.clone() })
}
