//! Empirical polynomial-dominance fits and the pad-growth probe.
//!
//! Both are statements about the measured corpus only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{BitString, Instance};
use crate::machine::Machine;
use crate::runtime::{run_measured, Acceptor, Outcome};

/// Largest constant `check_p_dominance` will report.
pub const DEFAULT_C_CAP: u64 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum Dominance {
    /// `steps_a(x) <= c * (|x| + steps_b(x))^d` on every corpus member.
    Dominates { c: u64, d: u32 },
    #[serde(rename_all = "camelCase")]
    NotWithinDegree { max_degree: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominanceError {
    #[error("{acceptor} answers {outcome} on corpus member {input_id}")]
    CorpusOutsideL {
        acceptor: String,
        input_id: String,
        outcome: Outcome,
    },
}

/// Least integer `c` with `num <= c * den`.
fn ceil_ratio(num: u128, den: u128) -> u128 {
    if den == 0 {
        if num == 0 { 0 } else { u128::MAX }
    } else {
        num.div_ceil(den)
    }
}

fn pow(base: u64, d: u32) -> u128 {
    (base as u128).checked_pow(d).unwrap_or(u128::MAX)
}

/// Searches the least degree `d <= max_degree`, and for it the least
/// constant `c <= c_cap`, such that `steps_a(x) <= c (|x| + steps_b(x))^d`
/// over `corpus`. Every corpus member must be accepted by both.
pub fn check_p_dominance(
    a: &Acceptor,
    b: &Acceptor,
    corpus: &[(String, Instance)],
    max_degree: u32,
    c_cap: u64,
    step_budget: u64,
) -> Result<Dominance, DominanceError> {
    let samples: Vec<(u64, u64, u64)> = corpus
        .par_iter()
        .map(|(id, inst)| {
            let ra = run_measured(a, inst.encoded(), step_budget);
            let rb = run_measured(b, inst.encoded(), step_budget);
            for r in [&ra, &rb] {
                if r.outcome != Outcome::Accept {
                    return Err(DominanceError::CorpusOutsideL {
                        acceptor: r.acceptor.clone(),
                        input_id: id.clone(),
                        outcome: r.outcome,
                    });
                }
            }
            Ok((inst.encoded().len() as u64, ra.steps, rb.steps))
        })
        .collect::<Result<_, _>>()?;
    Ok(dominance_from_samples(&samples, max_degree, c_cap))
}

/// The fit of [`check_p_dominance`] on measured `(|x|, steps_a, steps_b)`.
pub fn dominance_from_samples(samples: &[(u64, u64, u64)], max_degree: u32, c_cap: u64) -> Dominance {
    for d in 0..=max_degree {
        let c = samples
            .iter()
            .map(|&(len, sa, sb)| ceil_ratio(sa as u128, pow(len + sb, d)))
            .max()
            .unwrap_or(0)
            .max(1);
        if c <= c_cap as u128 {
            return Dominance::Dominates { c: c as u64, d };
        }
    }
    Dominance::NotWithinDegree { max_degree }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnvelopeFit {
    pub degree: u32,
    /// Least `c` with `f(t) <= c * max(t,1)^d` over the whole range.
    pub smallest_c: u64,
    /// The same constant fitted on the first half of the range only.
    pub early_c: u64,
    /// First `t` in the range where `f(t) > early_c * max(t,1)^d`.
    pub first_violation: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StarProbeReport {
    pub acceptor: String,
    pub pair: String,
    /// `(t, steps)`; flagged runs are left out.
    pub samples: Vec<(u64, u64)>,
    pub fits: Vec<EnvelopeFit>,
}

fn fit(samples: &[(u64, u64)], d: u32) -> u64 {
    samples
        .iter()
        .map(|&(t, s)| ceil_ratio(s as u128, pow(t.max(1), d)))
        .max()
        .unwrap_or(0)
        .min(u64::MAX as u128) as u64
}

/// Envelope fits of `(t, steps)` samples, one per degree. The early
/// constant is fitted on the first half of the samples and then checked on
/// all of them.
pub fn fit_envelopes(samples: &[(u64, u64)], degrees: &[u32]) -> Vec<EnvelopeFit> {
    if samples.is_empty() {
        return Vec::new();
    }
    let early = &samples[..samples.len().div_ceil(2)];
    degrees
        .iter()
        .map(|&d| {
            let early_c = fit(early, d);
            let first_violation = samples
                .iter()
                .find(|&&(t, s)| s as u128 > early_c as u128 * pow(t.max(1), d))
                .map(|&(t, _)| t);
            EnvelopeFit {
                degree: d,
                smallest_c: fit(samples, d),
                early_c,
                first_violation,
            }
        })
        .collect()
}

/// Tabulates `f(t) = steps of a on <machine, input, 1^t>` over `ts` and fits
/// `c * t^d` envelopes for each degree. Descriptive only.
pub fn star_condition_probe(
    a: &Acceptor,
    pair_name: &str,
    machine: &Machine,
    input: &BitString,
    ts: &[u64],
    degrees: &[u32],
    step_budget: u64,
) -> StarProbeReport {
    let base = Instance::new(machine.clone(), input.clone(), 0);
    let samples: Vec<(u64, u64)> = ts
        .par_iter()
        .filter_map(|&t| {
            let r = run_measured(a, base.with_bound(t).encoded(), step_budget);
            (!r.is_flagged()).then_some((t, r.steps))
        })
        .collect();
    let fits = fit_envelopes(&samples, degrees);
    StarProbeReport {
        acceptor: a.name().to_string(),
        pair: pair_name.to_string(),
        samples,
        fits,
    }
}
