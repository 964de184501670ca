//! Instrumented execution of acceptors.
//!
//! An acceptor sees its input only through an [`InputReader`], which answers
//! `read_at(pos)` with `Zero`, `One` or `PastEnd` and offers no length query.
//! Every read costs one internal operation; acceptors may charge more for
//! their own work. The reported step count is
//! `max(internal_ops, max_pos_read + 1)`, so a run can never be cheaper than
//! the input prefix it looked at.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{BitSource, BitString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReadResult {
    Zero,
    One,
    PastEnd,
}

impl ReadResult {
    pub fn bit(self) -> Option<bool> {
        match self {
            ReadResult::Zero => Some(false),
            ReadResult::One => Some(true),
            ReadResult::PastEnd => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Accept,
    Reject,
    BudgetFlag,
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Accept => Outcome::Accept,
            Verdict::Reject => Outcome::Reject,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Accept => "Accept",
            Outcome::Reject => "Reject",
            Outcome::BudgetFlag => "BudgetFlag",
        })
    }
}

/// Why a run stopped before producing a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum Interrupt {
    #[error("step budget exhausted")]
    StepBudget,
    #[error("inner decider exceeded its configuration budget")]
    DeciderBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReadEvent {
    pub pos: usize,
    pub result: ReadResult,
}

#[derive(Debug)]
struct Meter {
    ops: u64,
    budget: u64,
}

impl Meter {
    fn charge(&mut self, n: u64) -> Result<(), Interrupt> {
        let ops = self.ops.saturating_add(n);
        if ops > self.budget {
            self.ops = self.budget;
            return Err(Interrupt::StepBudget);
        }
        self.ops = ops;
        Ok(())
    }
}

/// The only window an acceptor has onto its input.
pub struct InputReader<'a> {
    input: &'a [bool],
    meter: &'a mut Meter,
    log: Option<Vec<ReadEvent>>,
}

impl<'a> InputReader<'a> {
    pub fn read_at(&mut self, pos: usize) -> Result<ReadResult, Interrupt> {
        self.meter.charge(1)?;
        let result = match self.input.get(pos) {
            Some(false) => ReadResult::Zero,
            Some(true) => ReadResult::One,
            None => ReadResult::PastEnd,
        };
        if let Some(log) = self.log.as_mut() {
            log.push(ReadEvent { pos, result });
        }
        Ok(result)
    }

    /// Charges `n` internal operations for work that reads nothing.
    pub fn charge(&mut self, n: u64) -> Result<(), Interrupt> {
        self.meter.charge(n)
    }

    /// A reader over a tape the acceptor produced itself. Reads on it are
    /// charged to the same meter but do not count as input positions.
    pub fn derived<'b>(&'b mut self, tape: &'b [bool]) -> InputReader<'b> {
        InputReader {
            input: tape,
            meter: self.meter,
            log: None,
        }
    }

    /// Reads positions `0, 1, ...` until `PastEnd`.
    pub fn read_all(&mut self) -> Result<Vec<bool>, Interrupt> {
        let mut bits = Vec::new();
        while let Some(b) = self.read_at(bits.len())?.bit() {
            bits.push(b);
        }
        Ok(bits)
    }

    /// Sequential [`BitSource`] view starting at `start`.
    pub fn stream_from(&mut self, start: usize) -> ReaderStream<'_, 'a> {
        ReaderStream { reader: self, pos: start }
    }
}

/// Streams bits from an [`InputReader`], one read per bit.
pub struct ReaderStream<'r, 'a> {
    reader: &'r mut InputReader<'a>,
    pos: usize,
}

impl BitSource for ReaderStream<'_, '_> {
    type Error = Interrupt;

    fn next_bit(&mut self) -> Result<Option<bool>, Interrupt> {
        let bit = self.reader.read_at(self.pos)?.bit();
        if bit.is_some() {
            self.pos += 1;
        }
        Ok(bit)
    }

    fn position(&self) -> usize {
        self.pos
    }
}

pub type Behavior = Arc<dyn Fn(&mut InputReader<'_>) -> Result<Verdict, Interrupt> + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Reference,
    Transformed { base: String, pair: String },
    Composed { base: String, reduction: String },
    External,
}

/// A deterministic decision procedure over an instrumented input.
#[derive(Clone)]
pub struct Acceptor {
    name: String,
    provenance: Provenance,
    behavior: Behavior,
}

impl Acceptor {
    pub fn new<F>(name: impl Into<String>, provenance: Provenance, behavior: F) -> Acceptor
    where
        F: Fn(&mut InputReader<'_>) -> Result<Verdict, Interrupt> + Send + Sync + 'static,
    {
        Acceptor {
            name: name.into(),
            provenance,
            behavior: Arc::new(behavior),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn behavior(&self) -> &Behavior {
        &self.behavior
    }

    /// Runs the behavior inside another acceptor's run (no verdict charge).
    pub fn run_within(&self, reader: &mut InputReader<'_>) -> Result<Verdict, Interrupt> {
        (self.behavior)(reader)
    }
}

impl fmt::Debug for Acceptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Acceptor")
            .field("name", &self.name)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub acceptor: String,
    pub outcome: Outcome,
    pub steps: u64,
    pub max_pos_read: Option<u64>,
    pub internal_ops: u64,
    pub input_length: u64,
    pub interrupt: Option<Interrupt>,
    /// Every input read, in order.
    pub reads: Vec<ReadEvent>,
}

impl RunReport {
    pub fn is_flagged(&self) -> bool {
        self.outcome == Outcome::BudgetFlag
    }

    /// The cost-model floor `steps >= max_pos_read + 1`.
    pub fn satisfies_floor(&self) -> bool {
        match self.max_pos_read {
            Some(p) => self.steps > p,
            None => true,
        }
    }
}

/// Runs `a` on `input` and measures it. One extra internal operation is
/// charged for emitting the verdict.
pub fn run_measured(a: &Acceptor, input: &BitString, step_budget: u64) -> RunReport {
    let mut meter = Meter {
        ops: 0,
        budget: step_budget,
    };
    let mut reader = InputReader {
        input: input.bits(),
        meter: &mut meter,
        log: Some(Vec::new()),
    };
    let result = (a.behavior)(&mut reader);
    let reads = reader.log.take().unwrap_or_default();
    let result = result.and_then(|v| meter.charge(1).map(|_| v));
    let (outcome, interrupt) = match result {
        Ok(v) => (v.into(), None),
        Err(i) => (Outcome::BudgetFlag, Some(i)),
    };
    let max_pos_read = reads.iter().map(|r| r.pos as u64).max();
    let internal_ops = meter.ops;
    let steps = match max_pos_read {
        Some(p) => internal_ops.max(p + 1),
        None => internal_ops,
    };
    RunReport {
        acceptor: a.name.clone(),
        outcome,
        steps,
        max_pos_read,
        internal_ops,
        input_length: input.len() as u64,
        interrupt,
        reads,
    }
}

/// One CSV row of raw measurements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasurementRow {
    pub acceptor: String,
    pub input_id: String,
    pub outcome: Outcome,
    pub steps: u64,
    pub max_pos_read: Option<u64>,
    pub internal_ops: u64,
    pub input_length: u64,
}

impl MeasurementRow {
    pub fn from_report(input_id: impl Into<String>, r: &RunReport) -> Self {
        MeasurementRow {
            acceptor: r.acceptor.clone(),
            input_id: input_id.into(),
            outcome: r.outcome,
            steps: r.steps,
            max_pos_read: r.max_pos_read,
            internal_ops: r.internal_ops,
            input_length: r.input_length,
        }
    }

    pub fn satisfies_floor(&self) -> bool {
        self.max_pos_read.is_none_or(|p| self.steps > p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayMismatch {
    #[error("input disagrees with the transcript at position {pos}")]
    InputDiffers { pos: usize },
    #[error("replayed run diverged: {what}")]
    Diverged { what: &'static str },
}

/// Checks that `input` answers every read of `earlier` identically, then
/// reruns `a` on it and checks the outcome, read sequence and step count
/// all match.
pub fn replay_transcript(
    a: &Acceptor,
    earlier: &RunReport,
    input: &BitString,
    step_budget: u64,
) -> Result<RunReport, ReplayMismatch> {
    for ev in &earlier.reads {
        let now = match input.bits().get(ev.pos) {
            Some(false) => ReadResult::Zero,
            Some(true) => ReadResult::One,
            None => ReadResult::PastEnd,
        };
        if now != ev.result {
            return Err(ReplayMismatch::InputDiffers { pos: ev.pos });
        }
    }
    let again = run_measured(a, input, step_budget);
    if again.outcome != earlier.outcome {
        return Err(ReplayMismatch::Diverged { what: "outcome" });
    }
    if again.reads != earlier.reads {
        return Err(ReplayMismatch::Diverged { what: "read sequence" });
    }
    if again.steps != earlier.steps {
        return Err(ReplayMismatch::Diverged { what: "steps" });
    }
    Ok(again)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn silent_reject_costs_the_verdict_only() {
        let a = Acceptor::new("silent", Provenance::External, |_| Ok(Verdict::Reject));
        let r = run_measured(&a, &bits("0101"), 100);
        assert_eq!(r.outcome, Outcome::Reject);
        assert_eq!(r.max_pos_read, None);
        assert_eq!(r.steps, r.internal_ops);
        assert_eq!(r.steps, 1);
    }

    #[test]
    fn far_read_sets_the_floor() {
        let a = Acceptor::new("peek41", Provenance::External, |r| {
            r.read_at(41)?;
            Ok(Verdict::Accept)
        });
        let r = run_measured(&a, &bits("0"), 100);
        assert_eq!(r.outcome, Outcome::Accept);
        assert_eq!(r.max_pos_read, Some(41));
        assert_eq!(r.internal_ops, 2);
        assert_eq!(r.steps, 42);
    }

    #[test]
    fn read_all_probes_past_the_end() {
        let a = Acceptor::new("all", Provenance::External, |r| {
            let v = r.read_all()?;
            Ok(if v.len() == 3 { Verdict::Accept } else { Verdict::Reject })
        });
        let r = run_measured(&a, &bits("110"), 100);
        assert_eq!(r.outcome, Outcome::Accept);
        assert_eq!(r.max_pos_read, Some(3));
        assert_eq!(r.reads.last().unwrap().result, ReadResult::PastEnd);
        assert_eq!(r.steps, 5);
    }

    #[test]
    fn budget_overrun_is_flagged() {
        let a = Acceptor::new("spin", Provenance::External, |r| {
            r.charge(1_000)?;
            Ok(Verdict::Accept)
        });
        let r = run_measured(&a, &bits(""), 10);
        assert_eq!(r.outcome, Outcome::BudgetFlag);
        assert_eq!(r.interrupt, Some(Interrupt::StepBudget));
        assert!(r.internal_ops <= 10);
    }

    #[test]
    fn derived_reads_do_not_move_the_floor() {
        let a = Acceptor::new("inner", Provenance::External, |r| {
            let tape = vec![true; 50];
            let mut inner = r.derived(&tape);
            inner.read_at(49)?;
            Ok(Verdict::Accept)
        });
        let r = run_measured(&a, &bits("1"), 100);
        assert_eq!(r.max_pos_read, None);
        assert_eq!(r.internal_ops, 2);
    }

    #[test]
    fn replay_detects_input_change() {
        let a = Acceptor::new("first", Provenance::External, |r| {
            Ok(match r.read_at(0)? {
                ReadResult::One => Verdict::Accept,
                _ => Verdict::Reject,
            })
        });
        let run = run_measured(&a, &bits("10"), 100);
        assert!(replay_transcript(&a, &run, &bits("1111"), 100).is_ok());
        assert_eq!(
            replay_transcript(&a, &run, &bits("0"), 100),
            Err(ReplayMismatch::InputDiffers { pos: 0 })
        );
    }
}
