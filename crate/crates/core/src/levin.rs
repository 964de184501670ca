//! Universal witness search by dovetailing, and witness search from a
//! decision oracle by self-reduction.
//!
//! # Program space
//!
//! Enumerated programs are straight-line printer machines: program `w`
//! (a bit string) has `|w| + 1` states, state `j` writes `w[j]` on blank and
//! moves right into state `j + 1`, and the last state has no transitions.
//! Programs are ordered by their canonical machine encoding (shortlex), which
//! works out to: by `|w|`, then by the number of ones in `w`, then
//! lexicographically. A program is run on the empty tape; once it halts, the
//! non-blank tape prefix is parsed as a sequence of unary numerals
//! `1^c 0` and the result is the candidate path.
//!
//! # Schedule
//!
//! In phase `k` every live program `i <= k` is granted `2^(k-i)` further
//! steps, so after phase `k` a program that is still running has been
//! granted exactly `2^(k-i+1) - 1` steps. Halting costs one step, and
//! checking a candidate path of length `l` costs `l + 1` steps. The budget
//! limits steps actually consumed.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{BitString, Instance};
use crate::languages::decide::{decide_bhp, verify_choices, verify_path, DecideError};
use crate::machine::{force_prefix, Configuration, Machine, Move, Path, Symbol, Transition};

/// Steps granted to `program` in `phase`.
pub fn allotment(phase: u64, program: u64) -> u64 {
    if program > phase {
        0
    } else {
        1u64.checked_shl((phase - program) as u32).unwrap_or(u64::MAX)
    }
}

/// Steps granted to `program` over phases `0..=phase`, in closed form.
pub fn cumulative_allotment(phase: u64, program: u64) -> u64 {
    if program > phase {
        0
    } else {
        1u64.checked_shl((phase - program + 1) as u32)
            .map_or(u64::MAX, |v| v - 1)
    }
}

/// Total nominal grant of phase `k`, `2^(k+1) - 1`.
pub fn phase_total(phase: u64) -> u64 {
    cumulative_allotment(phase, 0)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// The bit string printed by program `index`.
pub fn printer_word(index: u64) -> BitString {
    let n = 63 - (index + 1).leading_zeros() as u64;
    let mut rank = index + 1 - (1u64 << n);
    let mut ones = 0;
    while rank >= binomial(n, ones) {
        rank -= binomial(n, ones);
        ones += 1;
    }
    let mut bits = Vec::with_capacity(n as usize);
    for pos in 0..n {
        let with_zero = binomial(n - pos - 1, ones);
        if rank < with_zero {
            bits.push(false);
        } else {
            rank -= with_zero;
            bits.push(true);
            ones -= 1;
        }
    }
    BitString::new(bits)
}

/// The straight-line machine that prints `w` on an empty tape.
pub fn printer_machine(w: &BitString) -> Machine {
    Machine::new(
        w.len() + 1,
        [],
        w.iter().enumerate().map(|(j, b)| {
            (j, Symbol::Blank, Transition::new(j + 1, Symbol::from_bit(b), Move::Right))
        }),
    )
    .expect("printer machines are well-formed")
}

/// Runs a deterministic machine from the empty tape until it halts (dead end
/// or accept state) or `max_steps` moves have been made. Returns the final
/// configuration and whether it halted.
pub fn run_deterministic(m: &Machine, max_steps: u64) -> (Configuration, bool) {
    let mut c = Configuration::initial(&BitString::default());
    loop {
        if m.is_accepting(c.state) {
            return (c, true);
        }
        let Some(tr) = m.transitions(c.state, c.scanned()).first() else {
            return (c, true);
        };
        if c.steps >= max_steps {
            return (c, false);
        }
        c = c.apply(tr);
    }
}

/// Parses the non-blank tape prefix as unary numerals `1^c 0`.
pub fn decode_tape_path(tape: &[Symbol]) -> Option<Path> {
    let mut choices = Vec::new();
    let mut run = 0;
    for &s in tape {
        match s {
            Symbol::One => run += 1,
            Symbol::Zero => {
                choices.push(run);
                run = 0;
            }
            Symbol::Blank => break,
        }
    }
    (run == 0).then_some(Path(choices))
}

/// What a program does when run to completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramRun {
    /// Steps consumed, including the final halting step.
    pub cost: u64,
    pub candidate: Option<Path>,
}

pub fn execute_program(index: u64) -> ProgramRun {
    let w = printer_word(index);
    let m = printer_machine(&w);
    let (end, halted) = run_deterministic(&m, w.len() as u64 + 1);
    debug_assert!(halted);
    ProgramRun {
        cost: end.steps + 1,
        candidate: decode_tape_path(end.tape()),
    }
}

/// Number of programs whose runs are computed once per process and kept.
pub const CATALOG_SIZE: u64 = 1 << 20;

/// Packed runs of programs `0..CATALOG_SIZE`.
struct Catalog {
    cost: Vec<u8>,
    /// Candidate `k` is `choices[start[k]..start[k] + len[k]]`; a length of
    /// `u8::MAX` marks an unparsable tape.
    start: Vec<u32>,
    len: Vec<u8>,
    choices: Vec<u8>,
}

const NO_CANDIDATE: u8 = u8::MAX;

fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let mut cat = Catalog {
            cost: Vec::with_capacity(CATALOG_SIZE as usize),
            start: Vec::with_capacity(CATALOG_SIZE as usize),
            len: Vec::with_capacity(CATALOG_SIZE as usize),
            choices: Vec::new(),
        };
        for index in 0..CATALOG_SIZE {
            let run = execute_program(index);
            cat.cost.push(run.cost as u8);
            cat.start.push(cat.choices.len() as u32);
            match run.candidate {
                Some(p) => {
                    cat.len.push(p.len() as u8);
                    cat.choices.extend(p.choices().iter().map(|&c| c as u8));
                }
                None => cat.len.push(NO_CANDIDATE),
            }
        }
        cat
    })
}

/// A program run, borrowed from the catalog when possible.
enum RunView {
    Cached(u64),
    Owned(ProgramRun),
}

impl RunView {
    fn of(index: u64) -> Self {
        if index < CATALOG_SIZE {
            RunView::Cached(index)
        } else {
            RunView::Owned(execute_program(index))
        }
    }

    fn cost(&self) -> u64 {
        match self {
            RunView::Cached(k) => catalog().cost[*k as usize] as u64,
            RunView::Owned(r) => r.cost,
        }
    }

    /// Writes the candidate into `buf`; false when the tape did not parse.
    fn candidate_into(&self, buf: &mut Vec<usize>) -> bool {
        buf.clear();
        match self {
            RunView::Cached(k) => {
                let cat = catalog();
                let k = *k as usize;
                if cat.len[k] == NO_CANDIDATE {
                    return false;
                }
                let from = cat.start[k] as usize;
                let to = from + cat.len[k] as usize;
                buf.extend(cat.choices[from..to].iter().map(|&c| c as usize));
                true
            }
            RunView::Owned(r) => match &r.candidate {
                Some(p) => {
                    buf.extend_from_slice(p.choices());
                    true
                }
                None => false,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevinWitness {
    pub path: Path,
    pub program_index: u64,
    pub phase: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevinOutcome {
    pub witness: Option<LevinWitness>,
    pub steps_used: u64,
    pub phases: u64,
    /// Number of live programs whose grant total was checked against the
    /// closed form after a phase.
    pub accounting_checks: u64,
    pub accounting_ok: bool,
}

impl LevinOutcome {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }
}

struct Live {
    index: u64,
    granted: u64,
    used: u64,
    run: RunView,
}

/// Dovetailed search for a path accepted by [`verify_path`] on `i`.
/// No witness only means the budget ran out.
pub fn levin_search_witness(i: &Instance, total_budget: u64) -> LevinOutcome {
    if total_budget > 0 {
        catalog();
    }
    let mut steps_used = 0u64;
    let mut live: Vec<Live> = Vec::new();
    let mut checks = 0u64;
    let mut accounting_ok = true;
    let mut candidate = Vec::new();
    let not_found = |steps_used, phases, checks, ok| LevinOutcome {
        witness: None,
        steps_used,
        phases,
        accounting_checks: checks,
        accounting_ok: ok,
    };
    for phase in 0u64.. {
        live.push(Live {
            index: phase,
            granted: 0,
            used: 0,
            run: RunView::of(phase),
        });
        for p in live.iter_mut() {
            let grant = allotment(phase, p.index);
            p.granted = p.granted.saturating_add(grant);
            let cost = p.run.cost();
            let take = grant.min(cost - p.used).min(total_budget - steps_used);
            p.used += take;
            steps_used += take;
            if p.used == cost {
                if p.run.candidate_into(&mut candidate) {
                    let check_cost = candidate.len() as u64 + 1;
                    if total_budget - steps_used < check_cost {
                        return not_found(total_budget, phase, checks, accounting_ok);
                    }
                    steps_used += check_cost;
                    if verify_choices(i, &candidate) {
                        return LevinOutcome {
                            witness: Some(LevinWitness {
                                path: Path(candidate),
                                program_index: p.index,
                                phase,
                            }),
                            steps_used,
                            phases: phase + 1,
                            accounting_checks: checks,
                            accounting_ok,
                        };
                    }
                }
            } else if steps_used == total_budget {
                return not_found(steps_used, phase, checks, accounting_ok);
            }
        }
        live.retain(|p| p.used < p.run.cost());
        for p in &live {
            checks += 1;
            accounting_ok &= p.granted == cumulative_allotment(phase, p.index);
        }
        if steps_used >= total_budget {
            return not_found(steps_used, phase + 1, checks, accounting_ok);
        }
    }
    unreachable!("phase counter is unbounded")
}

/// Runs [`levin_search_witness`] with budgets `start, 2*start, ...` up to
/// `max`, stopping at the first success.
pub fn levin_search_doubling(i: &Instance, start: u64, max: u64) -> LevinOutcome {
    let mut budget = start.max(1);
    loop {
        let out = levin_search_witness(i, budget);
        if out.found() || budget >= max {
            return out;
        }
        budget = (budget * 2).min(max);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SchnorrOutcome {
    pub path: Option<Path>,
    pub oracle_calls: u64,
    /// `t * B + 1` for the instance, with `B` its maximum branching.
    pub call_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchnorrError {
    #[error("oracle answered yes for the parent but no for every branch at depth {depth}")]
    OracleInconsistent { depth: usize },
    #[error("oracle failed: {0}")]
    Oracle(#[from] DecideError),
}

/// Builds an accepting path one choice at a time using only yes/no answers
/// from `oracle` on instances `<force_prefix(N, prefix ++ [c]), x, 1^t>`.
pub fn schnorr_search_from_decision<F>(i: &Instance, mut oracle: F) -> Result<SchnorrOutcome, SchnorrError>
where
    F: FnMut(&Instance) -> Result<bool, DecideError>,
{
    let m = i.machine();
    let call_bound = i.bound() * m.max_branching() as u64 + 1;
    let mut calls = 1;
    if !oracle(i)? {
        return Ok(SchnorrOutcome {
            path: None,
            oracle_calls: calls,
            call_bound,
        });
    }
    let mut prefix = Vec::new();
    let mut config = Configuration::initial(i.input());
    loop {
        if m.is_accepting(config.state) {
            break;
        }
        let depth = prefix.len();
        if depth as u64 >= i.bound() {
            return Err(SchnorrError::OracleInconsistent { depth });
        }
        let set = m.transitions(config.state, config.scanned());
        let mut committed = None;
        for (c, tr) in set.iter().enumerate() {
            prefix.push(c);
            calls += 1;
            let probe = Instance::new(force_prefix(m, &prefix), i.input().clone(), i.bound());
            if oracle(&probe)? {
                committed = Some(tr);
                break;
            }
            prefix.pop();
        }
        match committed {
            Some(tr) => config = config.apply(tr),
            None => return Err(SchnorrError::OracleInconsistent { depth }),
        }
    }
    let path = Path(prefix);
    debug_assert!(verify_path(i, &path));
    Ok(SchnorrOutcome {
        path: Some(path),
        oracle_calls: calls,
        call_bound,
    })
}

/// `decide_bhp` with the given configuration budget, as a Schnorr oracle.
pub fn bhp_oracle(budget: u64) -> impl FnMut(&Instance) -> Result<bool, DecideError> {
    move |inst| decide_bhp(inst, budget).map(|a| a.is_yes())
}
