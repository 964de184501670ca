//! Single-tape Turing machines over `{0, 1, blank}`.
//!
//! A [`Machine`] may be nondeterministic: every `(state, symbol)` pair maps to
//! an ordered list of transitions, and the position in that list is the
//! branch index used by [`Path`]. State 0 is the start state. A configuration
//! with no applicable transition is a dead end and rejects; acceptance is
//! decided by the state of the current configuration, before any step.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "_")]
    Blank,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Blank];

    /// Numeric code used by the bit encoding (`2` is blank).
    pub fn code(self) -> usize {
        match self {
            Symbol::Zero => 0,
            Symbol::One => 1,
            Symbol::Blank => 2,
        }
    }

    pub fn from_code(code: usize) -> Option<Symbol> {
        Symbol::ALL.get(code).copied()
    }

    pub fn from_bit(bit: bool) -> Symbol {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Blank => "_",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Move {
    pub fn code(self) -> usize {
        match self {
            Move::Left => 0,
            Move::Right => 1,
        }
    }

    pub fn from_code(code: usize) -> Option<Move> {
        match code {
            0 => Some(Move::Left),
            1 => Some(Move::Right),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub next: usize,
    pub write: Symbol,
    pub dir: Move,
}

impl Transition {
    pub fn new(next: usize, write: Symbol, dir: Move) -> Self {
        Transition { next, write, dir }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("a machine needs at least one state")]
    NoStates,
    #[error("state {state} out of range for a {num_states}-state machine")]
    StateOutOfRange { state: usize, num_states: usize },
    #[error("duplicate transition for (state {state}, symbol {symbol})")]
    DuplicateTransition { state: usize, symbol: Symbol },
}

/// A (possibly nondeterministic) transition table.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MachineJson", into = "MachineJson")]
pub struct Machine {
    num_states: usize,
    accept: BTreeSet<usize>,
    table: Vec<[Vec<Transition>; 3]>,
}

impl Machine {
    /// Builds a machine. Entries for the same `(state, symbol)` keep their
    /// relative order, which fixes the branch indices.
    pub fn new<A, E>(num_states: usize, accept: A, entries: E) -> Result<Machine, MachineError>
    where
        A: IntoIterator<Item = usize>,
        E: IntoIterator<Item = (usize, Symbol, Transition)>,
    {
        if num_states == 0 {
            return Err(MachineError::NoStates);
        }
        let in_range = |state: usize| {
            if state < num_states {
                Ok(state)
            } else {
                Err(MachineError::StateOutOfRange { state, num_states })
            }
        };
        let accept = accept
            .into_iter()
            .map(in_range)
            .collect::<Result<BTreeSet<_>, _>>()?;
        let mut table = vec![[Vec::new(), Vec::new(), Vec::new()]; num_states];
        for (state, symbol, tr) in entries {
            in_range(state)?;
            in_range(tr.next)?;
            let set: &mut Vec<Transition> = &mut table[state][symbol.code()];
            if set.contains(&tr) {
                return Err(MachineError::DuplicateTransition { state, symbol });
            }
            set.push(tr);
        }
        Ok(Machine {
            num_states,
            accept,
            table,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn accept_states(&self) -> &BTreeSet<usize> {
        &self.accept
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accept.contains(&state)
    }

    pub fn transitions(&self, state: usize, symbol: Symbol) -> &[Transition] {
        &self.table[state][symbol.code()]
    }

    /// All entries in canonical order: by state, then symbol, then branch.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Symbol, &Transition)> + '_ {
        self.table.iter().enumerate().flat_map(|(state, row)| {
            Symbol::ALL
                .iter()
                .flat_map(move |&sym| row[sym.code()].iter().map(move |tr| (state, sym, tr)))
        })
    }

    pub fn num_entries(&self) -> usize {
        self.table.iter().flatten().map(Vec::len).sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.table.iter().flatten().all(|set| set.len() <= 1)
    }

    /// Largest transition set size; 0 for a machine with no transitions.
    pub fn max_branching(&self) -> usize {
        self.table.iter().flatten().map(Vec::len).max().unwrap_or(0)
    }

    /// Returns this machine with one extra state that is neither reachable
    /// nor accepting.
    pub fn with_unreachable_state(&self) -> Machine {
        let mut out = self.clone();
        out.num_states += 1;
        out.table.push([Vec::new(), Vec::new(), Vec::new()]);
        out
    }

    /// Removes the highest-numbered state when nothing refers to it and it
    /// carries no transitions. Returns `None` when that is not the case.
    pub fn strip_unreachable_state(&self) -> Option<Machine> {
        let last = self.num_states - 1;
        if last == 0 || self.accept.contains(&last) {
            return None;
        }
        if self.table[last].iter().any(|set| !set.is_empty()) {
            return None;
        }
        if self.entries().any(|(_, _, tr)| tr.next == last) {
            return None;
        }
        let mut out = self.clone();
        out.num_states -= 1;
        out.table.pop();
        Some(out)
    }
}

impl fmt::Debug for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Machine[{} states, accept {:?};", self.num_states, self.accept)?;
        for (state, sym, tr) in self.entries() {
            write!(f, " q{state},{sym}->q{},{},{:?}", tr.next, tr.write, tr.dir)?;
        }
        write!(f, "]")
    }
}

/// JSON mirror of [`Machine`] used for hand-written machine files.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct MachineJson {
    num_states: usize,
    accept_states: Vec<usize>,
    transitions: Vec<TransitionJson>,
}

#[derive(Serialize, Deserialize)]
struct TransitionJson {
    state: usize,
    read: Symbol,
    next: usize,
    write: Symbol,
    #[serde(rename = "move")]
    dir: Move,
}

impl TryFrom<MachineJson> for Machine {
    type Error = MachineError;

    fn try_from(json: MachineJson) -> Result<Self, Self::Error> {
        Machine::new(
            json.num_states,
            json.accept_states,
            json.transitions
                .into_iter()
                .map(|t| (t.state, t.read, Transition::new(t.next, t.write, t.dir))),
        )
    }
}

impl From<Machine> for MachineJson {
    fn from(m: Machine) -> Self {
        MachineJson {
            num_states: m.num_states,
            accept_states: m.accept.iter().copied().collect(),
            transitions: m
                .entries()
                .map(|(state, read, tr)| TransitionJson {
                    state,
                    read,
                    next: tr.next,
                    write: tr.write,
                    dir: tr.dir,
                })
                .collect(),
        }
    }
}

/// A machine configuration on a one-way infinite tape.
///
/// The tape never stores trailing blanks, so two configurations are equal
/// exactly when they describe the same machine situation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: usize,
    tape: Vec<Symbol>,
    pub head: usize,
    pub steps: u64,
}

impl Configuration {
    pub fn initial(input: &BitString) -> Configuration {
        Configuration {
            state: 0,
            tape: input.iter().map(Symbol::from_bit).collect(),
            head: 0,
            steps: 0,
        }
    }

    pub fn symbol_at(&self, pos: usize) -> Symbol {
        self.tape.get(pos).copied().unwrap_or(Symbol::Blank)
    }

    /// Symbol under the head.
    pub fn scanned(&self) -> Symbol {
        self.symbol_at(self.head)
    }

    /// Non-blank tape prefix; cells past its end are blank.
    pub fn tape(&self) -> &[Symbol] {
        &self.tape
    }

    /// Applies one transition. A left move at cell 0 leaves the head at 0.
    pub fn apply(&self, tr: &Transition) -> Configuration {
        let mut tape = self.tape.clone();
        if self.head < tape.len() {
            tape[self.head] = tr.write;
        } else if tr.write != Symbol::Blank {
            tape.resize(self.head, Symbol::Blank);
            tape.push(tr.write);
        }
        while tape.last() == Some(&Symbol::Blank) {
            tape.pop();
        }
        let head = match tr.dir {
            Move::Left => self.head.saturating_sub(1),
            Move::Right => self.head + 1,
        };
        Configuration {
            state: tr.next,
            tape,
            head,
            steps: self.steps + 1,
        }
    }
}

/// Successors of `c`, one per transition entry in branch order. An empty
/// result means `c` is a dead end.
pub fn step_successors(m: &Machine, c: &Configuration) -> Vec<Configuration> {
    m.transitions(c.state, c.scanned())
        .iter()
        .map(|tr| c.apply(tr))
        .collect()
}

/// A sequence of branch choices, one per step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Path {
    fn from(v: Vec<usize>) -> Self {
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("choice {choice} at step {step} exceeds branching {width}")]
    ChoiceOutOfRange { step: usize, choice: usize, width: usize },
}

/// Replays `path` from the start configuration on `input`, following every
/// choice regardless of acceptance.
pub fn replay(m: &Machine, input: &BitString, path: &Path) -> Result<Configuration, ReplayError> {
    let mut c = Configuration::initial(input);
    for (step, &choice) in path.0.iter().enumerate() {
        let set = m.transitions(c.state, c.scanned());
        let tr = set.get(choice).ok_or(ReplayError::ChoiceOutOfRange {
            step,
            choice,
            width: set.len(),
        })?;
        c = c.apply(tr);
    }
    Ok(c)
}

/// Restricts the first step of `m` to branch `branch`.
///
/// The result has a fresh start state (index 0) whose transition on each
/// symbol `s` is the `branch`-th entry of `m`'s `(start, s)` set, retargeted
/// into a shifted copy of `m`. Symbols without such an entry get no
/// transition. If `m`'s start state accepts, the fresh start is a dead end,
/// since the only accepting path of `m` is then the empty one.
pub fn force_first_choice(m: &Machine, branch: usize) -> Machine {
    let shift = |tr: &Transition| Transition::new(tr.next + 1, tr.write, tr.dir);
    let mut entries = Vec::new();
    if !m.is_accepting(0) {
        for sym in Symbol::ALL {
            if let Some(tr) = m.transitions(0, sym).get(branch) {
                entries.push((0, sym, shift(tr)));
            }
        }
    }
    entries.extend(m.entries().map(|(q, s, tr)| (q + 1, s, shift(tr))));
    Machine::new(
        m.num_states + 1,
        m.accept.iter().map(|q| q + 1),
        entries,
    )
    .expect("shifted copy of a well-formed machine is well-formed")
}

/// Restricts the first `prefix.len()` steps of `m` to the given branches.
///
/// States are laid out in layers of `m.num_states()`: layer `j < k` is a copy
/// of `m` that may only take branch `prefix[j]`, and layer `k` is `m` itself.
/// Accepting paths of the result are exactly the accepting paths of `m` that
/// start with `prefix`, or stop early along it, with identical lengths.
pub fn force_prefix(m: &Machine, prefix: &[usize]) -> Machine {
    let n = m.num_states;
    let k = prefix.len();
    let mut entries = Vec::new();
    for (layer, &branch) in prefix.iter().enumerate() {
        for (q, row) in m.table.iter().enumerate() {
            for sym in Symbol::ALL {
                if let Some(tr) = row[sym.code()].get(branch) {
                    let next = (layer + 1) * n + tr.next;
                    entries.push((layer * n + q, sym, Transition::new(next, tr.write, tr.dir)));
                }
            }
        }
    }
    let base = k * n;
    entries.extend(
        m.entries()
            .map(|(q, s, tr)| (base + q, s, Transition::new(base + tr.next, tr.write, tr.dir))),
    );
    let accept = (0..=k).flat_map(|layer| m.accept.iter().map(move |q| layer * n + q));
    Machine::new((k + 1) * n, accept, entries).expect("layered copy is well-formed")
}

/// Small named machines used throughout tests and examples.
pub mod samples {
    use super::*;

    /// One state, no accept states, moves right forever rewriting each cell.
    pub fn loop_right() -> Machine {
        Machine::new(
            1,
            [],
            Symbol::ALL
                .iter()
                .map(|&s| (0, s, Transition::new(0, s, Move::Right))),
        )
        .unwrap()
    }

    /// One state, no accept states, no transitions.
    pub fn halt() -> Machine {
        Machine::new(1, [], []).unwrap()
    }

    /// One state which accepts immediately.
    pub fn accept_now() -> Machine {
        Machine::new(1, [0], []).unwrap()
    }

    /// Two states, `q1` accepting; on blank `q0` may stay in `q0` (branch 0)
    /// or move to `q1` (branch 1).
    pub fn branch() -> Machine {
        Machine::new(
            2,
            [1],
            [
                (0, Symbol::Blank, Transition::new(0, Symbol::Blank, Move::Right)),
                (0, Symbol::Blank, Transition::new(1, Symbol::Blank, Move::Right)),
            ],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    fn eps() -> BitString {
        BitString::default()
    }

    #[test]
    fn loop_right_has_one_successor() {
        let m = loop_right();
        let succ = step_successors(&m, &Configuration::initial(&eps()));
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].head, 1);
        assert_eq!(succ[0].steps, 1);
        assert_eq!(succ[0].state, 0);
    }

    #[test]
    fn halt_has_no_successors() {
        assert!(step_successors(&halt(), &Configuration::initial(&eps())).is_empty());
    }

    #[test]
    fn branch_successors_are_ordered() {
        let succ = step_successors(&branch(), &Configuration::initial(&eps()));
        assert_eq!(succ.iter().map(|c| c.state).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn left_at_cell_zero_stays() {
        let m = Machine::new(1, [], [(0, Symbol::Blank, Transition::new(0, Symbol::One, Move::Left))])
            .unwrap();
        let c = step_successors(&m, &Configuration::initial(&eps())).remove(0);
        assert_eq!(c.head, 0);
        assert_eq!(c.tape(), &[Symbol::One]);
    }

    #[test]
    fn writing_blank_keeps_tape_canonical() {
        let m = Machine::new(1, [], [(0, Symbol::One, Transition::new(0, Symbol::Blank, Move::Right))])
            .unwrap();
        let input: BitString = "1".parse().unwrap();
        let c = step_successors(&m, &Configuration::initial(&input)).remove(0);
        assert!(c.tape().is_empty());
        assert_eq!(c, {
            let mut d = Configuration::initial(&eps());
            d.head = 1;
            d.steps = 1;
            d
        });
    }

    #[test]
    fn determinism_predicate() {
        assert!(loop_right().is_deterministic());
        assert!(halt().is_deterministic());
        assert!(!branch().is_deterministic());
        assert_eq!(branch().max_branching(), 2);
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(Machine::new(0, [], []), Err(MachineError::NoStates));
        assert!(matches!(
            Machine::new(1, [1], []),
            Err(MachineError::StateOutOfRange { state: 1, .. })
        ));
        let tr = Transition::new(0, Symbol::Zero, Move::Left);
        assert!(matches!(
            Machine::new(1, [], [(0, Symbol::Zero, tr), (0, Symbol::Zero, tr)]),
            Err(MachineError::DuplicateTransition { .. })
        ));
    }

    #[test]
    fn force_first_choice_shapes() {
        let forced = force_first_choice(&branch(), 1);
        assert_eq!(forced.num_states(), 3);
        assert_eq!(
            forced.transitions(0, Symbol::Blank),
            &[Transition::new(2, Symbol::Blank, Move::Right)]
        );
        let dead = force_first_choice(&halt(), 0);
        assert_eq!(dead.num_states(), 2);
        assert!(dead.transitions(0, Symbol::Blank).is_empty());
    }

    #[test]
    fn force_prefix_empty_is_identity() {
        assert_eq!(force_prefix(&branch(), &[]), branch());
    }

    #[test]
    fn unreachable_state_round_trip() {
        let m = branch();
        let padded = m.with_unreachable_state();
        assert_eq!(padded.num_states(), 3);
        assert_eq!(padded.strip_unreachable_state(), Some(m.clone()));
        assert_eq!(m.strip_unreachable_state(), None);
    }

    #[test]
    fn json_mirror_round_trip() {
        let m = branch();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"numStates\":2"));
        let back: Machine = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"numStates":1,"acceptStates":[3],"transitions":[]}"#;
        assert!(serde_json::from_str::<Machine>(bad).is_err());
    }

    #[test]
    fn replay_rejects_out_of_range() {
        let err = replay(&branch(), &eps(), &Path(vec![2])).unwrap_err();
        assert_eq!(err, ReplayError::ChoiceOutOfRange { step: 0, choice: 2, width: 2 });
    }
}
