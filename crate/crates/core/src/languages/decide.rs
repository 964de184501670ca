//! Deciders for BHP and DBHP, and the path verifier.

use std::collections::HashSet;

use thiserror::Error;

use crate::codec::Instance;
use crate::machine::{Configuration, Machine, Path};
use crate::codec::BitString;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BhpAnswer {
    Yes(Path),
    No,
}

impl BhpAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, BhpAnswer::Yes(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("search exceeded its budget of {budget} configurations")]
    BudgetExceeded { budget: u64 },
    #[error("machine is not deterministic")]
    NotDeterministic,
}

/// Result of a bounded search together with the number of configurations it
/// examined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub answer: Result<BhpAnswer, DecideError>,
    pub explored: u64,
}

/// Decides `<N, x, 1^t>` in BHP. See [`search_bhp`].
pub fn decide_bhp(i: &Instance, budget: u64) -> Result<BhpAnswer, DecideError> {
    search_bhp(i.machine(), i.input(), i.bound(), budget).answer
}

/// Breadth-first search of the configuration tree to depth `bound`, merging
/// equal configurations within a layer. Every configuration examined counts
/// against `budget`. On success the returned path is the first accepting
/// one found in breadth-first, branch-index order, hence a shortest one.
pub fn search_bhp(m: &Machine, x: &BitString, bound: u64, budget: u64) -> Decision {
    struct Node {
        config: Configuration,
        parent: usize,
        choice: usize,
    }

    let mut layers: Vec<Vec<Node>> = vec![vec![Node {
        config: Configuration::initial(x),
        parent: usize::MAX,
        choice: 0,
    }]];
    let mut explored = 0u64;
    let mut depth = 0usize;
    loop {
        let layer = &layers[depth];
        for (idx, node) in layer.iter().enumerate() {
            explored += 1;
            if explored > budget {
                return Decision {
                    answer: Err(DecideError::BudgetExceeded { budget }),
                    explored: budget,
                };
            }
            if m.is_accepting(node.config.state) {
                let mut choices = Vec::with_capacity(depth);
                let (mut d, mut at) = (depth, idx);
                while d > 0 {
                    let n = &layers[d][at];
                    choices.push(n.choice);
                    at = n.parent;
                    d -= 1;
                }
                choices.reverse();
                return Decision {
                    answer: Ok(BhpAnswer::Yes(Path(choices))),
                    explored,
                };
            }
        }
        if depth as u64 >= bound {
            break;
        }
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (idx, node) in layer.iter().enumerate() {
            let c = &node.config;
            for (choice, tr) in m.transitions(c.state, c.scanned()).iter().enumerate() {
                let succ = c.apply(tr);
                if !seen.contains(&succ) {
                    seen.insert(succ.clone());
                    next.push(Node {
                        config: succ,
                        parent: idx,
                        choice,
                    });
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
        depth += 1;
    }
    Decision {
        answer: Ok(BhpAnswer::No),
        explored,
    }
}

/// Decides `<D, x, 1^t>` in DBHP by direct simulation. Also returns the
/// number of configurations visited (at most `t + 1`).
pub fn decide_dbhp_counted(i: &Instance) -> Result<(bool, u64), DecideError> {
    let m = i.machine();
    if !m.is_deterministic() {
        return Err(DecideError::NotDeterministic);
    }
    let mut c = Configuration::initial(i.input());
    let mut visited = 0u64;
    loop {
        visited += 1;
        if m.is_accepting(c.state) {
            return Ok((true, visited));
        }
        if c.steps >= i.bound() {
            return Ok((false, visited));
        }
        match m.transitions(c.state, c.scanned()).first() {
            Some(tr) => c = c.apply(tr),
            None => return Ok((false, visited)),
        }
    }
}

pub fn decide_dbhp(i: &Instance) -> Result<bool, DecideError> {
    decide_dbhp_counted(i).map(|(yes, _)| yes)
}

/// True iff `p` is an accepting computation of `i.machine()` on `i.input()`
/// of at most `t` steps: every choice is in range, no configuration before
/// the last accepts, and the last one does.
pub fn verify_path(i: &Instance, p: &Path) -> bool {
    verify_choices(i, p.choices())
}

/// [`verify_path`] on a bare choice sequence.
pub fn verify_choices(i: &Instance, choices: &[usize]) -> bool {
    if choices.len() as u64 > i.bound() {
        return false;
    }
    let m = i.machine();
    let mut c = Configuration::initial(i.input());
    for &choice in choices {
        if m.is_accepting(c.state) {
            return false;
        }
        match m.transitions(c.state, c.scanned()).get(choice) {
            Some(tr) => c = c.apply(tr),
            None => return false,
        }
    }
    m.is_accepting(c.state)
}
