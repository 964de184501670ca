//! Machine/input pairs with a checkable proof that the machine never accepts.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::BitString;
use crate::machine::{Configuration, Machine};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum NonAcceptanceProof {
    /// The machine has no accept states at all.
    NoAcceptState,
    /// Every computation dies in a non-accepting dead end within the
    /// validation bound.
    DeadEndBeforeAccept,
    /// The reachable configuration set is finite, closed and contains no
    /// accepting configuration.
    StructuralLoop { description: String },
}

impl NonAcceptanceProof {
    pub fn tag(&self) -> &'static str {
        match self {
            NonAcceptanceProof::NoAcceptState => "NoAcceptState",
            NonAcceptanceProof::DeadEndBeforeAccept => "DeadEndBeforeAccept",
            NonAcceptanceProof::StructuralLoop { .. } => "StructuralLoop",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HaltingPair {
    pub name: String,
    pub machine: Machine,
    pub input: BitString,
    pub proof: NonAcceptanceProof,
    /// Depth bound for dead-end proofs, configuration bound for loop proofs.
    pub validation_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("proof {tag} for pair {name:?} does not check: {reason}")]
pub struct InvalidProof {
    pub name: String,
    pub tag: &'static str,
    pub reason: String,
}

/// Summary of an exhaustive walk over reachable configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    pub configurations: u64,
    /// True when the walk ran out of new configurations before the limit.
    pub closed: bool,
    pub accepting: bool,
}

/// Explores every configuration reachable from the start configuration,
/// ignoring step counts, up to `limit` distinct configurations.
pub fn explore_reachable(m: &Machine, x: &BitString, limit: u64) -> Reachability {
    let start = Configuration::initial(x);
    let mut seen: HashSet<Configuration> = HashSet::new();
    let mut stack = vec![start.clone()];
    seen.insert(start);
    let mut accepting = false;
    while let Some(c) = stack.pop() {
        if m.is_accepting(c.state) {
            accepting = true;
            continue;
        }
        for tr in m.transitions(c.state, c.scanned()) {
            let mut succ = c.apply(tr);
            succ.steps = 0;
            if seen.contains(&succ) {
                continue;
            }
            if seen.len() as u64 >= limit {
                return Reachability {
                    configurations: seen.len() as u64,
                    closed: false,
                    accepting,
                };
            }
            seen.insert(succ.clone());
            stack.push(succ);
        }
    }
    Reachability {
        configurations: seen.len() as u64,
        closed: true,
        accepting,
    }
}

/// Depth-bounded search that succeeds only when every branch has died in a
/// non-accepting dead end by `depth`.
fn all_branches_die(m: &Machine, x: &BitString, depth: u64) -> Result<(), String> {
    let mut layer = vec![Configuration::initial(x)];
    for d in 0..=depth {
        let mut next = HashSet::new();
        for c in &layer {
            if m.is_accepting(c.state) {
                return Err(format!("accepting configuration at depth {d}"));
            }
            for tr in m.transitions(c.state, c.scanned()) {
                next.insert(c.apply(tr));
            }
        }
        if next.is_empty() {
            return Ok(());
        }
        layer = next.into_iter().collect();
    }
    Err(format!("computations still alive after {depth} steps"))
}

impl HaltingPair {
    /// Re-checks the attached proof.
    pub fn validate(&self) -> Result<(), InvalidProof> {
        let fail = |reason: String| InvalidProof {
            name: self.name.clone(),
            tag: self.proof.tag(),
            reason,
        };
        match &self.proof {
            NonAcceptanceProof::NoAcceptState => {
                if self.machine.accept_states().is_empty() {
                    Ok(())
                } else {
                    Err(fail("machine has accept states".into()))
                }
            }
            NonAcceptanceProof::DeadEndBeforeAccept => {
                all_branches_die(&self.machine, &self.input, self.validation_bound).map_err(fail)
            }
            NonAcceptanceProof::StructuralLoop { .. } => {
                let r = explore_reachable(&self.machine, &self.input, self.validation_bound);
                if r.accepting {
                    Err(fail("an accepting configuration is reachable".into()))
                } else if !r.closed {
                    Err(fail(format!(
                        "reachable set exceeds {} configurations",
                        self.validation_bound
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn same_pair(&self, machine: &Machine, input: &BitString) -> bool {
        &self.machine == machine && &self.input == input
    }
}

const POOL_JSON: &str = include_str!("../../data/cohp_pool.json");

/// The shipped pool of provably non-accepting pairs. Every proof is
/// re-validated on load.
pub fn curated_cohp_pool() -> Vec<HaltingPair> {
    let pool: Vec<HaltingPair> =
        serde_json::from_str(POOL_JSON).expect("shipped pool file parses");
    for pair in &pool {
        if let Err(e) = pair.validate() {
            panic!("shipped pool entry fails validation: {e}");
        }
    }
    pool
}

pub fn pool_pair(name: &str) -> Option<HaltingPair> {
    curated_cohp_pool().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::samples;

    #[test]
    fn pool_has_required_members() {
        let pool = curated_cohp_pool();
        assert!(pool.len() >= 8);
        let eps = BitString::default();
        assert!(pool.iter().any(|p| p.same_pair(&samples::loop_right(), &eps)
            && p.proof == NonAcceptanceProof::NoAcceptState));
        assert!(pool.iter().any(|p| p.same_pair(&samples::halt(), &eps)
            && p.proof == NonAcceptanceProof::DeadEndBeforeAccept));
        assert!(pool.iter().any(|p| p.machine.num_states() >= 2
            && matches!(p.proof, NonAcceptanceProof::StructuralLoop { .. })));
        assert_eq!(pool[0].name, "loop-right");
    }

    #[test]
    fn cell_flipper_orbit_is_small() {
        let p = pool_pair("cell-flipper").unwrap();
        assert_eq!(p.machine.num_states(), 2);
        let r = explore_reachable(&p.machine, &p.input, 100);
        assert!(r.closed && !r.accepting);
        assert!(r.configurations <= 4);
        assert_eq!(r.configurations, 2);
    }

    #[test]
    fn wrong_tags_fail() {
        let mut p = pool_pair("cell-flipper").unwrap();
        p.proof = NonAcceptanceProof::NoAcceptState;
        assert!(p.validate().is_err());
        p.proof = NonAcceptanceProof::DeadEndBeforeAccept;
        assert!(p.validate().is_err());
        let mut l = pool_pair("loop-right").unwrap();
        l.proof = NonAcceptanceProof::StructuralLoop {
            description: "bogus".into(),
        };
        assert!(l.validate().is_err());
    }
}
