//! Seeded corpus generation: an exhaustive core of small machines plus
//! random well-formed instances, each labeled by the BHP decider.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{decode_instance, BitString, Instance};
use crate::harness::config::{ConfigInvalid, CoreLimits, ExperimentConfig};
use crate::languages::decide::{decide_bhp, BhpAnswer};
use crate::machine::{Machine, Move, Symbol, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    /// In BHP.
    Yes,
    /// In coBHP.
    No,
    /// The decider ran out of budget.
    Unknown,
}

pub fn label(i: &Instance, decider_budget: u64) -> Label {
    match decide_bhp(i, decider_budget) {
        Ok(BhpAnswer::Yes(_)) => Label::Yes,
        Ok(BhpAnswer::No) => Label::No,
        Err(_) => Label::Unknown,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledInstance {
    pub id: String,
    pub instance: Instance,
    pub label: Label,
}

/// Every possible entry of an `n`-state machine, in canonical order
/// (state, read symbol, next state, written symbol, move).
pub fn all_entries(n: usize) -> Vec<(usize, Symbol, Transition)> {
    let mut out = Vec::with_capacity(18 * n * n);
    for state in 0..n {
        for read in 0..3 {
            for next in 0..n {
                for write in 0..3 {
                    for dir in 0..2 {
                        out.push((
                            state,
                            Symbol::from_code(read).unwrap(),
                            Transition::new(next, Symbol::from_code(write).unwrap(), Move::from_code(dir).unwrap()),
                        ));
                    }
                }
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), f);
    }
}

/// All `n`-state machines with at most `max_entries` entries, one per
/// (accept set, entry set), branches in canonical order. Accept sets vary
/// slowest.
pub fn machines_with_states(n: usize, max_entries: usize) -> Vec<Machine> {
    let entries = all_entries(n);
    let mut tables: Vec<Vec<(usize, Symbol, Transition)>> = Vec::new();
    for k in 0..=max_entries.min(entries.len()) {
        combinations(entries.len(), k, &mut |idx| {
            tables.push(idx.iter().map(|&i| entries[i]).collect());
        });
    }
    let mut out = Vec::with_capacity(tables.len() << n);
    for mask in 0..(1usize << n) {
        let accept: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        for t in &tables {
            out.push(Machine::new(n, accept.iter().copied(), t.iter().copied()).expect("enumerated entries are valid"));
        }
    }
    out
}

pub fn exhaustive_machines(max_states: usize, max_entries: usize) -> Vec<Machine> {
    (1..=max_states)
        .flat_map(|n| machines_with_states(n, max_entries))
        .collect()
}

/// All bit strings of length at most `max_len`, shortest first.
pub fn all_inputs(max_len: usize) -> Vec<BitString> {
    (0..=max_len)
        .flat_map(|n| (0..1u32 << n).map(move |v| BitString::new((0..n).map(|j| v >> (n - 1 - j) & 1 == 1).collect())))
        .collect()
}

/// Every instance within `limits`: machine, then input, then `t`.
pub fn exhaustive_instances(limits: &CoreLimits) -> Vec<Instance> {
    let inputs = all_inputs(limits.max_input_len);
    exhaustive_machines(limits.max_states, limits.max_entries)
        .into_iter()
        .flat_map(|m| {
            let inputs = &inputs;
            inputs.iter().flat_map(move |x| {
                let base = Instance::new(m.clone(), x.clone(), 0);
                (0..=limits.t_max).map(move |t| base.with_bound(t))
            })
        })
        .collect()
}

/// A random canonical machine with `1..=max_states` states.
pub fn random_machine(rng: &mut ChaCha8Rng, max_states: usize, max_entries: usize) -> Machine {
    let n = rng.gen_range(1..=max_states);
    let accept: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.25)).collect();
    let mut pool = all_entries(n);
    let k = rng.gen_range(0..=max_entries.min(pool.len()));
    let (chosen, _) = pool.partial_shuffle(rng, k);
    let mut chosen = chosen.to_vec();
    chosen.sort_by_key(|&(q, s, tr)| (q, s.code(), tr.next, tr.write.code(), tr.dir.code()));
    Machine::new(n, accept, chosen).expect("sampled entries are valid")
}

pub fn random_instance(rng: &mut ChaCha8Rng, cfg: &ExperimentConfig) -> Instance {
    let m = random_machine(rng, cfg.max_states, cfg.max_entries);
    let len = rng.gen_range(0..=cfg.max_input_len);
    let x = BitString::new((0..len).map(|_| rng.gen_bool(0.5)).collect());
    let t = rng.gen_range(0..=cfg.corpus_t_max);
    Instance::new(m, x, t)
}

/// The exhaustive core (ids `core:k`) followed by `corpus_size` random
/// instances (ids `rand:k`). Identical configs give identical corpora.
pub fn generate_corpus(cfg: &ExperimentConfig) -> Result<Vec<LabeledInstance>, ConfigInvalid> {
    cfg.validate()?;
    let mut instances: Vec<(String, Instance)> = Vec::new();
    if let Some(core) = &cfg.core {
        instances.extend(
            exhaustive_instances(core)
                .into_iter()
                .enumerate()
                .map(|(k, i)| (format!("core:{k}"), i)),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for k in 0..cfg.corpus_size {
        instances.push((format!("rand:{k}"), random_instance(&mut rng, cfg)));
    }
    let budget = cfg.decider_budget;
    Ok(instances
        .into_par_iter()
        .map(|(id, instance)| {
            let back = decode_instance(instance.encoded()).expect("generated instances are well-formed");
            assert_eq!(back, instance, "codec round trip failed for {id}");
            let label = label(&instance, budget);
            LabeledInstance { id, instance, label }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode_machine;
    use crate::machine::samples::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn machine_counts() {
        for (n, e) in [(1, 3), (2, 2), (3, 1)] {
            let entries = 18 * n * n;
            let expect = (0..=e).map(|k| binom(entries, k)).sum::<usize>() << n;
            assert_eq!(machines_with_states(n, e).len(), expect);
        }
    }

    #[test]
    fn enumerated_machines_are_distinct_and_canonical() {
        let ms = exhaustive_machines(2, 2);
        let mut encodings: Vec<_> = ms.iter().map(encode_machine).collect();
        for (m, e) in ms.iter().zip(&encodings) {
            assert_eq!(&crate::codec::decode_machine(e).unwrap(), m);
        }
        encodings.sort();
        encodings.dedup();
        assert_eq!(encodings.len(), ms.len());
    }

    #[test]
    fn small_core_contains_named_instances() {
        let cfg = ExperimentConfig {
            core: Some(CoreLimits {
                max_states: 1,
                max_entries: 3,
                max_input_len: 1,
                t_max: 2,
            }),
            corpus_size: 5,
            ..Default::default()
        };
        let corpus = generate_corpus(&cfg).unwrap();
        let has = |m: &Machine, t: u64| {
            corpus
                .iter()
                .any(|li| li.instance.machine() == m && li.instance.input().is_empty() && li.instance.bound() == t)
        };
        assert!(has(&accept_now(), 0));
        assert!(has(&loop_right(), 2));
        assert_eq!(corpus.iter().filter(|li| li.id.starts_with("rand:")).count(), 5);
    }

    #[test]
    fn same_seed_same_corpus() {
        let cfg = ExperimentConfig {
            core: None,
            corpus_size: 50,
            seed: 42,
            ..Default::default()
        };
        let a = generate_corpus(&cfg).unwrap();
        let b = generate_corpus(&cfg).unwrap();
        assert_eq!(a, b);
        let other = generate_corpus(&ExperimentConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn zero_corpus_size_is_invalid() {
        let cfg = ExperimentConfig {
            corpus_size: 0,
            ..Default::default()
        };
        assert!(generate_corpus(&cfg).is_err());
    }

    #[test]
    fn input_enumeration() {
        let xs: Vec<String> = all_inputs(2).iter().map(|x| x.to_string()).collect();
        assert_eq!(xs, ["", "0", "1", "00", "01", "10", "11"]);
    }
}
