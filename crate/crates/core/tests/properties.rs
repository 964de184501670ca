mod common;

use common::Oracle;
use haltlab::codec::{decode_instance, encode_pair, BitString, Instance};
use haltlab::harness::corpus::all_entries;
use haltlab::languages::decide::{decide_bhp, decide_dbhp, verify_path, BhpAnswer};
use haltlab::languages::pool::curated_cohp_pool;
use haltlab::languages::reference::reference_cobhp_acceptor;
use haltlab::levin::levin_search_witness;
use haltlab::machine::{force_prefix, Machine};
use haltlab::runtime::{replay_transcript, run_measured, Acceptor};
use haltlab::speedup::{dead_start_shortcut, finite_orbit_shortcut, hardwire_transform, no_accept_shortcut};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn machine(max_states: usize, max_entries: usize) -> impl Strategy<Value = Machine> {
    (1..=max_states).prop_flat_map(move |n| {
        let entries = all_entries(n);
        let k = max_entries.min(entries.len());
        (
            proptest::collection::vec(any::<bool>(), n),
            subsequence(entries, 0..=k),
        )
            .prop_map(move |(acc, es)| {
                let accept: Vec<usize> = (0..n).filter(|&q| acc[q]).collect();
                Machine::new(n, accept, es).unwrap()
            })
    })
}

fn bits(max_len: usize) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(any::<bool>(), 0..=max_len).prop_map(BitString::new)
}

fn instance(max_states: usize, max_entries: usize, max_x: usize, max_t: u64) -> impl Strategy<Value = Instance> {
    (machine(max_states, max_entries), bits(max_x), 0..=max_t).prop_map(|(m, x, t)| Instance::new(m, x, t))
}

fn acceptors() -> Vec<Acceptor> {
    let base = reference_cobhp_acceptor();
    let pool = curated_cohp_pool();
    vec![
        base.clone(),
        hardwire_transform(&base, &pool[0]).unwrap(),
        hardwire_transform(&base, &pool[2]).unwrap(),
        no_accept_shortcut(),
        dead_start_shortcut(),
        finite_orbit_shortcut(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn codec_round_trip(i in instance(4, 10, 6, 40)) {
        let back = decode_instance(i.encoded()).unwrap();
        prop_assert_eq!(back.encoded(), i.encoded());
        prop_assert_eq!(back, i);
    }

    #[test]
    fn decide_bhp_matches_brute_force(i in instance(3, 6, 3, 6)) {
        let oracle = Oracle::new(i.machine());
        let expect = oracle.min_accepting_len(i.input(), i.bound() as usize);
        match decide_bhp(&i, 1_000_000).unwrap() {
            BhpAnswer::Yes(p) => {
                prop_assert!(expect.is_some());
                prop_assert!(p.len() as u64 <= i.bound());
                prop_assert!(oracle.is_accepting_path(i.input(), p.choices()));
                prop_assert!(verify_path(&i, &p));
            }
            BhpAnswer::No => prop_assert!(expect.is_none()),
        }
    }

    #[test]
    fn decide_bhp_is_monotone_in_t(i in instance(3, 6, 3, 6)) {
        if decide_bhp(&i, 1_000_000).unwrap().is_yes() {
            prop_assert!(decide_bhp(&i.with_bound(i.bound() + 1), 1_000_000).unwrap().is_yes());
        }
    }

    #[test]
    fn decide_dbhp_matches_simulation(i in instance(3, 6, 3, 8)) {
        let oracle = Oracle::new(i.machine());
        match decide_dbhp(&i) {
            Ok(yes) => {
                prop_assert!(i.machine().is_deterministic());
                prop_assert_eq!(yes, oracle.deterministic_accepts(i.input(), i.bound() as usize));
            }
            Err(_) => prop_assert!(!i.machine().is_deterministic()),
        }
    }

    #[test]
    fn verify_path_agrees_with_oracle(i in instance(3, 6, 2, 5), path in proptest::collection::vec(0usize..3, 0..6)) {
        let oracle = Oracle::new(i.machine());
        let expect = path.len() as u64 <= i.bound() && oracle.is_accepting_path(i.input(), &path);
        prop_assert_eq!(verify_path(&i, &haltlab::machine::Path(path)), expect);
    }

    #[test]
    fn extending_past_the_read_prefix_changes_nothing(
        i in instance(3, 6, 3, 30),
        tail in proptest::collection::vec(any::<bool>(), 0..40),
        which in 0usize..6,
    ) {
        let a = &acceptors()[which];
        let r = run_measured(a, i.encoded(), 10_000_000);
        if r.reads.iter().all(|e| e.result.bit().is_some()) {
            let keep = r.max_pos_read.map_or(0, |p| p as usize + 1);
            let mut v = i.encoded().bits()[..keep].to_vec();
            v.extend(tail);
            prop_assert!(replay_transcript(a, &r, &BitString::new(v), 10_000_000).is_ok());
        }
    }

    #[test]
    fn transform_agrees_off_its_pair(i in instance(3, 6, 3, 12), which in 0usize..10) {
        let pool = curated_cohp_pool();
        let pair = &pool[which];
        prop_assume!(!pair.same_pair(i.machine(), i.input()));
        let base = reference_cobhp_acceptor();
        let fast = hardwire_transform(&base, pair).unwrap();
        let rb = run_measured(&base, i.encoded(), 10_000_000);
        let rf = run_measured(&fast, i.encoded(), 10_000_000);
        prop_assert_eq!(rb.outcome, rf.outcome);
        let p = encode_pair(&pair.machine, &pair.input).len() as u64;
        prop_assert!(rf.steps <= rb.steps + p + 2);
    }

    #[test]
    fn transform_is_constant_on_its_pair(which in 0usize..10, t in 0u64..300) {
        let pool = curated_cohp_pool();
        let pair = &pool[which];
        let fast = hardwire_transform(&reference_cobhp_acceptor(), pair).unwrap();
        let p = encode_pair(&pair.machine, &pair.input).len() as u64;
        let i = Instance::new(pair.machine.clone(), pair.input.clone(), t);
        let r = run_measured(&fast, i.encoded(), 10_000_000);
        prop_assert_eq!(r.outcome, haltlab::runtime::Outcome::Accept);
        prop_assert_eq!(r.steps, p + 2);
        prop_assert!(!decide_bhp(&i, 1_000_000).unwrap().is_yes());
    }

    #[test]
    fn force_prefix_keeps_exactly_compatible_paths(
        i in instance(3, 6, 2, 5),
        prefix in proptest::collection::vec(0usize..2, 0..4),
    ) {
        let depth = i.bound() as usize;
        let forced = force_prefix(i.machine(), &prefix);
        let compatible = |p: &[usize]| {
            let n = p.len().min(prefix.len());
            p[..n] == prefix[..n]
        };
        let mut expect: Vec<Vec<usize>> = Oracle::new(i.machine())
            .accepting_paths(i.input(), depth)
            .into_iter()
            .filter(|p| compatible(p))
            // a forced layer keeps one branch, so its index becomes 0
            .map(|mut p| {
                for c in p.iter_mut().take(prefix.len()) {
                    *c = 0;
                }
                p
            })
            .collect();
        let mut got = Oracle::new(&forced).accepting_paths(i.input(), depth);
        expect.sort();
        got.sort();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn padding_reduction_preserves_answers(i in instance(3, 6, 3, 6)) {
        let padded = Instance::new(i.machine().with_unreachable_state(), i.input().clone(), i.bound());
        prop_assert_eq!(
            decide_bhp(&i, 1_000_000).unwrap().is_yes(),
            decide_bhp(&padded, 1_000_000).unwrap().is_yes()
        );
        prop_assert_eq!(padded.machine().strip_unreachable_state(), Some(i.machine().clone()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn larger_levin_budgets_extend_smaller_runs(i in instance(2, 3, 1, 3), small in 1u64..5_000) {
        let a = levin_search_witness(&i, small);
        let b = levin_search_witness(&i, small * 4);
        if a.found() {
            prop_assert_eq!(a.witness, b.witness);
        }
        prop_assert!(a.accounting_ok && b.accounting_ok);
    }
}
