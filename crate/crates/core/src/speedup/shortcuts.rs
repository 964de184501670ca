//! Acceptors that settle some instances from the machine and input alone,
//! before looking at the pad.
//!
//! Each one parses `E(N)E(x)` with sequential reads, applies a sufficient
//! condition for non-acceptance and accepts without reading further. In
//! every other case (including parse failures) it reruns the reference
//! acceptor from scratch. They are exact on well-formed instances; like the
//! hardwiring transform they also accept malformed strings whose pad is
//! broken after a qualifying prefix.

use crate::codec::{read_input, read_machine, BitString, DecodeFailure};
use crate::languages::pool::explore_reachable;
use crate::languages::reference::reference_cobhp_acceptor;
use crate::machine::{Configuration, Machine};
use crate::runtime::{Acceptor, InputReader, Interrupt, Provenance, Verdict};

/// Reads `E(N)` and, if `with_input`, `E(x)`. `Ok(None)` on malformed prefixes.
fn parse_prefix(
    r: &mut InputReader<'_>,
    with_input: bool,
) -> Result<Option<(Machine, BitString)>, Interrupt> {
    let mut s = r.stream_from(0);
    let m = match read_machine(&mut s) {
        Ok(m) => m,
        Err(DecodeFailure::Source(i)) => return Err(i),
        Err(DecodeFailure::Malformed(_)) => return Ok(None),
    };
    if !with_input {
        return Ok(Some((m, BitString::default())));
    }
    match read_input(&mut s) {
        Ok(x) => Ok(Some((m, x))),
        Err(DecodeFailure::Source(i)) => Err(i),
        Err(DecodeFailure::Malformed(_)) => Ok(None),
    }
}

fn shortcut<F>(name: &str, with_input: bool, settles: F) -> Acceptor
where
    F: Fn(&mut InputReader<'_>, &Machine, &BitString) -> Result<bool, Interrupt> + Send + Sync + 'static,
{
    let fallback = reference_cobhp_acceptor();
    Acceptor::new(name, Provenance::External, move |r| {
        if let Some((m, x)) = parse_prefix(r, with_input)? {
            if settles(r, &m, &x)? {
                return Ok(Verdict::Accept);
            }
        }
        fallback.run_within(r)
    })
}

/// Accepts as soon as `E(N)` shows no accept states.
pub fn no_accept_shortcut() -> Acceptor {
    shortcut("shortcut-no-accept", false, |_, m, _| {
        Ok(m.accept_states().is_empty())
    })
}

/// Accepts when the start configuration is a non-accepting dead end.
pub fn dead_start_shortcut() -> Acceptor {
    shortcut("shortcut-dead-start", true, |_, m, x| {
        let c = Configuration::initial(x);
        Ok(!m.is_accepting(c.state) && m.transitions(c.state, c.scanned()).is_empty())
    })
}

/// Configuration limit of the orbit exploration.
pub const ORBIT_LIMIT: u64 = 4096;

/// Accepts when the reachable configuration set (ignoring step counts) is
/// finite and contains no accepting configuration. Each explored
/// configuration costs one operation.
pub fn finite_orbit_shortcut() -> Acceptor {
    shortcut("shortcut-finite-orbit", true, |r, m, x| {
        let reach = explore_reachable(m, x, ORBIT_LIMIT);
        r.charge(reach.configurations)?;
        Ok(reach.closed && !reach.accepting)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode_pair, Instance};
    use crate::languages::pool::pool_pair;
    use crate::machine::samples::*;
    use crate::runtime::{run_measured, Outcome};

    fn run(a: &Acceptor, m: Machine, x: &str, t: u64) -> crate::runtime::RunReport {
        let inst = Instance::new(m, x.parse().unwrap(), t);
        run_measured(a, inst.encoded(), 1_000_000)
    }

    #[test]
    fn no_accept_reads_only_the_machine() {
        let r = run(&no_accept_shortcut(), loop_right(), "", 100);
        assert_eq!(r.outcome, Outcome::Accept);
        let machine_len = crate::codec::encode_machine(&loop_right()).len() as u64;
        assert_eq!(r.max_pos_read, Some(machine_len - 1));
    }

    #[test]
    fn dead_start_on_halt() {
        let r = run(&dead_start_shortcut(), halt(), "", 100);
        assert_eq!(r.outcome, Outcome::Accept);
        assert!(r.steps < 100);
    }

    #[test]
    fn orbit_on_cell_flipper() {
        let pair = pool_pair("cell-flipper").unwrap();
        let inst = Instance::new(pair.machine.clone(), pair.input.clone(), 200);
        let r = run_measured(&finite_orbit_shortcut(), inst.encoded(), 1_000_000);
        assert_eq!(r.outcome, Outcome::Accept);
        let p = encode_pair(&pair.machine, &pair.input).len() as u64;
        assert!(r.max_pos_read.unwrap() < p);
    }

    #[test]
    fn fall_back_to_reference() {
        for a in [no_accept_shortcut(), dead_start_shortcut(), finite_orbit_shortcut()] {
            assert_eq!(run(&a, accept_now(), "", 3).outcome, Outcome::Reject);
            assert_eq!(run(&a, branch(), "", 0).outcome, Outcome::Accept);
            assert_eq!(run(&a, branch(), "", 1).outcome, Outcome::Reject);
        }
    }
}
