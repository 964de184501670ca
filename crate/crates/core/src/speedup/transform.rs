//! The hardwiring transform: special-case the pad instances of one provably
//! non-accepting pair and delegate everything else.

use thiserror::Error;

use crate::codec::encode_pair;
use crate::languages::pool::{HaltingPair, InvalidProof};
use crate::runtime::{Acceptor, Provenance, ReadResult, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pair cannot be hardwired: {0}")]
pub struct InvalidPair(#[from] pub InvalidProof);

/// Builds `A'` from `a` and `pair`.
///
/// `A'` compares input positions `0..p` against `E(N')E(x')` left to right.
/// On the first mismatch it reruns `a` from scratch on the same reader. If
/// the whole prefix matches it reads position `p`: `One` or `PastEnd` means
/// the input is `<N', x', 1^t>` for some `t` (or a malformed string sharing
/// that prefix), and `A'` accepts; `Zero` delegates to `a`. On the pad
/// instances `A'` therefore costs exactly `p + 2` steps.
pub fn hardwire_transform(a: &Acceptor, pair: &HaltingPair) -> Result<Acceptor, InvalidPair> {
    pair.validate()?;
    let prefix = encode_pair(&pair.machine, &pair.input).bits().to_vec();
    let base = a.clone();
    let name = format!("{}+hardwire[{}]", a.name(), pair.name);
    let provenance = Provenance::Transformed {
        base: a.name().to_string(),
        pair: pair.name.clone(),
    };
    Ok(Acceptor::new(name, provenance, move |r| {
        for (pos, &want) in prefix.iter().enumerate() {
            if r.read_at(pos)?.bit() != Some(want) {
                return base.run_within(r);
            }
        }
        match r.read_at(prefix.len())? {
            ReadResult::One | ReadResult::PastEnd => Ok(Verdict::Accept),
            ReadResult::Zero => base.run_within(r),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{BitString, Instance};
    use crate::languages::pool::{pool_pair, NonAcceptanceProof};
    use crate::languages::reference::reference_cobhp_acceptor;
    use crate::machine::samples::*;
    use crate::runtime::{run_measured, Outcome};

    fn loop_pair() -> HaltingPair {
        pool_pair("loop-right").unwrap()
    }

    #[test]
    fn constant_on_pad_instances() {
        let a = hardwire_transform(&reference_cobhp_acceptor(), &loop_pair()).unwrap();
        let p = encode_pair(&loop_right(), &BitString::default()).len() as u64;
        for t in [0, 1, 5, 16, 256, 500] {
            let inst = Instance::new(loop_right(), BitString::default(), t);
            let r = run_measured(&a, inst.encoded(), 1_000_000);
            assert_eq!(r.outcome, Outcome::Accept);
            assert_eq!(r.steps, p + 2, "t = {t}");
        }
    }

    #[test]
    fn delegates_off_pair() {
        let base = reference_cobhp_acceptor();
        let a = hardwire_transform(&base, &loop_pair()).unwrap();
        let p = encode_pair(&loop_right(), &BitString::default()).len() as u64;
        for (m, t) in [(accept_now(), 3), (branch(), 0), (branch(), 2), (halt(), 4)] {
            let inst = Instance::new(m, BitString::default(), t);
            let rb = run_measured(&base, inst.encoded(), 1_000_000);
            let ra = run_measured(&a, inst.encoded(), 1_000_000);
            assert_eq!(ra.outcome, rb.outcome);
            assert!(ra.steps <= rb.steps + p + 2);
        }
    }

    #[test]
    fn rejects_bad_proof() {
        let mut pair = loop_pair();
        pair.machine = accept_now();
        pair.proof = NonAcceptanceProof::NoAcceptState;
        assert!(hardwire_transform(&reference_cobhp_acceptor(), &pair).is_err());
    }
}
