//! Instance reductions and composing an acceptor with one.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{decode_instance, encode_instance, BitString, Instance};
use crate::machine::samples::accept_now;
use crate::runtime::{Acceptor, Provenance};

type Mapping = Arc<dyn Fn(&Instance) -> BitString + Send + Sync>;

/// A total map on well-formed instances with a declared polynomial cost
/// degree (in the input length).
#[derive(Clone)]
pub struct Reduction {
    name: String,
    cost_degree: u32,
    mapping: Mapping,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("reduction {reduction} produced a malformed instance at bit {position}: {reason}")]
pub struct ReductionFailure {
    pub reduction: String,
    pub position: usize,
    pub reason: String,
}

impl Reduction {
    pub fn new<F>(name: impl Into<String>, cost_degree: u32, mapping: F) -> Self
    where
        F: Fn(&Instance) -> BitString + Send + Sync + 'static,
    {
        Reduction {
            name: name.into(),
            cost_degree,
            mapping: Arc::new(mapping),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cost_degree(&self) -> u32 {
        self.cost_degree
    }

    /// The raw output encoding of `i`.
    pub fn map_bits(&self, i: &Instance) -> BitString {
        (self.mapping)(i)
    }

    /// Maps `i` and parses the result.
    pub fn apply(&self, i: &Instance) -> Result<Instance, ReductionFailure> {
        decode_instance(&self.map_bits(i)).map_err(|e| ReductionFailure {
            reduction: self.name.clone(),
            position: e.position,
            reason: e.reason.to_string(),
        })
    }
}

impl std::fmt::Debug for Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reduction")
            .field("name", &self.name)
            .field("cost_degree", &self.cost_degree)
            .finish_non_exhaustive()
    }
}

pub fn identity_reduction() -> Reduction {
    Reduction::new("identity", 1, |i| i.encoded().clone())
}

/// coDBHP to coBHP: deterministic instances map to themselves, others to
/// `<N_acc, e, 0>`, which lies outside coBHP.
pub fn reduction_dbhp_to_bhp() -> Reduction {
    Reduction::new("dbhp-to-bhp", 1, |i| {
        if i.machine().is_deterministic() {
            i.encoded().clone()
        } else {
            encode_instance(&accept_now(), &BitString::default(), 0)
        }
    })
}

/// Adds one unreachable state to the machine.
pub fn padding_self_reduction() -> Reduction {
    Reduction::new("pad-state", 1, |i| {
        encode_instance(&i.machine().with_unreachable_state(), i.input(), i.bound())
    })
}

/// Removes a trailing unreachable state when there is one; identity otherwise.
pub fn strip_padding_reduction() -> Reduction {
    Reduction::new("strip-state", 1, |i| match i.machine().strip_unreachable_state() {
        Some(m) => encode_instance(&m, i.input(), i.bound()),
        None => i.encoded().clone(),
    })
}

/// `x -> a(f(x))`. The composed acceptor reads its whole input, charges one
/// operation per output bit of `f`, then runs `a` on a derived reader over
/// `f(x)`. Strings that do not parse are handed to `a` unchanged.
pub fn compose_with_reduction(a: &Acceptor, f: &Reduction) -> Acceptor {
    let inner = a.clone();
    let f = f.clone();
    let name = format!("{}∘{}", a.name(), f.name());
    let provenance = Provenance::Composed {
        base: a.name().to_string(),
        reduction: f.name().to_string(),
    };
    Acceptor::new(name, provenance, move |r| {
        let bits = BitString::new(r.read_all()?);
        let out = match decode_instance(&bits) {
            Ok(inst) => f.map_bits(&inst),
            Err(_) => bits,
        };
        r.charge(out.len() as u64)?;
        inner.run_within(&mut r.derived(out.bits()))
    })
}

/// First corpus instance where `in_l1(z) != in_l2(f(z))`, or a malformed
/// output.
pub fn validate_reduction<P, Q>(
    f: &Reduction,
    corpus: &[Instance],
    in_l1: P,
    in_l2: Q,
) -> Result<(), ReductionCheck>
where
    P: Fn(&Instance) -> bool,
    Q: Fn(&Instance) -> bool,
{
    for (k, z) in corpus.iter().enumerate() {
        let fz = f.apply(z).map_err(ReductionCheck::Malformed)?;
        if in_l1(z) != in_l2(&fz) {
            return Err(ReductionCheck::MembershipChanged { index: k });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionCheck {
    #[error(transparent)]
    Malformed(ReductionFailure),
    #[error("membership differs for corpus instance {index}")]
    MembershipChanged { index: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::languages::decide::{decide_bhp, decide_dbhp, BhpAnswer};
    use crate::languages::reference::{reference_cobhp_acceptor, reference_codbhp_acceptor};
    use crate::machine::samples::*;
    use crate::runtime::run_measured;

    fn corpus() -> Vec<Instance> {
        let mut v = Vec::new();
        for m in [loop_right(), halt(), accept_now(), branch()] {
            for x in ["", "1", "10"] {
                for t in 0..5 {
                    v.push(Instance::new(m.clone(), x.parse().unwrap(), t));
                }
            }
        }
        v
    }

    #[test]
    fn padding_keeps_loop_outside_bhp() {
        let i = Instance::new(loop_right(), BitString::default(), 8);
        let j = padding_self_reduction().apply(&i).unwrap();
        assert_eq!(j.machine().num_states(), 2);
        assert_eq!(decide_bhp(&i, 10_000), Ok(BhpAnswer::No));
        assert_eq!(decide_bhp(&j, 10_000), Ok(BhpAnswer::No));
        assert_eq!(strip_padding_reduction().apply(&j).unwrap(), i);
    }

    #[test]
    fn reductions_preserve_membership() {
        let in_cobhp = |i: &Instance| !decide_bhp(i, 100_000).unwrap().is_yes();
        let in_codbhp = |i: &Instance| i.machine().is_deterministic() && !decide_dbhp(i).unwrap();
        validate_reduction(&reduction_dbhp_to_bhp(), &corpus(), in_codbhp, in_cobhp).unwrap();
        validate_reduction(&padding_self_reduction(), &corpus(), in_cobhp, in_cobhp).unwrap();
        validate_reduction(&strip_padding_reduction(), &corpus(), in_cobhp, in_cobhp).unwrap();
    }

    #[test]
    fn composition_matches_codbhp_reference() {
        let composed = compose_with_reduction(&reference_cobhp_acceptor(), &reduction_dbhp_to_bhp());
        let direct = reference_codbhp_acceptor();
        for i in corpus() {
            let a = run_measured(&composed, i.encoded(), 1_000_000);
            let b = run_measured(&direct, i.encoded(), 1_000_000);
            assert_eq!(a.outcome, b.outcome, "{:?}", i.encoded().to_string());
        }
    }

    #[test]
    fn identity_composition_overhead() {
        let base = reference_cobhp_acceptor();
        let composed = compose_with_reduction(&base, &identity_reduction());
        for i in corpus() {
            let a = run_measured(&composed, i.encoded(), 1_000_000);
            let b = run_measured(&base, i.encoded(), 1_000_000);
            assert_eq!(a.outcome, b.outcome);
            let n = i.encoded().len() as u64;
            assert!(a.steps >= b.steps);
            assert!(a.steps <= b.steps + 2 * n + 1);
        }
    }

    #[test]
    fn malformed_output_is_reported() {
        let bad = Reduction::new("bad", 1, |_| "11".parse().unwrap());
        let i = Instance::new(halt(), BitString::default(), 1);
        assert!(bad.apply(&i).is_err());
    }
}
