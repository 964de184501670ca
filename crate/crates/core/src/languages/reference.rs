//! Reference acceptors for coBHP and coDBHP.
//!
//! Both read their entire input, parse it, run the matching decider and
//! accept exactly when the decider answers No. Malformed inputs are rejected.
//! Every configuration the decider examines is charged as one internal
//! operation.

use crate::codec::{decode_instance, BitString};
use crate::languages::decide::{decide_dbhp_counted, search_bhp, BhpAnswer, DecideError};
use crate::runtime::{Acceptor, Interrupt, Provenance, Verdict};

/// Configuration budget of the inner BHP search used by default.
pub const DEFAULT_DECIDER_BUDGET: u64 = 1_000_000;

pub const COBHP_NAME: &str = "ref-cobhp";
pub const CODBHP_NAME: &str = "ref-codbhp";

pub fn reference_cobhp_acceptor() -> Acceptor {
    reference_cobhp_acceptor_with_budget(DEFAULT_DECIDER_BUDGET)
}

pub fn reference_cobhp_acceptor_with_budget(decider_budget: u64) -> Acceptor {
    Acceptor::new(COBHP_NAME, Provenance::Reference, move |r| {
        let bits = BitString::new(r.read_all()?);
        let Ok(inst) = decode_instance(&bits) else {
            return Ok(Verdict::Reject);
        };
        let d = search_bhp(inst.machine(), inst.input(), inst.bound(), decider_budget);
        r.charge(d.explored)?;
        match d.answer {
            Ok(BhpAnswer::No) => Ok(Verdict::Accept),
            Ok(BhpAnswer::Yes(_)) => Ok(Verdict::Reject),
            Err(_) => Err(Interrupt::DeciderBudget),
        }
    })
}

pub fn reference_codbhp_acceptor() -> Acceptor {
    Acceptor::new(CODBHP_NAME, Provenance::Reference, |r| {
        let bits = BitString::new(r.read_all()?);
        let Ok(inst) = decode_instance(&bits) else {
            return Ok(Verdict::Reject);
        };
        match decide_dbhp_counted(&inst) {
            Ok((accepts, visited)) => {
                r.charge(visited)?;
                Ok(if accepts { Verdict::Reject } else { Verdict::Accept })
            }
            // not a DBHP instance, so not in coDBHP
            Err(DecideError::NotDeterministic) => Ok(Verdict::Reject),
            Err(DecideError::BudgetExceeded { .. }) => Err(Interrupt::DeciderBudget),
        }
    })
}
