//! The languages BHP, DBHP and their complements: deciders, reference
//! acceptors and a pool of provably non-accepting pairs.

pub mod decide;
pub mod pool;
pub mod reference;

pub use decide::{decide_bhp, decide_dbhp, search_bhp, verify_path, BhpAnswer, DecideError, Decision};
pub use pool::{curated_cohp_pool, pool_pair, HaltingPair, NonAcceptanceProof};
pub use reference::{reference_cobhp_acceptor, reference_codbhp_acceptor};
