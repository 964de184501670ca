//! Hardwiring speedups, runtime caps, certificates and reductions.

pub mod cap;
pub mod certify;
pub mod dominance;
pub mod reduction;
pub mod shortcuts;
pub mod transform;

pub use cap::{detect_runtime_cap, find_hard_pair, CapConfirmation, CapReport, HardPairResult};
pub use certify::{
    certify, check_b_speedup, measure_b_speedup, validate_certificate, OffSRow, OnSRow,
    SpeedupCertificate, SpeedupMeasurements, Violation,
};
pub use dominance::{check_p_dominance, dominance_from_samples, fit_envelopes, star_condition_probe, Dominance, DominanceError, EnvelopeFit, StarProbeReport};
pub use reduction::{
    compose_with_reduction, identity_reduction, padding_self_reduction, reduction_dbhp_to_bhp,
    strip_padding_reduction, Reduction, ReductionFailure,
};
pub use shortcuts::{dead_start_shortcut, finite_orbit_shortcut, no_accept_shortcut};
pub use transform::{hardwire_transform, InvalidPair};
