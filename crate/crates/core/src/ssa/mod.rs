//! SSA form with state-variable φs at function entry and after external calls,
//! plus weak updates for writes through storage references.

mod alias;
mod construct;

pub use alias::{candidates_of_type, compute_storage_aliases, AliasMap, Targets, UnassignedUse};
pub use construct::{state_reads, to_ssa, weak_targets, Phi, PhiSite, SsaFunction, SsaInstruction, SsaVar};
