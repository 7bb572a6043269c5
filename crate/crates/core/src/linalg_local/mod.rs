//! Exact linear algebra over `R = (Z/p^N)[a]/(a^K)`.
//!
//! Every `R`-coordinate is expanded into `K` scalar coordinates in the basis
//! `1, a, ..., a^(K-1)`, turning `R`-module questions into questions about
//! row spans over `Z/p^N`. Since `Z/p^N` has zero divisors, spans are kept
//! in Howell form, which makes membership decidable by one reduction pass.

mod flat;
mod howell;
mod presentation;
mod smith;

pub use flat::{flatten, relation_rows, FlatMatrix};
pub use howell::{howell, kernel, member, HowellBasis, Membership};
pub use presentation::{
    invariant_runs, modules_match, Generator, InvariantRun, MatchReport, MembershipFailure, ModulePresentation, Relation,
};
pub use smith::coker_invariants;

/// Residues as decimal strings, the wire format for matrices and witnesses.
pub fn residue_strings(v: &[u64]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}
