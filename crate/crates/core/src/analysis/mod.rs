//! Level quotients and the certificates built on them.

mod certificates;
mod chain;
mod law;
mod odometer;
mod pigeonhole;
mod quotient;

use thiserror::Error;

use crate::automata::AutomatonError;
use crate::elements::ElementError;

pub use certificates::{
    branch_certificate, find_branching_level, is_self_replicating_at, BranchCertificate, BranchWitness,
    SelfReplication, Status, TUPLE_BUDGET,
};
pub use chain::{ChainCache, LevelChain};
pub use law::{law_check, Law, LawReport, LawWitness};
pub use odometer::{odometer_witness, OdometerReport, MAX_N as ODOMETER_MAX_N};
pub use pigeonhole::{
    build_cg, decompose_over_cg, identity_run, is_covering_antichain, k_of, movement_check, Decomposition,
    MovementCheck,
};
pub use quotient::{is_level_transitive, LevelQuotient};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("quotient of size {size} is incomplete: cap reached after {found} elements")]
    Incomplete { size: usize, found: usize },
    #[error("{needed} elements needed, cap is {cap}")]
    Cap { needed: u128, cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("cannot parse law: {0}")]
    LawParse(String),
}
