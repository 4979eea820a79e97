//! The goal-driven engine: t-/tu-derivation trees with constructive
//! negation, answer extraction, safety checks, and the ground decision
//! procedure for Datalog programs.

pub mod decide;
pub mod safety;
pub mod solve;
pub mod tree;

pub use decide::{decide, maximal_tree, Decision, DecisionOutcome};
pub use safety::{
    check_goal, check_program, check_rule, congruence_check, congruence_report, CongruenceCheck,
    Safety, SafetyReport,
};
pub use solve::{
    derive_step, lift_negative_answer, query, Answer, CheckStatus, EngineConfig, QueryOutcome,
    SelectionRule, Solver,
};
pub use tree::{DerivationTree, NodeId, Step, TreeKind, TreeNode};

use crate::syntax::{GroundingError, Variable};
use crate::theory::TheoryError;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum EngineError {
    #[error("unsafe {place}: variable {variable} is not bound to a ground term or a positive-literal variable")]
    Unsafe { place: String, variable: Variable },
    #[error("not a Datalog program: function symbol `{symbol}` has arity > 0")]
    NonDatalog { symbol: String },
    #[error("selected literal is negative; negative selection is handled by the tree builder")]
    NegativeSelection,
    #[error("node {node} does not exist in this tree")]
    NoSuchNode { node: usize },
    #[error("node {node} is not a successful leaf")]
    NotASuccessfulLeaf { node: usize },
    #[error("expected a {expected}-tree")]
    WrongTreeKind { expected: tree::TreeKind },
    #[error("tree is incomplete (node budget exhausted); it yields no negative answer")]
    IncompleteTree,
    #[error("invalid cross-section: successful branch ending in `{missed}` is not covered")]
    InvalidCrossSection { missed: String },
    #[error("goal atom `{atom}` must be ground here")]
    NonGroundAtom { atom: String },
    #[error("unknown rule atom `{atom}`")]
    UnknownAtom { atom: String },
    #[error("node budget of {nodes} exhausted while building a maximal tree")]
    Budget { nodes: usize },
    #[error("decision procedure did not converge within {rank} ranks")]
    RankLimit { rank: u32 },
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}

#[cfg(test)]
mod tests;
