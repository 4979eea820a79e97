//! The term, constraint, rule and goal language, with its parser and
//! printer. All values here are immutable after construction.

mod constraint;
mod parse;
mod program;
mod term;

pub use constraint::Constraint;
pub use parse::{parse_goal, parse_program, parse_theory, ParseError, TheoryClause, TheoryDecls};
pub use program::{Atom, Goal, GroundingError, HybridProgram, HybridRule, Literal, Signature};
pub use term::{ground_terms, unify, Substitution, Term, Variable};
