//! Reasoning engine for hybrid programs: normal logic programs whose rule
//! bodies carry constraint formulas evaluated against an external
//! first-order theory. The `wf` module computes the well-founded models a
//! program has for each model of its theory; the `engine` module answers
//! goals top-down with derivation trees and constructive negation, and
//! decides ground atoms outright for Datalog programs.

pub mod syntax;
pub mod theory;
pub mod engine;
pub mod wf;

pub use syntax::{parse_goal, parse_program, parse_theory};
