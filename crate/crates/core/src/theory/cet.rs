//! Satisfiability of equation/disequation systems under free equality.
//!
//! Equations are solved by unification with occurs check. A disequation is
//! violated when the unifier makes its sides identical. When the alphabet
//! contains a non-constant function symbol the Herbrand universe is
//! infinite and any finite set of non-violated disequations is jointly
//! satisfiable (independence of disequations). Over a constants-only
//! alphabet the domain closure axiom applies and the remaining variables
//! are searched over the finite constant universe instead.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{unify, Substitution, Term, Variable};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CetOutcome {
    /// Satisfiable; carries the most general unifier of the equations.
    Sat(Substitution),
    Unsat,
}

/// Decides a conjunction of equations and disequations. `functions` is the
/// full function alphabet (constants have arity 0).
pub fn cet_solve(
    equations: &[(Term, Term)],
    disequations: &[(Term, Term)],
    functions: &BTreeMap<String, usize>,
) -> CetOutcome {
    let Some(sigma) = unify(equations) else {
        return CetOutcome::Unsat;
    };
    let ds: Vec<(Term, Term)> = disequations
        .iter()
        .map(|(l, r)| (l.apply(&sigma), r.apply(&sigma)))
        .collect();
    if ds.iter().any(|(l, r)| l == r) {
        return CetOutcome::Unsat;
    }
    let infinite_universe = functions.values().any(|a| *a > 0);
    if infinite_universe {
        return CetOutcome::Sat(sigma);
    }
    // constants only: search the finite universe for the leftover variables
    let constants: Vec<Term> = functions
        .iter()
        .filter(|(_, a)| **a == 0)
        .map(|(n, _)| Term::constant(n.clone()))
        .collect();
    let mut vars = BTreeSet::new();
    for (l, r) in &ds {
        l.collect_vars(&mut vars);
        r.collect_vars(&mut vars);
    }
    let vars: Vec<Variable> = vars.into_iter().collect();
    if vars.is_empty() {
        return CetOutcome::Sat(sigma);
    }
    if constants.is_empty() {
        return CetOutcome::Unsat;
    }
    if search(&vars, &constants, &ds, &mut Substitution::new()) {
        CetOutcome::Sat(sigma)
    } else {
        CetOutcome::Unsat
    }
}

fn search(
    vars: &[Variable],
    constants: &[Term],
    ds: &[(Term, Term)],
    assignment: &mut Substitution,
) -> bool {
    let Some(v) = vars.first() else {
        return true;
    };
    for c in constants {
        assignment.bind(v.clone(), c.clone());
        let violated = ds.iter().any(|(l, r)| {
            let l = l.apply(assignment);
            let r = r.apply(assignment);
            l.is_ground() && r.is_ground() && l == r
        });
        if !violated && search(&vars[1..], constants, ds, assignment) {
            return true;
        }
    }
    assignment.unbind(v);
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    fn sig(entries: &[(&str, usize)]) -> BTreeMap<String, usize> {
        entries
            .iter()
            .map(|(n, a)| (n.to_string(), *a))
            .collect()
    }

    #[test]
    fn unifies_and_reports_mgu() {
        let outcome = cet_solve(
            &[(v("X"), Term::app("f", vec![v("Y")])), (v("Y"), c("a"))],
            &[],
            &sig(&[("a", 0), ("f", 1)]),
        );
        match outcome {
            CetOutcome::Sat(s) => {
                assert_eq!(
                    s.get(&Variable::new("X")),
                    Some(&Term::app("f", vec![c("a")]))
                );
                assert_eq!(s.get(&Variable::new("Y")), Some(&c("a")));
            }
            CetOutcome::Unsat => panic!("expected sat"),
        }
    }

    #[test]
    fn occurs_check_unsat() {
        let outcome = cet_solve(
            &[(v("X"), Term::app("f", vec![v("X")]))],
            &[],
            &sig(&[("a", 0), ("f", 1)]),
        );
        assert_eq!(outcome, CetOutcome::Unsat);
    }

    #[test]
    fn violated_disequation_unsat() {
        let outcome = cet_solve(
            &[(v("X"), c("a"))],
            &[(v("X"), c("a"))],
            &sig(&[("a", 0)]),
        );
        assert_eq!(outcome, CetOutcome::Unsat);
    }

    #[test]
    fn domain_closure_over_constants() {
        // x != a over the single-constant universe {a} has no solution
        let one = sig(&[("a", 0)]);
        assert_eq!(cet_solve(&[], &[(v("X"), c("a"))], &one), CetOutcome::Unsat);
        // but with a second constant it does
        let two = sig(&[("a", 0), ("b", 0)]);
        assert!(matches!(
            cet_solve(&[], &[(v("X"), c("a"))], &two),
            CetOutcome::Sat(_)
        ));
        // and with a non-constant symbol the universe is infinite
        let inf = sig(&[("a", 0), ("f", 1)]);
        assert!(matches!(
            cet_solve(&[], &[(v("X"), c("a"))], &inf),
            CetOutcome::Sat(_)
        ));
    }

    #[test]
    fn var_var_disequation_needs_two_values() {
        let one = sig(&[("a", 0)]);
        assert_eq!(
            cet_solve(&[], &[(v("X"), v("Y"))], &one),
            CetOutcome::Unsat
        );
        let two = sig(&[("a", 0), ("b", 0)]);
        assert!(matches!(
            cet_solve(&[], &[(v("X"), v("Y"))], &two),
            CetOutcome::Sat(_)
        ));
    }
}
