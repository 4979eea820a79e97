//! Safety and congruence checks on rules and goals.
//!
//! A rule is safe when every head variable, every variable of a negative
//! body literal, and every free variable of its constraint is bound in the
//! constraint to a ground term or to a variable that occurs in a positive
//! body literal. Safe programs keep the goal-driven semantics sound even
//! for theories without the witness property.

use std::collections::BTreeSet;

use crate::syntax::{unify, Goal, HybridProgram, HybridRule, Term, Variable};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Safety {
    Safe,
    Unsafe { variable: Variable },
}

impl Safety {
    pub fn is_safe(&self) -> bool {
        matches!(self, Safety::Safe)
    }
}

/// Checks one rule, ignoring the variables in `apart_of`.
pub fn check_rule(rule: &HybridRule, apart_of: &BTreeSet<Variable>) -> Safety {
    let mut positive_vars = BTreeSet::new();
    for l in &rule.body {
        if l.positive {
            l.atom.collect_vars(&mut positive_vars);
        }
    }
    let mut targets = rule.head.vars();
    for l in &rule.body {
        if !l.positive {
            l.atom.collect_vars(&mut targets);
        }
    }
    rule.constraint.collect_free_vars(&mut targets);

    let eqs = rule.constraint.top_level_equalities();
    let Some(sigma) = unify(&eqs) else {
        // the equational part is unsatisfiable: the bindings hold vacuously
        return Safety::Safe;
    };
    for v in targets {
        if apart_of.contains(&v) {
            continue;
        }
        let resolved = Term::Var(v.clone()).apply(&sigma);
        if resolved.is_ground() {
            continue;
        }
        let in_positive = positive_vars
            .iter()
            .any(|u| Term::Var(u.clone()).apply(&sigma) == resolved);
        if matches!(resolved, Term::Var(_)) && in_positive {
            continue;
        }
        return Safety::Unsafe { variable: v };
    }
    Safety::Safe
}

/// Goal safety via the encoding as a headless rule.
pub fn check_goal(goal: &Goal, apart_of: &BTreeSet<Variable>) -> Safety {
    let rule = HybridRule {
        head: crate::syntax::Atom::new("__goal", vec![]),
        constraint: goal.constraint.clone(),
        body: goal.literals.clone(),
    };
    check_rule(&rule, apart_of)
}

/// Rule-indexed safety violations for a whole program.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SafetyReport {
    pub violations: Vec<(usize, Variable)>,
}

impl SafetyReport {
    pub fn is_safe(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_program(program: &HybridProgram) -> SafetyReport {
    let none = BTreeSet::new();
    let mut report = SafetyReport::default();
    for (i, rule) in program.rules.iter().enumerate() {
        if let Safety::Unsafe { variable } = check_rule(rule, &none) {
            report.violations.push((i, variable));
        }
    }
    report
}

/// Per-rule outcome of the syntactic congruence criterion: head arguments
/// are all variables and no variable occurs twice among the head and the
/// rule literals (further occurrences belong in the constraint). Programs
/// passing it treat theory-equal terms alike. Advisory only.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CongruenceCheck {
    Passes,
    Fails { reason: String },
}

impl CongruenceCheck {
    pub fn passes(&self) -> bool {
        matches!(self, CongruenceCheck::Passes)
    }
}

pub fn congruence_check(rule: &HybridRule) -> CongruenceCheck {
    for arg in &rule.head.args {
        if !matches!(arg, Term::Var(_)) {
            return CongruenceCheck::Fails {
                reason: format!("head argument `{arg}` is not a variable"),
            };
        }
    }
    let mut counts: std::collections::BTreeMap<Variable, usize> = Default::default();
    let count_term = |t: &Term, counts: &mut std::collections::BTreeMap<Variable, usize>| {
        fn walk(t: &Term, counts: &mut std::collections::BTreeMap<Variable, usize>) {
            match t {
                Term::Var(v) => *counts.entry(v.clone()).or_default() += 1,
                Term::App(_, args) => args.iter().for_each(|a| walk(a, counts)),
            }
        }
        walk(t, counts);
    };
    for arg in &rule.head.args {
        count_term(arg, &mut counts);
    }
    for l in &rule.body {
        for arg in &l.atom.args {
            count_term(arg, &mut counts);
        }
    }
    for (v, n) in counts {
        if n > 1 {
            return CongruenceCheck::Fails {
                reason: format!("variable {v} occurs {n} times in the head and rule literals"),
            };
        }
    }
    CongruenceCheck::Passes
}

pub fn congruence_report(program: &HybridProgram) -> Vec<CongruenceCheck> {
    program.rules.iter().map(congruence_check).collect()
}
