//! Solved-form normalization of successful-leaf constraints, and the
//! equality-chain criterion for when a constraint binds a variable.

use std::fmt;

use crate::syntax::{unify, Constraint, Goal, Term, Variable};

use super::TheoryError;

/// What a constraint binds a variable to, judged by chasing the equality
/// chains of its top-level conjunction. A `Ground`/`Var` verdict is always
/// sound (the entailment `C -> x = t` holds); `Unbound` may be
/// over-cautious, since only the conjunction's own equations are chased.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Binding {
    Ground(Term),
    Var(Variable),
    Unbound,
}

/// Resolves what `x` is bound to in `c`. Every variable is bound at least
/// to itself.
pub fn bound_to(c: &Constraint, x: &Variable) -> Binding {
    let eqs = c.top_level_equalities();
    let Some(sigma) = unify(&eqs) else {
        // the equational part is unsatisfiable, so the entailment holds
        // vacuously; report the variable as bound to itself
        return Binding::Var(x.clone());
    };
    match Term::Var(x.clone()).apply(&sigma) {
        t if t.is_ground() => Binding::Ground(t),
        Term::Var(y) => Binding::Var(y),
        _ => Binding::Unbound,
    }
}

/// A constraint in solved form: equalities binding goal variables to ground
/// terms, plus a conjunction of possibly negated closed constraints taken
/// from the program or goal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SolvedForm {
    pub bindings: Vec<(Variable, Term)>,
    pub literals: Vec<(bool, Constraint)>,
}

impl SolvedForm {
    pub fn to_constraint(&self) -> Constraint {
        let mut parts: Vec<Constraint> = self
            .bindings
            .iter()
            .map(|(v, t)| Constraint::Eq(Term::Var(v.clone()), t.clone()))
            .collect();
        for (pos, c) in &self.literals {
            parts.push(if *pos {
                c.clone()
            } else {
                c.clone().negated()
            });
        }
        Constraint::and(parts)
    }
}

impl fmt::Display for SolvedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_constraint())
    }
}

const DNF_CAP: usize = 4096;

/// Rewrites a successful-leaf constraint into an equivalent disjunction of
/// solved forms: variable bindings are substituted through, ground
/// equalities are decided, negations are distributed, and bindings of
/// variables not free in the goal are dropped.
pub fn to_solved_form_disjunction(
    c: &Constraint,
    goal: &Goal,
) -> Result<Vec<SolvedForm>, TheoryError> {
    let conjuncts: Vec<&Constraint> = c.conjuncts();
    let eqs: Vec<(Term, Term)> = conjuncts
        .iter()
        .filter_map(|c| match c {
            Constraint::Eq(l, r) => Some((l.clone(), r.clone())),
            _ => None,
        })
        .collect();
    let Some(sigma) = unify(&eqs) else {
        return Ok(Vec::new()); // equational part unsatisfiable: empty disjunction
    };
    for v in c.free_vars() {
        let t = Term::Var(v.clone()).apply(&sigma);
        if !t.is_ground() {
            return Err(TheoryError::NotDecidable {
                reason: format!("free variable {v} is not bound to a ground term"),
            });
        }
    }
    // distribute the non-equational conjuncts into signed closed literals
    let mut clauses: Vec<Vec<(bool, Constraint)>> = vec![Vec::new()];
    for conjunct in conjuncts {
        if matches!(conjunct, Constraint::Eq(_, _)) {
            continue;
        }
        let grounded = conjunct.apply(&sigma);
        let dnf = signed_dnf(&grounded, true)?;
        let mut next = Vec::new();
        for clause in &clauses {
            for extension in &dnf {
                let mut merged = clause.clone();
                merged.extend(extension.iter().cloned());
                next.push(merged);
                if next.len() > DNF_CAP {
                    return Err(TheoryError::NotDecidable {
                        reason: "solved-form expansion too large".into(),
                    });
                }
            }
        }
        clauses = next;
    }
    let goal_vars = goal.free_vars();
    let bindings: Vec<(Variable, Term)> = c
        .free_vars()
        .into_iter()
        .filter(|v| goal_vars.contains(v))
        .map(|v| {
            let t = Term::Var(v.clone()).apply(&sigma);
            (v, t)
        })
        .collect();
    let mut out: Vec<SolvedForm> = Vec::new();
    'clauses: for clause in clauses {
        let mut literals: Vec<(bool, Constraint)> = Vec::new();
        for lit in clause {
            if literals.contains(&(!lit.0, lit.1.clone())) {
                continue 'clauses; // complementary pair: this disjunct is false
            }
            if !literals.contains(&lit) {
                literals.push(lit);
            }
        }
        literals.sort();
        let sf = SolvedForm {
            bindings: bindings.clone(),
            literals,
        };
        if !out.contains(&sf) {
            out.push(sf);
        }
    }
    Ok(out)
}

/// Disjunctive normal form of a closed constraint over opaque literals
/// (atoms and quantified subformulas), with ground equalities decided.
/// Returns the list of clauses; the empty clause list is `false` and a
/// clause list containing the empty clause subsumes to `true`.
fn signed_dnf(
    c: &Constraint,
    positive: bool,
) -> Result<Vec<Vec<(bool, Constraint)>>, TheoryError> {
    match c {
        Constraint::True => Ok(if positive { vec![vec![]] } else { vec![] }),
        Constraint::False => Ok(if positive { vec![] } else { vec![vec![]] }),
        Constraint::Eq(l, r) => {
            if !l.is_ground() || !r.is_ground() {
                return Err(TheoryError::NotDecidable {
                    reason: format!("equality {l} = {r} is not ground after binding"),
                });
            }
            let truth = l == r;
            Ok(if truth == positive {
                vec![vec![]]
            } else {
                vec![]
            })
        }
        Constraint::Not(inner) => signed_dnf(inner, !positive),
        Constraint::And(cs) if positive => product(cs, true),
        Constraint::And(cs) => union(cs, false),
        Constraint::Or(cs) if positive => union(cs, true),
        Constraint::Or(cs) => product(cs, false),
        // atoms and quantified subformulas are opaque literals
        _ => Ok(vec![vec![(positive, c.clone())]]),
    }
}

fn union(cs: &[Constraint], positive: bool) -> Result<Vec<Vec<(bool, Constraint)>>, TheoryError> {
    let mut out = Vec::new();
    for c in cs {
        out.extend(signed_dnf(c, positive)?);
        if out.len() > DNF_CAP {
            return Err(TheoryError::NotDecidable {
                reason: "solved-form expansion too large".into(),
            });
        }
    }
    Ok(out)
}

fn product(cs: &[Constraint], positive: bool) -> Result<Vec<Vec<(bool, Constraint)>>, TheoryError> {
    let mut acc: Vec<Vec<(bool, Constraint)>> = vec![Vec::new()];
    for c in cs {
        let dnf = signed_dnf(c, positive)?;
        let mut next = Vec::new();
        for clause in &acc {
            for ext in &dnf {
                let mut merged = clause.clone();
                merged.extend(ext.iter().cloned());
                next.push(merged);
                if next.len() > DNF_CAP {
                    return Err(TheoryError::NotDecidable {
                        reason: "solved-form expansion too large".into(),
                    });
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}
