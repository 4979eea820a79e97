//! Rule atoms, hybrid rules, programs and goals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::constraint::Constraint;
use super::term::{Substitution, Term, Variable};

/// An atom over a rule predicate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        for t in &self.args {
            t.collect_vars(out);
        }
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn apply(&self, subst: &Substitution) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.apply(subst)).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A possibly negated rule atom. `~` marks negation in the concrete syntax.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal {
            positive: true,
            atom,
        }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal {
            positive: false,
            atom,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    pub fn apply(&self, subst: &Substitution) -> Literal {
        Literal {
            positive: self.positive,
            atom: self.atom.apply(subst),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// A rule `H :- { C }, L1, ..., Ln.` — the head is a positive rule atom,
/// `C` a constraint of the external theory (implicitly `true` when absent),
/// and the `Li` are rule literals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HybridRule {
    pub head: Atom,
    pub constraint: Constraint,
    pub body: Vec<Literal>,
}

impl HybridRule {
    pub fn fact(head: Atom) -> Self {
        HybridRule {
            head,
            constraint: Constraint::True,
            body: Vec::new(),
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.constraint == Constraint::True
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = self.head.vars();
        self.constraint.collect_free_vars(&mut out);
        for l in &self.body {
            l.atom.collect_vars(&mut out);
        }
        out
    }

    pub fn apply(&self, subst: &Substitution) -> HybridRule {
        HybridRule {
            head: self.head.apply(subst),
            constraint: self.constraint.apply(subst),
            body: self.body.iter().map(|l| l.apply(subst)).collect(),
        }
    }

    /// Every instance of the rule with its free variables replaced by
    /// members of `universe`. The stream has |universe|^n elements for a
    /// rule with n free variables.
    pub fn ground_instances<'a>(
        &'a self,
        universe: &'a [Term],
    ) -> Result<impl Iterator<Item = HybridRule> + 'a, GroundingError> {
        let vars: Vec<Variable> = self.free_vars().into_iter().collect();
        if !vars.is_empty() && universe.is_empty() {
            return Err(GroundingError::EmptyUniverse);
        }
        let n = vars.len();
        let m = universe.len().max(1);
        let total = m.checked_pow(n as u32).ok_or(GroundingError::TooLarge)?;
        let rule = self;
        Ok((0..total).map(move |mut idx| {
            let mut subst = Substitution::new();
            for v in &vars {
                subst.bind(v.clone(), universe[idx % m].clone());
                idx /= m;
            }
            rule.apply(&subst)
        }))
    }
}

impl fmt::Display for HybridRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        let has_constraint = self.constraint != Constraint::True;
        if has_constraint || !self.body.is_empty() {
            f.write_str(" :- ")?;
            if has_constraint {
                write!(f, "{{ {} }}", self.constraint)?;
                if !self.body.is_empty() {
                    f.write_str(", ")?;
                }
            }
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

/// A goal `{ C } L1, ..., Ln` — a constraint plus rule literals. Either
/// part may be empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Goal {
    pub constraint: Constraint,
    pub literals: Vec<Literal>,
}

impl Goal {
    pub fn new(constraint: Constraint, literals: Vec<Literal>) -> Self {
        Goal {
            constraint,
            literals,
        }
    }

    pub fn atom(atom: Atom) -> Self {
        Goal {
            constraint: Constraint::True,
            literals: vec![Literal::positive(atom)],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = self.constraint.free_vars();
        for l in &self.literals {
            l.atom.collect_vars(&mut out);
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.constraint.is_closed() && self.literals.iter().all(Literal::is_ground)
    }

    pub fn apply(&self, subst: &Substitution) -> Goal {
        Goal {
            constraint: self.constraint.apply(subst),
            literals: self.literals.iter().map(|l| l.apply(subst)).collect(),
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let has_constraint = self.constraint != Constraint::True || self.literals.is_empty();
        if has_constraint {
            write!(f, "{{ {} }}", self.constraint)?;
            if !self.literals.is_empty() {
                f.write_str(" ")?;
            }
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Declared predicates, function symbols and constants of a program. Rule
/// predicates and constraint predicates are disjoint alphabets.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Signature {
    pub rule_preds: BTreeMap<String, usize>,
    pub constraint_preds: BTreeMap<String, usize>,
    /// Function symbols of arity > 0 occurring in rules or goals.
    pub functions: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

impl Signature {
    /// Datalog means every function symbol is a constant.
    pub fn is_datalog(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn constant_terms(&self) -> Vec<Term> {
        self.constants.iter().map(Term::constant).collect()
    }

    /// All function symbols, constants included, keyed by name.
    pub fn all_functions(&self) -> BTreeMap<String, usize> {
        let mut out = self.functions.clone();
        for c in &self.constants {
            out.insert(c.clone(), 0);
        }
        out
    }
}

/// A set of hybrid rules together with its signature and an optional
/// reference to a named external theory.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HybridProgram {
    pub rules: Vec<HybridRule>,
    pub signature: Signature,
    pub theory_ref: Option<String>,
}

impl HybridProgram {
    pub fn is_datalog(&self) -> bool {
        self.signature.is_datalog()
    }

    /// Grounds every rule over the given universe of ground terms.
    pub fn ground_rules(&self, universe: &[Term]) -> Result<Vec<HybridRule>, GroundingError> {
        let mut out = Vec::new();
        for rule in &self.rules {
            out.extend(rule.ground_instances(universe)?);
        }
        Ok(out)
    }

    /// All ground rule atoms over the declared predicates and `universe`
    /// (the Herbrand base when `universe` is the constant set).
    pub fn herbrand_base(&self, universe: &[Term]) -> Vec<Atom> {
        let mut out = Vec::new();
        for (pred, arity) in &self.signature.rule_preds {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for _ in 0..*arity {
                let mut next = Vec::new();
                for tuple in &tuples {
                    for t in universe {
                        let mut tuple = tuple.clone();
                        tuple.push(t.clone());
                        next.push(tuple);
                    }
                }
                tuples = next;
            }
            for args in tuples {
                out.push(Atom::new(pred.clone(), args));
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for HybridProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.signature.rule_preds.is_empty() {
            f.write_str("#rulepreds")?;
            for (p, a) in &self.signature.rule_preds {
                write!(f, " {p}/{a}")?;
            }
            f.write_str(".\n")?;
        }
        if !self.signature.constraint_preds.is_empty() {
            f.write_str("#constraintpreds")?;
            for (p, a) in &self.signature.constraint_preds {
                write!(f, " {p}/{a}")?;
            }
            f.write_str(".\n")?;
        }
        if !self.signature.constants.is_empty() {
            f.write_str("#constants")?;
            for c in &self.signature.constants {
                write!(f, " {c}")?;
            }
            f.write_str(".\n")?;
        }
        if let Some(name) = &self.theory_ref {
            writeln!(f, "#theory {name}.")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum GroundingError {
    #[error("cannot ground a rule with variables over an empty universe")]
    EmptyUniverse,
    #[error("grounding would produce too many instances")]
    TooLarge,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game_rule() -> HybridRule {
        HybridRule {
            head: Atom::new("w", vec![Term::var("X")]),
            constraint: Constraint::True,
            body: vec![
                Literal::positive(Atom::new("m", vec![Term::var("X"), Term::var("Y")])),
                Literal::negative(Atom::new("w", vec![Term::var("Y")])),
            ],
        }
    }

    #[test]
    fn ground_instance_count() {
        let universe: Vec<Term> = ["a", "b", "c", "d", "e", "f"]
            .iter()
            .map(|c| Term::constant(*c))
            .collect();
        let instances: Vec<_> = game_rule().ground_instances(&universe).unwrap().collect();
        assert_eq!(instances.len(), 36);
        assert!(instances.iter().all(|r| r.free_vars().is_empty()));
    }

    #[test]
    fn ground_fact_is_itself() {
        let fact = HybridRule::fact(Atom::new(
            "m",
            vec![Term::constant("b"), Term::constant("a")],
        ));
        let universe = vec![Term::constant("a")];
        let instances: Vec<_> = fact.ground_instances(&universe).unwrap().collect();
        assert_eq!(instances, vec![fact]);
    }

    #[test]
    fn ground_keeps_constraint() {
        let rule = HybridRule {
            head: Atom::new("m", vec![Term::constant("c"), Term::constant("f")]),
            constraint: Constraint::atom("fi", vec![Term::constant("f")]).negated(),
            body: vec![],
        };
        let instances: Vec<_> = rule.ground_instances(&[Term::constant("a")]).unwrap().collect();
        assert_eq!(instances, vec![rule]);
    }

    #[test]
    fn empty_universe_rejected() {
        match game_rule().ground_instances(&[]) {
            Err(e) => assert_eq!(e, GroundingError::EmptyUniverse),
            Ok(_) => panic!("expected an error"),
        }
    }

    #[test]
    fn rule_display() {
        assert_eq!(game_rule().to_string(), "w(X) :- m(X,Y), ~w(Y).");
    }
}
