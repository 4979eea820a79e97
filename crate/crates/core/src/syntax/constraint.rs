//! Constraint formulas: the fragment of the external theory's language that
//! may appear in rule bodies and goals. Closed under negation, conjunction,
//! disjunction and existential quantification; `=` is the built-in syntactic
//! equality.

use std::collections::BTreeSet;
use std::fmt;

use super::term::{unify, Substitution, Term, Variable};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Constraint {
    True,
    False,
    /// An atom over a constraint predicate.
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Constraint>),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Exists(Vec<Variable>, Box<Constraint>),
}

impl Constraint {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Constraint::Atom(predicate.into(), args)
    }

    pub fn eq(l: Term, r: Term) -> Self {
        Constraint::Eq(l, r)
    }

    pub fn negated(self) -> Self {
        Constraint::Not(Box::new(self))
    }

    pub fn and(parts: Vec<Constraint>) -> Self {
        match parts.len() {
            0 => Constraint::True,
            1 => parts.into_iter().next().unwrap(),
            _ => Constraint::And(parts),
        }
    }

    pub fn or(parts: Vec<Constraint>) -> Self {
        match parts.len() {
            0 => Constraint::False,
            1 => parts.into_iter().next().unwrap(),
            _ => Constraint::Or(parts),
        }
    }

    pub fn exists(vars: Vec<Variable>, body: Constraint) -> Self {
        if vars.is_empty() {
            body
        } else {
            Constraint::Exists(vars, Box::new(body))
        }
    }

    /// `a <-> b`, as a constraint.
    pub fn iff(a: Constraint, b: Constraint) -> Self {
        Constraint::And(vec![
            Constraint::Or(vec![a.clone().negated(), b.clone()]),
            Constraint::Or(vec![b.negated(), a]),
        ])
    }

    pub fn collect_free_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Constraint::True | Constraint::False => {}
            Constraint::Atom(_, args) => {
                for t in args {
                    t.collect_vars(out);
                }
            }
            Constraint::Eq(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Constraint::Not(c) => c.collect_free_vars(out),
            Constraint::And(cs) | Constraint::Or(cs) => {
                for c in cs {
                    c.collect_free_vars(out);
                }
            }
            Constraint::Exists(vs, body) => {
                let mut inner = BTreeSet::new();
                body.collect_free_vars(&mut inner);
                for v in vs {
                    inner.remove(v);
                }
                out.extend(inner);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// True when the formula mentions no constraint predicate, only `=`.
    pub fn is_equality_only(&self) -> bool {
        match self {
            Constraint::True | Constraint::False | Constraint::Eq(_, _) => true,
            Constraint::Atom(_, _) => false,
            Constraint::Not(c) => c.is_equality_only(),
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().all(|c| c.is_equality_only()),
            Constraint::Exists(_, body) => body.is_equality_only(),
        }
    }

    /// Applies a substitution to the free variables, renaming bound
    /// variables when they would capture an incoming variable. Renaming is
    /// deterministic: the first fresh name of the form `name_k` is taken.
    pub fn apply(&self, subst: &Substitution) -> Constraint {
        match self {
            Constraint::True => Constraint::True,
            Constraint::False => Constraint::False,
            Constraint::Atom(p, args) => {
                Constraint::Atom(p.clone(), args.iter().map(|t| t.apply(subst)).collect())
            }
            Constraint::Eq(l, r) => Constraint::Eq(l.apply(subst), r.apply(subst)),
            Constraint::Not(c) => Constraint::Not(Box::new(c.apply(subst))),
            Constraint::And(cs) => Constraint::And(cs.iter().map(|c| c.apply(subst)).collect()),
            Constraint::Or(cs) => Constraint::Or(cs.iter().map(|c| c.apply(subst)).collect()),
            Constraint::Exists(vs, body) => {
                // Only bindings for variables actually free in the body matter.
                let free = {
                    let mut f = body.free_vars();
                    for v in vs {
                        f.remove(v);
                    }
                    f
                };
                let relevant = subst.restricted(|v| free.contains(v));
                if relevant.is_empty() {
                    return Constraint::Exists(vs.clone(), body.clone());
                }
                let incoming = relevant.range_vars();
                let mut avoid: BTreeSet<String> = incoming.iter().map(|v| v.name().to_string()).collect();
                avoid.extend(body.free_vars().iter().map(|v| v.name().to_string()));
                let mut renamed = Vec::with_capacity(vs.len());
                let mut renaming = Substitution::new();
                for v in vs {
                    if incoming.contains(v) {
                        let fresh = fresh_name(v.name(), &avoid);
                        avoid.insert(fresh.clone());
                        let fv = Variable::new(fresh);
                        renaming.bind(v.clone(), Term::Var(fv.clone()));
                        renamed.push(fv);
                    } else {
                        renamed.push(v.clone());
                    }
                }
                let body = if renaming.is_empty() {
                    body.as_ref().clone()
                } else {
                    body.apply(&renaming)
                };
                Constraint::Exists(renamed, Box::new(body.apply(&relevant)))
            }
        }
    }

    /// Restriction to a variable set: existentially quantifies every free
    /// variable outside `keep`.
    pub fn restricted_to(&self, keep: &BTreeSet<Variable>) -> Constraint {
        let extra: Vec<Variable> = self
            .free_vars()
            .into_iter()
            .filter(|v| !keep.contains(v))
            .collect();
        Constraint::exists(extra, self.clone())
    }

    /// Top-level conjuncts after flattening nested conjunctions.
    pub fn conjuncts(&self) -> Vec<&Constraint> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Constraint, out: &mut Vec<&'a Constraint>) {
            match c {
                Constraint::And(cs) => {
                    for c in cs {
                        walk(c, out);
                    }
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Equations among the top-level conjuncts.
    pub fn top_level_equalities(&self) -> Vec<(Term, Term)> {
        self.conjuncts()
            .into_iter()
            .filter_map(|c| match c {
                Constraint::Eq(l, r) => Some((l.clone(), r.clone())),
                _ => None,
            })
            .collect()
    }

    /// Entailment-preserving simplification: flattens conjunction and
    /// disjunction, folds truth constants, decides ground equalities,
    /// propagates top-level equality bindings, and eliminates quantified
    /// variables that are fixed by an equation.
    pub fn simplify(&self) -> Constraint {
        match self {
            Constraint::True => Constraint::True,
            Constraint::False => Constraint::False,
            Constraint::Atom(p, args) => Constraint::Atom(p.clone(), args.clone()),
            Constraint::Eq(l, r) => {
                if l == r {
                    Constraint::True
                } else if l.is_ground() && r.is_ground() {
                    // distinct ground terms are unequal under free equality
                    Constraint::False
                } else {
                    Constraint::Eq(l.clone(), r.clone())
                }
            }
            Constraint::Not(c) => match c.simplify() {
                Constraint::True => Constraint::False,
                Constraint::False => Constraint::True,
                Constraint::Not(inner) => *inner,
                other => Constraint::Not(Box::new(other)),
            },
            Constraint::And(_) => self.simplify_and(),
            Constraint::Or(cs) => {
                let mut parts = Vec::new();
                for c in cs {
                    match c.simplify() {
                        Constraint::True => return Constraint::True,
                        Constraint::False => {}
                        Constraint::Or(inner) => parts.extend(inner),
                        other => {
                            if !parts.contains(&other) {
                                parts.push(other);
                            }
                        }
                    }
                }
                Constraint::or(parts)
            }
            Constraint::Exists(vs, body) => {
                let mut body = body.simplify();
                let mut vars: Vec<Variable> = vs.clone();
                // eliminate bound variables fixed by an equation: Ex(x, x=t & F) == F{x/t}
                loop {
                    let mut eliminated = false;
                    let conjuncts: Vec<Constraint> =
                        body.conjuncts().into_iter().cloned().collect();
                    'vars: for (i, v) in vars.iter().enumerate() {
                        for (j, c) in conjuncts.iter().enumerate() {
                            if let Constraint::Eq(l, r) = c {
                                let bound = if l.as_variable() == Some(v) && !r.contains_var(v) {
                                    Some(r.clone())
                                } else if r.as_variable() == Some(v) && !l.contains_var(v) {
                                    Some(l.clone())
                                } else {
                                    None
                                };
                                if let Some(t) = bound {
                                    let rest: Vec<Constraint> = conjuncts
                                        .iter()
                                        .enumerate()
                                        .filter(|(k, _)| *k != j)
                                        .map(|(_, c)| c.clone())
                                        .collect();
                                    let sub = Substitution::singleton(v.clone(), t);
                                    body = Constraint::and(rest).apply(&sub).simplify();
                                    vars.remove(i);
                                    eliminated = true;
                                    break 'vars;
                                }
                            }
                        }
                    }
                    if !eliminated {
                        break;
                    }
                }
                let free = body.free_vars();
                vars.retain(|v| free.contains(v));
                match body {
                    Constraint::True => Constraint::True,
                    Constraint::False => Constraint::False,
                    body => Constraint::exists(vars, body),
                }
            }
        }
    }

    fn simplify_and(&self) -> Constraint {
        let mut parts = Vec::new();
        for c in self.conjuncts() {
            match c.simplify() {
                Constraint::True => {}
                Constraint::False => return Constraint::False,
                Constraint::And(inner) => parts.extend(inner),
                other => parts.push(other),
            }
        }
        // solve the equational part; an ununifiable set is unsatisfiable
        let eqs: Vec<(Term, Term)> = parts
            .iter()
            .filter_map(|c| match c {
                Constraint::Eq(l, r) => Some((l.clone(), r.clone())),
                _ => None,
            })
            .collect();
        if !eqs.is_empty() {
            match unify(&eqs) {
                None => return Constraint::False,
                Some(sigma) => {
                    if !sigma.is_empty() {
                        parts = parts
                            .into_iter()
                            .map(|c| match c {
                                Constraint::Eq(_, _) => c,
                                other => other.apply(&sigma).simplify(),
                            })
                            .collect();
                        if parts.iter().any(|c| *c == Constraint::False) {
                            return Constraint::False;
                        }
                        parts.retain(|c| *c != Constraint::True);
                    }
                }
            }
        }
        // substitution may surface nested conjunctions; flatten once more
        let mut flat = Vec::new();
        for c in parts {
            match c {
                Constraint::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let mut dedup: Vec<Constraint> = Vec::new();
        for c in flat {
            if !dedup.contains(&c) {
                dedup.push(c);
            }
        }
        // direct complement pair
        for c in &dedup {
            if let Constraint::Not(inner) = c {
                if dedup.contains(inner) {
                    return Constraint::False;
                }
            }
        }
        Constraint::and(dedup)
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut k = 1usize;
    loop {
        let candidate = format!("{base}_{k}");
        if !avoid.contains(&candidate) {
            return candidate;
        }
        k += 1;
    }
}

// precedence levels for printing: or = 1, and = 2, unary = 3
fn prec(c: &Constraint) -> u8 {
    match c {
        Constraint::Or(_) => 1,
        Constraint::And(_) => 2,
        Constraint::Not(_) | Constraint::Exists(_, _) => 3,
        _ => 4,
    }
}

fn fmt_child(c: &Constraint, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(c) < min {
        write!(f, "({c})")
    } else {
        write!(f, "{c}")
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::True => f.write_str("true"),
            Constraint::False => f.write_str("false"),
            Constraint::Atom(p, args) => {
                f.write_str(p)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Constraint::Eq(l, r) => write!(f, "{l} = {r}"),
            Constraint::Not(c) => {
                f.write_str("not ")?;
                fmt_child(c, 3, f)
            }
            Constraint::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    fmt_child(c, 3, f)?;
                }
                Ok(())
            }
            Constraint::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" or ")?;
                    }
                    fmt_child(c, 2, f)?;
                }
                Ok(())
            }
            Constraint::Exists(vs, body) => {
                f.write_str("exists ")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ": {body}")
            }
        }
    }
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

    fn var(n: &str) -> Variable {
        Variable::new(n)
    }

    #[test]
    fn apply_without_capture() {
        // {X/c} applied to Exists([Y], r(X,Y)) leaves the binder alone
        let f = Constraint::exists(
            vec![var("Y")],
            Constraint::atom("r", vec![v("X"), v("Y")]),
        );
        let s = Substitution::singleton(var("X"), c("c"));
        let applied = f.apply(&s);
        assert_eq!(
            applied,
            Constraint::exists(vec![var("Y")], Constraint::atom("r", vec![c("c"), v("Y")]))
        );
    }

    #[test]
    fn apply_renames_on_capture() {
        // {X/f(Y)} applied to Exists([Y], r(X,Y)) must rename the binder
        let f = Constraint::exists(
            vec![var("Y")],
            Constraint::atom("r", vec![v("X"), v("Y")]),
        );
        let s = Substitution::singleton(var("X"), Term::app("f", vec![v("Y")]));
        let applied = f.apply(&s);
        match &applied {
            Constraint::Exists(vs, body) => {
                assert_eq!(vs.len(), 1);
                assert_ne!(vs[0], var("Y"));
                assert_eq!(
                    **body,
                    Constraint::atom("r", vec![Term::app("f", vec![v("Y")]), Term::Var(vs[0].clone())])
                );
            }
            other => panic!("expected exists, got {other}"),
        }
        // free variables: Y stays free (it came in with the substitution)
        assert_eq!(applied.free_vars(), BTreeSet::from([var("Y")]));
    }

    #[test]
    fn apply_identity() {
        let f = Constraint::atom("q", vec![v("X")]);
        assert_eq!(f.apply(&Substitution::new()), f);
    }

    #[test]
    fn restriction_adds_quantifiers() {
        // restrict(X=c and Y=f and not fi(f), {}) quantifies X and Y
        let f = Constraint::and(vec![
            Constraint::eq(v("X"), c("c")),
            Constraint::eq(v("Y"), c("f")),
            Constraint::atom("fi", vec![c("f")]).negated(),
        ]);
        let r = f.restricted_to(&BTreeSet::new());
        match &r {
            Constraint::Exists(vs, _) => assert_eq!(vs.len(), 2),
            other => panic!("expected exists, got {other}"),
        }
        assert!(r.is_closed());
    }

    #[test]
    fn restriction_no_op_cases() {
        let f = Constraint::atom("e_cls", vec![c("f")]);
        assert_eq!(f.restricted_to(&BTreeSet::from([var("X")])), f);
        let g = Constraint::atom("p", vec![v("X"), v("Y")]);
        assert_eq!(g.restricted_to(&g.free_vars()), g);
    }

    #[test]
    fn simplify_equalities() {
        assert_eq!(Constraint::eq(c("a"), c("a")).simplify(), Constraint::True);
        assert_eq!(Constraint::eq(c("a"), c("b")).simplify(), Constraint::False);
        // x = c and x = d is unsatisfiable under free equality
        let f = Constraint::and(vec![
            Constraint::eq(v("X"), c("cc")),
            Constraint::eq(v("X"), c("d")),
        ]);
        assert_eq!(f.simplify(), Constraint::False);
    }

    #[test]
    fn simplify_propagates_bindings() {
        let f = Constraint::and(vec![
            Constraint::eq(v("X"), c("a")),
            Constraint::atom("q", vec![v("X")]),
        ]);
        let s = f.simplify();
        assert!(s.conjuncts().contains(&&Constraint::atom("q", vec![c("a")])));
    }

    #[test]
    fn simplify_quantifier_elimination() {
        // exists X: (X = a and q(X))  ==  q(a)
        let f = Constraint::exists(
            vec![var("X")],
            Constraint::and(vec![
                Constraint::eq(v("X"), c("a")),
                Constraint::atom("q", vec![v("X")]),
            ]),
        );
        assert_eq!(f.simplify(), Constraint::atom("q", vec![c("a")]));
    }

    #[test]
    fn free_vars_after_apply_match_contract() {
        // freeVars(F sigma) = (freeVars(F) \ dom) + vars of used bindings
        let f = Constraint::and(vec![
            Constraint::atom("q", vec![v("X"), v("Z")]),
            Constraint::exists(vec![var("Y")], Constraint::atom("r", vec![v("Y"), v("X")])),
        ]);
        let s = Substitution::from_pairs([
            (var("X"), Term::app("g", vec![v("W")])),
            (var("Q"), c("a")), // unused binding
        ]);
        let applied = f.apply(&s);
        assert_eq!(applied.free_vars(), BTreeSet::from([var("W"), var("Z")]));
    }
}
