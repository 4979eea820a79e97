//! Terms and substitutions shared by rules and constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A variable, identified by name. In the concrete syntax variables start
/// with an upper-case letter or an underscore.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A first-order term. A constant is a function application with no
/// arguments, so a single variant covers both.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Variable),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(Variable::new(name))
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(symbol.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// The constant name if this term is a nullary application.
    pub fn as_constant(&self) -> Option<&str> {
        match self {
            Term::App(name, args) if args.is_empty() => Some(name),
            _ => None,
        }
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn contains_var(&self, v: &Variable) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn apply(&self, subst: &Substitution) -> Term {
        match self {
            Term::Var(v) => match subst.get(v) {
                Some(t) => t.clone(),
                None => self.clone(),
            },
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.apply(subst)).collect())
            }
        }
    }

    /// Nesting depth: constants and variables have depth 0.
    pub fn depth(&self) -> usize {
        term_depth(self)
    }

    /// Collects every function symbol with its arity.
    pub fn collect_symbols(&self, out: &mut BTreeMap<String, usize>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone(), args.len());
            for a in args {
                a.collect_symbols(out);
            }
        }
    }
}

fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(v) => write!(f, "{v}"),
        Term::App(name, args) => {
            f.write_str(name)?;
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
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f)
    }
}

/// A finite map from variables to terms. Substitutions produced by
/// unification are idempotent: applying them twice equals applying once.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Substitution {
    map: BTreeMap<Variable, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Variable, Term)>) -> Self {
        Substitution {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn singleton(v: Variable, t: Term) -> Self {
        Substitution {
            map: BTreeMap::from([(v, t)]),
        }
    }

    pub fn bind(&mut self, v: Variable, t: Term) {
        self.map.insert(v, t);
    }

    pub fn unbind(&mut self, v: &Variable) {
        self.map.remove(v);
    }

    pub fn get(&self, v: &Variable) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Variable> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.map.iter()
    }

    /// Variables appearing in the range of the substitution.
    pub fn range_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_vars(&mut out);
        }
        out
    }

    /// Keeps only the bindings whose variable satisfies the predicate.
    pub fn restricted(&self, keep: impl Fn(&Variable) -> bool) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(v, _)| keep(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }
}

/// Most general unifier of a set of term pairs, with occurs check.
/// The result is fully resolved: no bound variable appears in any binding.
pub fn unify(pairs: &[(Term, Term)]) -> Option<Substitution> {
    let mut work: Vec<(Term, Term)> = pairs.to_vec();
    let mut subst = Substitution::new();
    while let Some((l, r)) = work.pop() {
        let l = l.apply(&subst);
        let r = r.apply(&subst);
        match (l, r) {
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if t == Term::Var(v.clone()) {
                    continue;
                }
                if t.contains_var(&v) {
                    return None; // occurs check
                }
                // Keep the substitution resolved by rewriting earlier bindings.
                let one = Substitution::singleton(v.clone(), t.clone());
                for (_, bound) in subst.map.iter_mut() {
                    *bound = bound.apply(&one);
                }
                subst.bind(v, t);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                work.extend(fa.into_iter().zip(ga));
            }
        }
    }
    Some(subst)
}

/// All ground terms of depth at most `max_depth` over the given function
/// symbols. Depth 0 yields the constants.
pub fn ground_terms(symbols: &BTreeMap<String, usize>, max_depth: usize) -> Vec<Term> {
    let mut by_depth: Vec<Vec<Term>> = Vec::new();
    let constants: Vec<Term> = symbols
        .iter()
        .filter(|(_, a)| **a == 0)
        .map(|(n, _)| Term::constant(n.clone()))
        .collect();
    by_depth.push(constants);
    for d in 1..=max_depth {
        let pool: Vec<Term> = by_depth.iter().flatten().cloned().collect();
        let mut level = Vec::new();
        for (name, arity) in symbols.iter().filter(|(_, a)| **a > 0) {
            // every argument tuple whose max depth is d-1
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for _ in 0..*arity {
                let mut next = Vec::new();
                for tuple in &tuples {
                    for t in &pool {
                        let mut tuple = tuple.clone();
                        tuple.push(t.clone());
                        next.push(tuple);
                    }
                }
                tuples = next;
            }
            for tuple in tuples {
                let deepest = tuple.iter().map(term_depth).max().unwrap_or(0);
                if deepest == d - 1 {
                    level.push(Term::App(name.clone(), tuple));
                }
            }
        }
        by_depth.push(level);
    }
    let mut all: Vec<Term> = by_depth.into_iter().flatten().collect();
    all.sort();
    all
}

fn term_depth(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::App(_, args) if args.is_empty() => 0,
        Term::App(_, args) => 1 + args.iter().map(term_depth).max().unwrap_or(0),
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

    #[test]
    fn unify_builds_resolved_bindings() {
        // x = f(y), y = a  =>  {x/f(a), y/a}
        let s = unify(&[
            (v("X"), Term::app("f", vec![v("Y")])),
            (v("Y"), c("a")),
        ])
        .unwrap();
        assert_eq!(s.get(&Variable::new("X")), Some(&Term::app("f", vec![c("a")])));
        assert_eq!(s.get(&Variable::new("Y")), Some(&c("a")));
    }

    #[test]
    fn unify_occurs_check() {
        assert!(unify(&[(v("X"), Term::app("f", vec![v("X")]))]).is_none());
    }

    #[test]
    fn unify_distinct_constants_fails() {
        assert!(unify(&[(c("a"), c("b"))]).is_none());
        assert!(unify(&[(v("X"), c("a")), (v("X"), c("b"))]).is_none());
    }

    #[test]
    fn ground_term_enumeration_depth_bound() {
        let mut sig = BTreeMap::new();
        sig.insert("a".to_string(), 0);
        sig.insert("f".to_string(), 1);
        let terms = ground_terms(&sig, 2);
        // a, f(a), f(f(a))
        assert_eq!(terms.len(), 3);
        assert!(terms.iter().all(Term::is_ground));
    }

    #[test]
    fn display_round() {
        let t = Term::app("f", vec![c("a"), v("X")]);
        assert_eq!(t.to_string(), "f(a,X)");
    }
}
