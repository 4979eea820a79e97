//! External theories. A theory answers satisfiability and entailment
//! questions about constraints; the stock implementation is
//! [`FiniteGroundTheory`], a universal clausal theory over a finite constant
//! universe whose Herbrand models can be enumerated outright. Syntactic
//! equality `=` is always interpreted as free equality, so distinct ground
//! terms are distinct values.

mod cet;
mod solved;

pub use cet::{cet_solve, CetOutcome};
pub use solved::{bound_to, to_solved_form_disjunction, Binding, SolvedForm};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::syntax::{
    unify, Atom, Constraint, HybridProgram, Substitution, Term, TheoryClause, TheoryDecls,
    Variable,
};

/// Default cap on the number of ground constraint atoms a finite theory may
/// have before model enumeration refuses to run.
pub const DEFAULT_ATOM_CAP: usize = 24;
/// Hard cap on the number of enumerated models.
pub const MODEL_CAP: usize = 1 << 20;
/// Cost guard for satisfiability checks that close free variables over the
/// constant universe.
const SAT_WORK_CAP: usize = 2_000_000;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum TheoryError {
    #[error("theory has {count} ground constraint atoms, more than the cap of {cap}")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("theory has more than {cap} models")]
    TooManyModels { cap: usize },
    #[error("theory does not support model enumeration")]
    NotEnumerable,
    #[error("constraint is not closed: variable {variable} is free")]
    NotClosed { variable: Variable },
    #[error("entailment is not decidable here: {reason}")]
    NotDecidable { reason: String },
    #[error("constraint atom `{atom}` is outside the theory signature")]
    OutOfSignature { atom: String },
    #[error("cannot bind theory: {message}")]
    Bind { message: String },
}

/// What a theory implementation guarantees.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Capabilities {
    pub entails_closed_decidable: bool,
    pub models_enumerable: bool,
    pub witness_property: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SatResult {
    Sat,
    Unsat,
    /// The theory could not decide; callers must treat this as possibly
    /// satisfiable.
    Unknown,
}

/// The interface the reasoning engine expects from an external theory.
pub trait Theory: Send + Sync {
    fn capabilities(&self) -> Capabilities;

    /// Is the existential closure of `c` true in some model?
    fn satisfiable(&self, c: &Constraint) -> SatResult;

    /// Does `c` (closed) hold in every model?
    fn entails(&self, c: &Constraint) -> Result<bool, TheoryError>;

    /// The enumerated models, when the theory supports enumeration.
    fn models(&self) -> Result<&[TheoryModel], TheoryError> {
        Err(TheoryError::NotEnumerable)
    }

    /// Are two constraints equivalent under every model and every grounding
    /// of their free variables? Optional; theories without a decision
    /// procedure report `NotDecidable`.
    fn equivalent(&self, a: &Constraint, b: &Constraint) -> Result<bool, TheoryError> {
        let _ = (a, b);
        Err(TheoryError::NotDecidable {
            reason: "this theory has no equivalence procedure".into(),
        })
    }
}

/// Interned ground constraint atoms of a finite theory, in sorted order.
#[derive(Debug)]
pub struct GroundAtoms {
    list: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl GroundAtoms {
    fn new(list: Vec<Atom>) -> Self {
        let index = list
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        GroundAtoms { list, index }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.list
    }

    pub fn position(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }
}

/// One Herbrand model of a finite theory: a total truth assignment on its
/// ground constraint atoms.
#[derive(Clone, Debug)]
pub struct TheoryModel {
    atoms: Arc<GroundAtoms>,
    truth: Vec<bool>,
}

impl TheoryModel {
    pub fn holds(&self, atom: &Atom) -> Option<bool> {
        self.atoms.position(atom).map(|i| self.truth[i])
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms
            .atoms()
            .iter()
            .zip(&self.truth)
            .filter(|(_, t)| **t)
            .map(|(a, _)| a)
    }
}

impl fmt::Display for TheoryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for a in self.true_atoms() {
            if any {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
            any = true;
        }
        if !any {
            f.write_str("-")?;
        }
        Ok(())
    }
}

/// A set of models out of a theory's enumerated model list, one bit per
/// model. Conjunction, disjunction and negation of closed constraints
/// become bitwise operations on masks.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModelMask {
    words: Vec<u64>,
    len: usize,
}

impl ModelMask {
    pub fn empty(len: usize) -> Self {
        ModelMask {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut m = ModelMask {
            words: vec![!0u64; len.div_ceil(64)],
            len,
        };
        m.trim();
        m
    }

    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 >> extra;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        *self == ModelMask::full(self.len)
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn and_with(&mut self, other: &ModelMask) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
    }

    pub fn or_with(&mut self, other: &ModelMask) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn negated(&self) -> ModelMask {
        let mut out = ModelMask {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.trim();
        out
    }
}

enum EvalIssue {
    NonGround(Variable),
    OutOfSignature(Atom),
}

/// A finite clausal theory: universally quantified clauses over constraint
/// predicates and a finite constant universe. Every Herbrand model is a
/// truth assignment on the finite set of ground constraint atoms, so
/// satisfiability and entailment are decided by enumeration. The constant
/// universe and function symbols are taken from the program the theory is
/// bound to, which gives the witness property by construction.
pub struct FiniteGroundTheory {
    name: Option<String>,
    constraint_preds: BTreeMap<String, usize>,
    constants: BTreeSet<String>,
    /// Non-constant function symbols of the shared alphabet (from rules).
    functions: BTreeMap<String, usize>,
    clauses: Vec<TheoryClause>,
    atom_cap: usize,
    enumerated: OnceLock<Result<Enumerated, TheoryError>>,
}

struct Enumerated {
    atoms: Arc<GroundAtoms>,
    models: Vec<TheoryModel>,
}

impl fmt::Debug for FiniteGroundTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroundTheory")
            .field("name", &self.name)
            .field("constraint_preds", &self.constraint_preds)
            .field("constants", &self.constants)
            .field("clauses", &self.clauses.len())
            .finish()
    }
}

impl FiniteGroundTheory {
    /// Binds parsed theory declarations to a program: predicate alphabets
    /// are merged and checked disjoint from the rule predicates, constant
    /// universes are merged.
    pub fn bind(decls: TheoryDecls, program: &HybridProgram) -> Result<Self, TheoryError> {
        let mut constraint_preds = program.signature.constraint_preds.clone();
        for (p, a) in &decls.constraint_preds {
            if program.signature.rule_preds.contains_key(p) {
                return Err(TheoryError::Bind {
                    message: format!("`{p}` is a rule predicate of the program"),
                });
            }
            match constraint_preds.get(p) {
                Some(&b) if b != *a => {
                    return Err(TheoryError::Bind {
                        message: format!(
                            "predicate `{p}` has arity {a} in the theory but {b} in the program"
                        ),
                    });
                }
                _ => {
                    constraint_preds.insert(p.clone(), *a);
                }
            }
        }
        if let (Some(want), Some(have)) = (&program.theory_ref, &decls.name) {
            if want != have {
                return Err(TheoryError::Bind {
                    message: format!("program expects theory `{want}`, file declares `{have}`"),
                });
            }
        }
        let mut constants = program.signature.constants.clone();
        constants.extend(decls.constants.iter().cloned());
        Ok(FiniteGroundTheory {
            name: decls.name,
            constraint_preds,
            constants,
            functions: program.signature.functions.clone(),
            clauses: decls.clauses,
            atom_cap: DEFAULT_ATOM_CAP,
            enumerated: OnceLock::new(),
        })
    }

    /// A theory with no axioms over the program's own signature.
    pub fn empty_for(program: &HybridProgram) -> Self {
        FiniteGroundTheory {
            name: None,
            constraint_preds: program.signature.constraint_preds.clone(),
            constants: program.signature.constants.clone(),
            functions: program.signature.functions.clone(),
            clauses: Vec::new(),
            atom_cap: DEFAULT_ATOM_CAP,
            enumerated: OnceLock::new(),
        }
    }

    pub fn with_atom_cap(mut self, cap: usize) -> Self {
        self.atom_cap = cap;
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn constants(&self) -> &BTreeSet<String> {
        &self.constants
    }

    pub fn constant_terms(&self) -> Vec<Term> {
        self.constants.iter().map(Term::constant).collect()
    }

    /// All function symbols of the shared alphabet, constants included.
    pub fn all_functions(&self) -> BTreeMap<String, usize> {
        let mut out = self.functions.clone();
        for c in &self.constants {
            out.insert(c.clone(), 0);
        }
        out
    }

    pub fn is_datalog(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn clauses(&self) -> &[TheoryClause] {
        &self.clauses
    }

    fn enumerated(&self) -> Result<&Enumerated, TheoryError> {
        self.enumerated
            .get_or_init(|| self.enumerate())
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn ground_atoms(&self) -> Result<&GroundAtoms, TheoryError> {
        Ok(&self.enumerated()?.atoms)
    }

    fn enumerate(&self) -> Result<Enumerated, TheoryError> {
        // ground atom table, sorted for a deterministic order
        let mut count = 0usize;
        for arity in self.constraint_preds.values() {
            let tuples = self
                .constants
                .len()
                .checked_pow(*arity as u32)
                .unwrap_or(usize::MAX);
            count = count.saturating_add(tuples);
        }
        if count > self.atom_cap {
            return Err(TheoryError::TooManyAtoms {
                count,
                cap: self.atom_cap,
            });
        }
        let consts: Vec<Term> = self.constant_terms();
        let mut atoms = Vec::new();
        for (pred, arity) in &self.constraint_preds {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for _ in 0..*arity {
                let mut next = Vec::new();
                for t in &tuples {
                    for c in &consts {
                        let mut t = t.clone();
                        t.push(c.clone());
                        next.push(t);
                    }
                }
                tuples = next;
            }
            for args in tuples {
                atoms.push(Atom::new(pred.clone(), args));
            }
        }
        atoms.sort();
        let atoms = Arc::new(GroundAtoms::new(atoms));

        // ground the clauses
        let mut ground_clauses: Vec<(Vec<(bool, usize)>, Vec<(bool, usize)>, usize)> = Vec::new();
        for clause in &self.clauses {
            let mut vars = BTreeSet::new();
            for (_, a) in clause.body.iter().chain(&clause.head) {
                a.collect_vars(&mut vars);
            }
            let vars: Vec<Variable> = vars.into_iter().collect();
            let m = consts.len();
            let total = m.checked_pow(vars.len() as u32).unwrap_or(0);
            for mut idx in 0..total {
                let mut subst = Substitution::new();
                for v in &vars {
                    subst.bind(v.clone(), consts[idx % m].clone());
                    idx /= m;
                }
                let intern = |lits: &[(bool, Atom)]| -> Result<Vec<(bool, usize)>, TheoryError> {
                    lits.iter()
                        .map(|(pos, a)| {
                            let g = a.apply(&subst);
                            atoms
                                .position(&g)
                                .map(|i| (*pos, i))
                                .ok_or(TheoryError::OutOfSignature {
                                    atom: g.to_string(),
                                })
                        })
                        .collect()
                };
                let body = intern(&clause.body)?;
                let head = intern(&clause.head)?;
                let max = body
                    .iter()
                    .chain(&head)
                    .map(|(_, i)| *i)
                    .max()
                    .unwrap_or(0);
                ground_clauses.push((body, head, max));
            }
        }
        let n = atoms.len();
        let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
        for (ci, (_, _, max)) in ground_clauses.iter().enumerate() {
            if n > 0 {
                by_last[*max].push(ci);
            }
        }

        // backtracking enumeration, false before true
        let mut models = Vec::new();
        if n == 0 {
            let violated = ground_clauses
                .iter()
                .any(|(body, head, _)| body.is_empty() && head.is_empty());
            if !violated {
                models.push(TheoryModel {
                    atoms: atoms.clone(),
                    truth: Vec::new(),
                });
            }
        } else {
            let mut truth = vec![false; n];
            let mut stack: Vec<(usize, bool)> = vec![(0, false)];
            while let Some((i, value)) = stack.pop() {
                truth[i] = value;
                // the sibling goes below the subtree so the `false` branch is
                // fully explored before atom i flips to `true`
                if !value {
                    stack.push((i, true));
                }
                let ok = by_last[i].iter().all(|&ci| {
                    let (body, head, _) = &ground_clauses[ci];
                    let body_true = body.iter().all(|&(pos, a)| truth[a] == pos);
                    let head_true = head.iter().any(|&(pos, a)| truth[a] == pos);
                    !body_true || head_true
                });
                if ok {
                    if i + 1 == n {
                        if models.len() >= MODEL_CAP {
                            return Err(TheoryError::TooManyModels { cap: MODEL_CAP });
                        }
                        models.push(TheoryModel {
                            atoms: atoms.clone(),
                            truth: truth.clone(),
                        });
                    } else {
                        stack.push((i + 1, false));
                    }
                }
            }
        }
        Ok(Enumerated { atoms, models })
    }

    fn resolve(term: &Term, env: &[(Variable, Term)]) -> Term {
        match term {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(w, _)| w == v)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| term.clone()),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| Self::resolve(a, env)).collect(),
            ),
        }
    }

    fn eval(
        &self,
        model: &TheoryModel,
        c: &Constraint,
        env: &mut Vec<(Variable, Term)>,
    ) -> Result<bool, EvalIssue> {
        match c {
            Constraint::True => Ok(true),
            Constraint::False => Ok(false),
            Constraint::Eq(l, r) => {
                let l = Self::resolve(l, env);
                let r = Self::resolve(r, env);
                if !l.is_ground() || !r.is_ground() {
                    let mut vars = l.vars();
                    vars.extend(r.vars());
                    return Err(EvalIssue::NonGround(vars.into_iter().next().unwrap()));
                }
                Ok(l == r)
            }
            Constraint::Atom(p, args) => {
                let atom = Atom::new(
                    p.clone(),
                    args.iter().map(|t| Self::resolve(t, env)).collect(),
                );
                if !atom.is_ground() {
                    return Err(EvalIssue::NonGround(
                        atom.vars().into_iter().next().unwrap(),
                    ));
                }
                model
                    .holds(&atom)
                    .ok_or(EvalIssue::OutOfSignature(atom))
            }
            Constraint::Not(inner) => Ok(!self.eval(model, inner, env)?),
            Constraint::And(cs) => {
                for c in cs {
                    if !self.eval(model, c, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Constraint::Or(cs) => {
                for c in cs {
                    if self.eval(model, c, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Constraint::Exists(vars, body) => {
                let consts = self.constant_terms();
                if consts.is_empty() {
                    return Ok(false); // empty constant universe: no witnesses
                }
                let mut idxs = vec![0usize; vars.len()];
                let mut issue: Option<EvalIssue> = None;
                loop {
                    let depth = env.len();
                    for (v, &i) in vars.iter().zip(&idxs) {
                        env.push((v.clone(), consts[i].clone()));
                    }
                    let r = self.eval(model, body, env);
                    env.truncate(depth);
                    match r {
                        Ok(true) => return Ok(true),
                        Ok(false) => {}
                        Err(e) => issue = Some(e),
                    }
                    // next tuple
                    let mut carry = 0;
                    while carry < idxs.len() {
                        idxs[carry] += 1;
                        if idxs[carry] < consts.len() {
                            break;
                        }
                        idxs[carry] = 0;
                        carry += 1;
                    }
                    if carry == idxs.len() {
                        break;
                    }
                }
                match issue {
                    Some(e) => Err(e),
                    None => Ok(false),
                }
            }
        }
    }

    /// Evaluates a closed constraint in one model.
    pub fn holds_in(&self, model: &TheoryModel, c: &Constraint) -> Result<bool, TheoryError> {
        let mut env = Vec::new();
        self.eval(model, c, &mut env).map_err(|e| match e {
            EvalIssue::NonGround(variable) => TheoryError::NotClosed { variable },
            EvalIssue::OutOfSignature(atom) => TheoryError::OutOfSignature {
                atom: atom.to_string(),
            },
        })
    }

    /// The models in which a closed constraint holds, as a mask over the
    /// enumerated model list.
    pub fn constraint_mask(&self, c: &Constraint) -> Result<ModelMask, TheoryError> {
        let models = self.models()?;
        let mut mask = ModelMask::empty(models.len());
        for (i, m) in models.iter().enumerate() {
            if self.holds_in(m, c)? {
                mask.set(i);
            }
        }
        Ok(mask)
    }

    /// Are two constraints equivalent in every model, under every grounding
    /// of their free variables over the constant universe?
    pub fn equivalent(&self, a: &Constraint, b: &Constraint) -> Result<bool, TheoryError> {
        if !self.is_datalog() {
            return Err(TheoryError::NotDecidable {
                reason: "equivalence over non-constant function symbols".into(),
            });
        }
        let mut vars: Vec<Variable> = a.free_vars().into_iter().collect();
        for v in b.free_vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let consts = self.constant_terms();
        if !vars.is_empty() && consts.is_empty() {
            return Err(TheoryError::NotDecidable {
                reason: "open constraint over an empty constant universe".into(),
            });
        }
        let models = self.models()?;
        let total = consts.len().max(1).checked_pow(vars.len() as u32);
        match total {
            Some(t) if t.saturating_mul(models.len().max(1)) <= SAT_WORK_CAP => {}
            _ => {
                return Err(TheoryError::NotDecidable {
                    reason: "equivalence check too large".into(),
                })
            }
        }
        for mut idx in 0..total.unwrap() {
            let mut subst = Substitution::new();
            for v in &vars {
                subst.bind(v.clone(), consts[idx % consts.len().max(1)].clone());
                idx /= consts.len().max(1);
            }
            let ga = a.apply(&subst);
            let gb = b.apply(&subst);
            for m in models {
                if self.holds_in(m, &ga)? != self.holds_in(m, &gb)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl Theory for FiniteGroundTheory {
    fn capabilities(&self) -> Capabilities {
        // With non-constant function symbols around, quantified constraints
        // range over an infinite universe and enumeration is no longer a
        // decision procedure; both guarantees are tied to Datalog mode.
        Capabilities {
            entails_closed_decidable: self.is_datalog(),
            models_enumerable: self.is_datalog(),
            witness_property: true,
        }
    }

    fn satisfiable(&self, c: &Constraint) -> SatResult {
        let c = c.simplify();
        match &c {
            Constraint::True => return SatResult::Sat,
            Constraint::False => return SatResult::Unsat,
            _ => {}
        }
        // presolve the top-level equational part
        let conjuncts = c.conjuncts();
        let eqs: Vec<(Term, Term)> = conjuncts
            .iter()
            .filter_map(|c| match c {
                Constraint::Eq(l, r) => Some((l.clone(), r.clone())),
                _ => None,
            })
            .collect();
        let sigma = match unify(&eqs) {
            Some(s) => s,
            None => return SatResult::Unsat,
        };
        let rest: Vec<Constraint> = conjuncts
            .iter()
            .filter(|c| !matches!(c, Constraint::Eq(_, _)))
            .map(|c| c.apply(&sigma).simplify())
            .collect();
        if rest.iter().any(|c| *c == Constraint::False) {
            return SatResult::Unsat;
        }
        let rest: Vec<Constraint> = rest.into_iter().filter(|c| *c != Constraint::True).collect();
        if rest.is_empty() {
            return SatResult::Sat;
        }
        // pure equality/disequality conjunctions go to the free-equality solver
        let only_eq_shapes = rest.iter().all(|c| {
            matches!(c, Constraint::Not(inner) if matches!(**inner, Constraint::Eq(_, _)))
        });
        if only_eq_shapes {
            let diseqs: Vec<(Term, Term)> = rest
                .iter()
                .map(|c| match c {
                    Constraint::Not(inner) => match &**inner {
                        Constraint::Eq(l, r) => (l.clone(), r.clone()),
                        _ => unreachable!(),
                    },
                    _ => unreachable!(),
                })
                .collect();
            return match cet_solve(&eqs, &diseqs, &self.all_functions()) {
                CetOutcome::Sat(_) => SatResult::Sat,
                CetOutcome::Unsat => SatResult::Unsat,
            };
        }
        // close the residue over the constant universe and evaluate
        let residue = Constraint::and(rest);
        let vars: Vec<Variable> = residue.free_vars().into_iter().collect();
        let consts = self.constant_terms();
        if !vars.is_empty() && consts.is_empty() {
            return SatResult::Unknown;
        }
        let models = match self.models() {
            Ok(m) => m,
            Err(_) => return SatResult::Unknown,
        };
        let total = match consts.len().max(1).checked_pow(vars.len() as u32) {
            Some(t) if t.saturating_mul(models.len().max(1)) <= SAT_WORK_CAP => t,
            _ => return SatResult::Unknown,
        };
        let mut evaluation_failed = false;
        for mut idx in 0..total {
            let mut subst = Substitution::new();
            for v in &vars {
                subst.bind(v.clone(), consts[idx % consts.len().max(1)].clone());
                idx /= consts.len().max(1);
            }
            let g = residue.apply(&subst);
            for m in models {
                match self.holds_in(m, &g) {
                    Ok(true) => return SatResult::Sat,
                    Ok(false) => {}
                    Err(_) => evaluation_failed = true,
                }
            }
        }
        if evaluation_failed || !self.is_datalog() {
            // over a richer universe a witness could still exist
            SatResult::Unknown
        } else {
            SatResult::Unsat
        }
    }

    fn entails(&self, c: &Constraint) -> Result<bool, TheoryError> {
        if let Some(v) = c.free_vars().into_iter().next() {
            return Err(TheoryError::NotClosed { variable: v });
        }
        let c = c.simplify();
        if !self.is_datalog() && has_quantifier(&c) {
            return Err(TheoryError::NotDecidable {
                reason: "quantified constraint over non-constant function symbols".into(),
            });
        }
        for m in self.models()? {
            if !self.holds_in(m, &c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn models(&self) -> Result<&[TheoryModel], TheoryError> {
        Ok(&self.enumerated()?.models)
    }

    fn equivalent(&self, a: &Constraint, b: &Constraint) -> Result<bool, TheoryError> {
        FiniteGroundTheory::equivalent(self, a, b)
    }
}

fn has_quantifier(c: &Constraint) -> bool {
    match c {
        Constraint::Exists(_, _) => true,
        Constraint::Not(inner) => has_quantifier(inner),
        Constraint::And(cs) | Constraint::Or(cs) => cs.iter().any(has_quantifier),
        _ => false,
    }
}
