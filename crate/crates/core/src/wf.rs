//! Well-founded models, computed bottom-up. A hybrid program is reduced
//! against one model of its theory at a time: rule constraints true in that
//! model are erased, rules with false constraints are dropped, and what
//! remains is a ground normal program whose well-founded model is the least
//! fixpoint of the alternating operator below. Classifying a ground query
//! means reading off its value in the well-founded model for every
//! enumerated theory model; this module is the ground-truth oracle the
//! goal-driven engine is checked against.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::syntax::{Atom, GroundingError, HybridProgram, Literal, Term};
use crate::theory::{FiniteGroundTheory, Theory, TheoryError, TheoryModel};

pub type AtomId = usize;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum WfError {
    #[error("not a Datalog program: function symbol `{symbol}` has arity > 0")]
    NonDatalog { symbol: String },
    #[error("{what} must be ground here")]
    NonGround { what: String },
    #[error("a declarative query is a conjunction of rule literals; constraints are not allowed")]
    ConstraintInGoal,
    #[error("unknown rule atom `{atom}`")]
    UnknownAtom { atom: String },
    #[error("negation-free check called on a program with negative literals")]
    NegationPresent,
    #[error("theory is inconsistent: it has no models")]
    InconsistentTheory,
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}

/// Interned ground rule atoms, sorted, with stable ids.
#[derive(Debug)]
pub struct AtomTable {
    list: Vec<Atom>,
    index: HashMap<Atom, AtomId>,
}

impl AtomTable {
    pub fn from_sorted(list: Vec<Atom>) -> Self {
        let index = list
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        AtomTable { list, index }
    }

    pub fn id(&self, atom: &Atom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.list[id]
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &Atom)> {
        self.list.iter().enumerate()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Truth3 {
    True,
    False,
    Undefined,
}

impl Truth3 {
    pub fn negated(self) -> Truth3 {
        match self {
            Truth3::True => Truth3::False,
            Truth3::False => Truth3::True,
            Truth3::Undefined => Truth3::Undefined,
        }
    }
}

impl fmt::Display for Truth3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth3::True => "true",
            Truth3::False => "false",
            Truth3::Undefined => "undefined",
        })
    }
}

/// Truth across all models of the theory. `ModelDependent` means at least
/// two theory models give the query different values.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Truth4 {
    True,
    False,
    Undefined,
    ModelDependent,
}

impl fmt::Display for Truth4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth4::True => "true",
            Truth4::False => "false",
            Truth4::Undefined => "undefined",
            Truth4::ModelDependent => "model-dependent",
        })
    }
}

/// A consistent 3-valued interpretation: disjoint true and false atom sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interp {
    t: Vec<bool>,
    f: Vec<bool>,
}

impl Interp {
    pub fn empty(n: usize) -> Self {
        Interp {
            t: vec![false; n],
            f: vec![false; n],
        }
    }

    pub fn new(t: Vec<bool>, f: Vec<bool>) -> Self {
        debug_assert_eq!(t.len(), f.len());
        Interp { t, f }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn value(&self, id: AtomId) -> Truth3 {
        if self.t[id] {
            Truth3::True
        } else if self.f[id] {
            Truth3::False
        } else {
            Truth3::Undefined
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.t.iter().zip(&self.f).all(|(t, f)| !(*t && *f))
    }

    pub fn subset_of(&self, other: &Interp) -> bool {
        self.t.iter().zip(&other.t).all(|(a, b)| !*a || *b)
            && self.f.iter().zip(&other.f).all(|(a, b)| !*a || *b)
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.t.iter().enumerate().filter(|(_, v)| **v).map(|(i, _)| i)
    }

    pub fn false_atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.f.iter().enumerate().filter(|(_, v)| **v).map(|(i, _)| i)
    }

    /// Kleene value of a conjunction of ground literals over atom ids.
    pub fn literal_conjunction(&self, lits: &[(bool, AtomId)]) -> Truth3 {
        let mut out = Truth3::True;
        for (positive, id) in lits {
            let v = if *positive {
                self.value(*id)
            } else {
                self.value(*id).negated()
            };
            match v {
                Truth3::False => return Truth3::False,
                Truth3::Undefined => out = Truth3::Undefined,
                Truth3::True => {}
            }
        }
        out
    }
}

/// A ground rule `head <- body` with constraints already resolved away.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroundRule {
    pub head: AtomId,
    pub body: Vec<(bool, AtomId)>,
}

/// A ground normal program over an interned Herbrand base.
#[derive(Clone, Debug)]
pub struct GroundNormalProgram {
    pub atoms: Arc<AtomTable>,
    pub rules: Vec<GroundRule>,
}

/// A ground definite program over the doubled alphabet in which `~p` is a
/// fresh predicate: literal `(false, A)` is the atom `~A`.
#[derive(Clone, Debug)]
pub struct DefiniteProgram {
    n_atoms: usize,
    facts: Vec<(bool, AtomId)>,
    rules: Vec<((bool, AtomId), Vec<(bool, AtomId)>)>,
}

/// The least Herbrand model of a definite program, split into the positive
/// and negative halves of the doubled alphabet.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LitSet {
    pub pos: Vec<bool>,
    pub neg: Vec<bool>,
}

impl DefiniteProgram {
    pub fn least_model(&self) -> LitSet {
        let mut pos = vec![false; self.n_atoms];
        let mut neg = vec![false; self.n_atoms];
        for (p, id) in &self.facts {
            if *p {
                pos[*id] = true;
            } else {
                neg[*id] = true;
            }
        }
        loop {
            let mut changed = false;
            for ((hp, hid), body) in &self.rules {
                let holds = if *hp { pos[*hid] } else { neg[*hid] };
                if holds {
                    continue;
                }
                let fires = body
                    .iter()
                    .all(|(p, id)| if *p { pos[*id] } else { neg[*id] });
                if fires {
                    if *hp {
                        pos[*hid] = true;
                    } else {
                        neg[*hid] = true;
                    }
                    changed = true;
                }
            }
            if !changed {
                return LitSet { pos, neg };
            }
        }
    }
}

impl GroundNormalProgram {
    pub fn herbrand_size(&self) -> usize {
        self.atoms.len()
    }

    /// The definite program over the doubled alphabet, extended with the
    /// unary clauses `~A` for each atom flagged in `negated_facts`.
    pub fn extended_by_negations(&self, negated_facts: &[bool]) -> DefiniteProgram {
        let facts = negated_facts
            .iter()
            .enumerate()
            .filter(|(_, v)| **v)
            .map(|(i, _)| (false, i))
            .collect();
        let rules = self
            .rules
            .iter()
            .map(|r| ((true, r.head), r.body.clone()))
            .collect();
        DefiniteProgram {
            n_atoms: self.atoms.len(),
            facts,
            rules,
        }
    }

    /// Extension making exactly the negative literals true in `i` into
    /// facts.
    pub fn definite_with_true_negatives(&self, i: &Interp) -> DefiniteProgram {
        self.extended_by_negations(&i.f)
    }

    /// Extension making the negative literals that are true *or undefined*
    /// in `i` into facts, i.e. `~A` for every atom not true in `i`.
    pub fn definite_with_undefined_negatives(&self, i: &Interp) -> DefiniteProgram {
        let not_true: Vec<bool> = i.t.iter().map(|t| !t).collect();
        self.extended_by_negations(&not_true)
    }

    /// One step of the alternating fixpoint: true atoms come from the least
    /// model under the proven negatives, false atoms from the complement of
    /// the least model under the optimistic negatives.
    pub fn wf_step(&self, i: &Interp) -> Interp {
        let t = self.definite_with_true_negatives(i).least_model().pos;
        let candidate = self.definite_with_undefined_negatives(i).least_model().pos;
        let f = candidate.iter().map(|v| !v).collect();
        Interp { t, f }
    }

    /// The least fixpoint of `wf_step`, starting from the empty
    /// interpretation.
    pub fn well_founded_model(&self) -> Interp {
        let n = self.atoms.len();
        let mut current = Interp::empty(n);
        for _ in 0..=2 * n + 2 {
            let next = self.wf_step(&current);
            debug_assert!(next.is_consistent());
            if next == current {
                return current;
            }
            current = next;
        }
        unreachable!("alternating fixpoint did not stabilize");
    }
}

/// The Herbrand base for a program over a universe: all rule-predicate
/// atoms over the universe, plus any atom occurring in a ground rule (the
/// latter matters only for depth-bounded non-Datalog universes).
fn atom_table(
    program: &HybridProgram,
    ground: &[crate::syntax::HybridRule],
    universe: &[Term],
) -> Arc<AtomTable> {
    let mut atoms = program.herbrand_base(universe);
    for rule in ground {
        atoms.push(rule.head.clone());
        for l in &rule.body {
            atoms.push(l.atom.clone());
        }
    }
    atoms.sort();
    atoms.dedup();
    Arc::new(AtomTable::from_sorted(atoms))
}

/// Reduces a hybrid program against one theory model: ground instances
/// whose closed constraint holds keep their rule (constraint erased), the
/// rest are dropped.
pub fn reduce(
    program: &HybridProgram,
    theory: &FiniteGroundTheory,
    model: &TheoryModel,
    universe: &[Term],
) -> Result<GroundNormalProgram, WfError> {
    let ground = program.ground_rules(universe)?;
    let atoms = atom_table(program, &ground, universe);
    let mut rules = Vec::new();
    for rule in &ground {
        let constraint = rule.constraint.simplify();
        if !theory.holds_in(model, &constraint)? {
            continue;
        }
        let head = atoms.id(&rule.head).expect("head atom interned");
        let body = rule
            .body
            .iter()
            .map(|l| (l.positive, atoms.id(&l.atom).expect("body atom interned")))
            .collect();
        rules.push(GroundRule { head, body });
    }
    Ok(GroundNormalProgram { atoms, rules })
}

/// Four-way truth of a query, with a witnessing pair of theory models when
/// the verdict is model-dependent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Classification {
    pub value: Truth4,
    pub disagreement: Option<((usize, Truth3), (usize, Truth3))>,
}

/// Precomputed well-founded models of a Datalog hybrid program, one per
/// enumerated theory model.
pub struct DeclarativeOracle {
    atoms: Arc<AtomTable>,
    per_model: Vec<Interp>,
}

impl DeclarativeOracle {
    pub fn new(program: &HybridProgram, theory: &FiniteGroundTheory) -> Result<Self, WfError> {
        if let Some((symbol, _)) = program.signature.functions.iter().next() {
            return Err(WfError::NonDatalog {
                symbol: symbol.clone(),
            });
        }
        let universe = theory.constant_terms();
        let models = theory.models()?;
        if models.is_empty() {
            return Err(WfError::InconsistentTheory);
        }
        // ground once; per model, a rule survives the reduction exactly when
        // its constraint mask has that model's bit set
        let ground = program.ground_rules(&universe)?;
        let atoms = atom_table(program, &ground, &universe);
        let mut interned = Vec::with_capacity(ground.len());
        for rule in &ground {
            let mask = theory.constraint_mask(&rule.constraint.simplify())?;
            let head = atoms.id(&rule.head).expect("head atom interned");
            let body: Vec<(bool, AtomId)> = rule
                .body
                .iter()
                .map(|l| (l.positive, atoms.id(&l.atom).expect("body atom interned")))
                .collect();
            interned.push((GroundRule { head, body }, mask));
        }
        let mut per_model = Vec::with_capacity(models.len());
        for idx in 0..models.len() {
            let rules = interned
                .iter()
                .filter(|(_, mask)| mask.get(idx))
                .map(|(r, _)| r.clone())
                .collect();
            let reduced = GroundNormalProgram {
                atoms: atoms.clone(),
                rules,
            };
            per_model.push(reduced.well_founded_model());
        }
        Ok(DeclarativeOracle { atoms, per_model })
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn model_count(&self) -> usize {
        self.per_model.len()
    }

    pub fn well_founded(&self, model_idx: usize) -> &Interp {
        &self.per_model[model_idx]
    }

    fn intern(&self, literals: &[Literal]) -> Result<Vec<(bool, AtomId)>, WfError> {
        literals
            .iter()
            .map(|l| {
                if !l.is_ground() {
                    return Err(WfError::NonGround {
                        what: format!("query literal {l}"),
                    });
                }
                self.atoms
                    .id(&l.atom)
                    .map(|id| (l.positive, id))
                    .ok_or_else(|| WfError::UnknownAtom {
                        atom: l.atom.to_string(),
                    })
            })
            .collect()
    }

    /// Value of a ground literal conjunction in one well-founded model.
    pub fn truth_in(&self, model_idx: usize, literals: &[Literal]) -> Result<Truth3, WfError> {
        let lits = self.intern(literals)?;
        Ok(self.per_model[model_idx].literal_conjunction(&lits))
    }

    /// Classifies a ground literal conjunction across every theory model.
    pub fn classify_literals(&self, literals: &[Literal]) -> Result<Classification, WfError> {
        let lits = self.intern(literals)?;
        let first = self.per_model[0].literal_conjunction(&lits);
        for (i, interp) in self.per_model.iter().enumerate().skip(1) {
            let v = interp.literal_conjunction(&lits);
            if v != first {
                return Ok(Classification {
                    value: Truth4::ModelDependent,
                    disagreement: Some(((0, first), (i, v))),
                });
            }
        }
        let value = match first {
            Truth3::True => Truth4::True,
            Truth3::False => Truth4::False,
            Truth3::Undefined => Truth4::Undefined,
        };
        Ok(Classification {
            value,
            disagreement: None,
        })
    }

    pub fn classify_atom(&self, atom: &Atom) -> Result<Classification, WfError> {
        self.classify_literals(&[Literal::positive(atom.clone())])
    }
}

/// Classifies a ground literal conjunction for a Datalog hybrid program.
pub fn classify(
    program: &HybridProgram,
    theory: &FiniteGroundTheory,
    literals: &[Literal],
) -> Result<Classification, WfError> {
    DeclarativeOracle::new(program, theory)?.classify_literals(literals)
}

/// For a negation-free program, checks that a query true in the
/// well-founded semantics is a consequence of the rules plus the theory
/// over the enumerable model class: if the query classifies true then it
/// must be in the least model of the reduced program for every theory
/// model. A test harness, not a user feature.
pub fn fol_compatible(
    program: &HybridProgram,
    theory: &FiniteGroundTheory,
    atom: &Atom,
) -> Result<bool, WfError> {
    if program
        .rules
        .iter()
        .any(|r| r.body.iter().any(|l| !l.positive))
    {
        return Err(WfError::NegationPresent);
    }
    let oracle = DeclarativeOracle::new(program, theory)?;
    let classified_true =
        oracle.classify_atom(atom)?.value == Truth4::True;
    if !classified_true {
        return Ok(true);
    }
    // independent route: least model of each reduced (definite) program
    let universe = theory.constant_terms();
    for model in theory.models()? {
        let reduced = reduce(program, theory, model, &universe)?;
        let least = reduced
            .extended_by_negations(&vec![false; reduced.atoms.len()])
            .least_model();
        let id = reduced.atoms.id(atom).ok_or_else(|| WfError::UnknownAtom {
            atom: atom.to_string(),
        })?;
        if !least.pos[id] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests;
