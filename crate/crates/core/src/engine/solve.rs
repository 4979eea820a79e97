//! Construction of t-trees and tu-trees for arbitrary goals.
//!
//! A node with a positive literal selected gets one child per program rule
//! whose freshly renamed head can be equated with the literal under a
//! satisfiable constraint. A node with a negative literal `~A` selected
//! consults a subsidiary tree of strictly smaller rank built for the atom
//! `A` alone; the subsidiary's (negative) answer is lifted into the node's
//! constraint context, so a single tree per atom serves every context.
//! Subsidiary trees are memoized per renaming-canonical atom and rank.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::syntax::{Atom, Constraint, Goal, HybridProgram, HybridRule, Substitution, Term, Variable};
use crate::theory::{SatResult, Theory};

use super::tree::{DerivationTree, Step, TreeKind};
use super::EngineError;

/// Deterministic choice of the literal to select in a goal.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum SelectionRule {
    #[default]
    Leftmost,
    Rightmost,
    /// Leftmost positive literal while one exists, else leftmost.
    NegativeLast,
}

impl SelectionRule {
    pub fn select_by(&self, polarities: &[bool]) -> Option<usize> {
        if polarities.is_empty() {
            return None;
        }
        match self {
            SelectionRule::Leftmost => Some(0),
            SelectionRule::Rightmost => Some(polarities.len() - 1),
            SelectionRule::NegativeLast => {
                Some(polarities.iter().position(|p| *p).unwrap_or(0))
            }
        }
    }

    pub fn select(&self, goal: &Goal) -> Option<usize> {
        let polarities: Vec<bool> = goal.literals.iter().map(|l| l.positive).collect();
        self.select_by(&polarities)
    }
}

impl std::str::FromStr for SelectionRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "leftmost" => Ok(SelectionRule::Leftmost),
            "rightmost" => Ok(SelectionRule::Rightmost),
            "negative-last" => Ok(SelectionRule::NegativeLast),
            other => Err(format!("unknown selection rule `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EngineConfig {
    pub max_rank: u32,
    pub node_budget: usize,
    pub selection: SelectionRule,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_rank: 8,
            node_budget: 10_000,
            selection: SelectionRule::Leftmost,
        }
    }
}

/// One resolution step: the goal derived from `goal` by `rule` on the
/// selected positive literal, or `None` when the heads do not match or the
/// combined constraint is unsatisfiable. The rule must already be renamed
/// apart from the goal.
pub fn derive_step(
    goal: &Goal,
    selected: usize,
    rule: &HybridRule,
    theory: &dyn Theory,
) -> Result<Option<Goal>, EngineError> {
    let lit = &goal.literals[selected];
    if !lit.positive {
        return Err(EngineError::NegativeSelection);
    }
    if lit.atom.predicate != rule.head.predicate || lit.atom.args.len() != rule.head.args.len() {
        return Ok(None);
    }
    let mut parts: Vec<Constraint> = lit
        .atom
        .args
        .iter()
        .zip(&rule.head.args)
        .map(|(t, u)| Constraint::Eq(t.clone(), u.clone()))
        .collect();
    parts.push(goal.constraint.clone());
    parts.push(rule.constraint.clone());
    let constraint = Constraint::and(parts).simplify();
    if constraint == Constraint::False || theory.satisfiable(&constraint) == SatResult::Unsat {
        return Ok(None);
    }
    let mut literals = goal.literals[..selected].to_vec();
    literals.extend(rule.body.iter().cloned());
    literals.extend(goal.literals[selected + 1..].iter().cloned());
    Ok(Some(Goal {
        constraint,
        literals,
    }))
}

/// A negative answer for the atom `A` lifted to the context `C, A`: the
/// context constraint may simply be conjoined, since `not C or D` is a
/// negative answer for the conjunction whenever `D` is one for the atom.
pub fn lift_negative_answer(answer_for_atom: &Constraint, context: &Constraint) -> Constraint {
    Constraint::or(vec![
        context.clone().negated(),
        answer_for_atom.clone(),
    ])
    .simplify()
}

struct Subsidiary {
    tree: Arc<DerivationTree>,
    /// Positive answer over all successful leaves (t-trees).
    answer: Constraint,
    /// Negative answer over the all-successful-leaves cross-section
    /// (tu-trees); `None` when the tree is incomplete.
    negative: Option<Constraint>,
}

type MemoKey = (TreeKind, u32, String, Vec<Term>);

/// Builds derivation trees against a fixed program and theory. A solver
/// carries the fresh-variable counter and the subsidiary memo table, so
/// trees built by the same solver share subsidiary work across ranks.
pub struct Solver<'a> {
    program: &'a HybridProgram,
    theory: &'a dyn Theory,
    cfg: EngineConfig,
    fresh: u64,
    used_names: BTreeSet<String>,
    memo: HashMap<MemoKey, Arc<Subsidiary>>,
}

impl<'a> Solver<'a> {
    pub fn new(program: &'a HybridProgram, theory: &'a dyn Theory, cfg: EngineConfig) -> Self {
        Solver {
            program,
            theory,
            cfg,
            fresh: 0,
            used_names: BTreeSet::new(),
            memo: HashMap::new(),
        }
    }

    fn note_names(&mut self, goal: &Goal) {
        for v in goal.free_vars() {
            self.used_names.insert(v.name().to_string());
        }
    }

    fn rename_apart(&mut self, rule: &HybridRule) -> HybridRule {
        let vars = rule.free_vars();
        'retry: loop {
            self.fresh += 1;
            let mut subst = Substitution::new();
            for v in &vars {
                let candidate = format!("{}_{}", v.name(), self.fresh);
                if self.used_names.contains(&candidate) {
                    continue 'retry;
                }
                subst.bind(v.clone(), Term::var(candidate));
            }
            for (_, t) in subst.iter() {
                if let Term::Var(v) = t {
                    self.used_names.insert(v.name().to_string());
                }
            }
            return rule.apply(&subst);
        }
    }

    /// Builds a t-tree or tu-tree of the given rank for a goal.
    pub fn build(
        &mut self,
        kind: TreeKind,
        goal: &Goal,
        rank: u32,
    ) -> Result<Arc<DerivationTree>, EngineError> {
        self.note_names(goal);
        let mut tree = DerivationTree::new(kind, rank, goal.clone());
        let mut stack = vec![tree.root()];
        let mut nodes_made = 1usize;
        'expand: while let Some(id) = stack.pop() {
            let goal = tree.node(id).goal.clone();
            let Some(sel) = self.cfg.selection.select(&goal) else {
                continue; // successful leaf
            };
            tree.set_selected(id, sel);
            let lit = goal.literals[sel].clone();
            if lit.positive {
                let mut children = Vec::new();
                for (rule_index, rule) in self.program.rules.iter().enumerate() {
                    let renamed = self.rename_apart(rule);
                    if let Some(derived) = derive_step(&goal, sel, &renamed, self.theory)? {
                        children.push((
                            derived,
                            Step::Rule {
                                rule_index,
                                renamed_head: renamed.head,
                            },
                        ));
                    }
                }
                let mut ids = Vec::with_capacity(children.len());
                for (child, step) in children {
                    if nodes_made >= self.cfg.node_budget {
                        tree.complete = false;
                        break 'expand;
                    }
                    ids.push(tree.add_child(id, child, step));
                    nodes_made += 1;
                }
                // leftmost child expands first
                stack.extend(ids.into_iter().rev());
            } else {
                let step = self.negative_step(kind, rank, &goal, &lit.atom)?;
                match step {
                    None => {} // the node stays a leaf
                    Some((constraint, step)) => {
                        if nodes_made >= self.cfg.node_budget {
                            tree.complete = false;
                            break 'expand;
                        }
                        let mut literals = goal.literals.clone();
                        literals.remove(sel);
                        let child = Goal {
                            constraint,
                            literals,
                        };
                        stack.push(tree.add_child(id, child, step));
                        nodes_made += 1;
                    }
                }
            }
        }
        // a tree is only as complete as the subsidiary answers it consumed;
        // incompleteness of a subsidiary is already reflected in the step
        // taken, so nothing more to do here
        Ok(Arc::new(tree))
    }

    /// Resolves a selected negative literal per the tree kind and rank.
    /// Returns the child's constraint and step, or `None` when the node
    /// must remain a leaf.
    fn negative_step(
        &mut self,
        kind: TreeKind,
        rank: u32,
        goal: &Goal,
        atom: &Atom,
    ) -> Result<Option<(Constraint, Step)>, EngineError> {
        match (kind, rank) {
            (TreeKind::T, 0) => Ok(None),
            (TreeKind::Tu, 0) => Ok(Some((
                goal.constraint.clone(),
                Step::Negation {
                    atom: atom.clone(),
                    used: Constraint::True,
                    subsidiary: None,
                },
            ))),
            (TreeKind::T, k) => {
                let sub = self.subsidiary(TreeKind::Tu, atom, k - 1)?;
                let Some(negative) = sub.1.clone() else {
                    return Ok(None); // no negative answer from an incomplete tu-tree
                };
                let constraint =
                    Constraint::and(vec![goal.constraint.clone(), negative.clone()]).simplify();
                if self.theory.satisfiable(&constraint) == SatResult::Unsat {
                    return Ok(None);
                }
                Ok(Some((
                    constraint,
                    Step::Negation {
                        atom: atom.clone(),
                        used: negative,
                        subsidiary: Some(sub.0),
                    },
                )))
            }
            (TreeKind::Tu, k) => {
                let sub = self.subsidiary(TreeKind::T, atom, k - 1)?;
                let negated_answer = sub.1.clone().expect("t-subsidiaries always carry an answer");
                let constraint =
                    Constraint::and(vec![goal.constraint.clone(), negated_answer.clone()])
                        .simplify();
                if self.theory.satisfiable(&constraint) == SatResult::Unsat {
                    // some answer of the subsidiary refutes this node outright
                    return Ok(None);
                }
                Ok(Some((
                    constraint,
                    Step::Negation {
                        atom: atom.clone(),
                        used: negated_answer,
                        subsidiary: Some(sub.0),
                    },
                )))
            }
        }
    }

    /// The memoized subsidiary tree for an atom, with the answer constraint
    /// this node needs: the negative answer for tu-subsidiaries, the negated
    /// positive answer for t-subsidiaries, both instantiated to the atom's
    /// actual arguments.
    fn subsidiary(
        &mut self,
        kind: TreeKind,
        atom: &Atom,
        rank: u32,
    ) -> Result<(Arc<DerivationTree>, Option<Constraint>), EngineError> {
        let (canonical, back) = canonicalize(atom);
        let key = (
            kind,
            rank,
            canonical.predicate.clone(),
            canonical.args.clone(),
        );
        let sub = match self.memo.get(&key) {
            Some(s) => s.clone(),
            None => {
                for v in canonical.vars() {
                    self.used_names.insert(v.name().to_string());
                }
                let goal = Goal::atom(canonical.clone());
                let tree = self.build(kind, &goal, rank)?;
                let leaves = tree.successful_leaves();
                let answer = tree.answer(&leaves)?;
                let negative = if kind == TreeKind::Tu && tree.complete {
                    Some(tree.negative_answer(&leaves)?)
                } else {
                    None
                };
                let sub = Arc::new(Subsidiary {
                    tree,
                    answer,
                    negative,
                });
                self.memo.insert(key, sub.clone());
                sub
            }
        };
        let instantiated = match kind {
            TreeKind::Tu => sub.negative.as_ref().map(|c| c.apply(&back).simplify()),
            TreeKind::T => Some(sub.answer.clone().negated().apply(&back).simplify()),
        };
        Ok((sub.tree.clone(), instantiated))
    }
}

/// Renames the atom's variables to canonical placeholders, in order of
/// first occurrence, and returns the substitution mapping them back.
fn canonicalize(atom: &Atom) -> (Atom, Substitution) {
    let mut forward = Substitution::new();
    let mut back = Substitution::new();
    let mut next = 0usize;
    fn walk(
        t: &Term,
        forward: &mut Substitution,
        back: &mut Substitution,
        next: &mut usize,
    ) -> Term {
        match t {
            Term::Var(v) => {
                if let Some(mapped) = forward.get(v) {
                    mapped.clone()
                } else {
                    let canon = Variable::new(format!("_A{next}"));
                    *next += 1;
                    forward.bind(v.clone(), Term::Var(canon.clone()));
                    back.bind(canon.clone(), Term::Var(v.clone()));
                    Term::Var(canon)
                }
            }
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter()
                    .map(|a| walk(a, forward, back, next))
                    .collect(),
            ),
        }
    }
    let args = atom
        .args
        .iter()
        .map(|a| walk(a, &mut forward, &mut back, &mut next))
        .collect();
    (Atom::new(atom.predicate.clone(), args), back)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckStatus {
    /// The theory entails every instance of the answer constraint.
    Entailed,
    /// Satisfiable but not entailed: instances hold under the constraint.
    Conditional,
    /// The theory could not check the answer; it is sound but unverified.
    Unchecked,
}

impl std::fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CheckStatus::Entailed => "entailed",
            CheckStatus::Conditional => "conditional",
            CheckStatus::Unchecked => "conditional, not theory-checked",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Answer {
    pub positive: bool,
    pub constraint: Constraint,
    pub goal: Goal,
    pub status: CheckStatus,
}

#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub answers: Vec<Answer>,
    pub tree: Arc<DerivationTree>,
    pub negative_tree: Option<Arc<DerivationTree>>,
    pub rank: u32,
    pub complete: bool,
}

/// Answers a goal with a t-tree of rank `max_rank` (and a tu-tree when
/// `with_negative` is set); deeper subsidiary trees are built recursively
/// down to rank 0. Answers grow with the rank, so the reported answer is
/// the strongest one within the rank budget. Every reported answer is
/// satisfiable; its status records whether the theory entails it outright.
pub fn query(
    program: &HybridProgram,
    theory: &dyn Theory,
    goal: &Goal,
    cfg: EngineConfig,
    with_negative: bool,
) -> Result<QueryOutcome, EngineError> {
    let mut solver = Solver::new(program, theory, cfg);
    let rank = cfg.max_rank;
    let tree = solver.build(TreeKind::T, goal, rank)?;
    let answer = tree.answer(&tree.successful_leaves())?;
    let (negative_tree, negative) = if with_negative {
        let tu = solver.build(TreeKind::Tu, goal, rank)?;
        let na = if tu.complete {
            Some(tu.negative_answer(&tu.successful_leaves())?)
        } else {
            None
        };
        (Some(tu), na)
    } else {
        (None, None)
    };

    let mut answers = Vec::new();
    let mut push = |positive: bool, constraint: Constraint| {
        if constraint == Constraint::False
            || theory.satisfiable(&constraint) == SatResult::Unsat
        {
            return;
        }
        let status = match theory.satisfiable(&constraint.clone().negated()) {
            SatResult::Unsat => CheckStatus::Entailed,
            SatResult::Sat => CheckStatus::Conditional,
            SatResult::Unknown => CheckStatus::Unchecked,
        };
        answers.push(Answer {
            positive,
            constraint,
            goal: goal.clone(),
            status,
        });
    };
    push(true, answer);
    if let Some(na) = negative {
        push(false, na);
    }
    let complete = tree.complete
        && negative_tree
            .as_ref()
            .map(|t| t.complete)
            .unwrap_or(true);
    Ok(QueryOutcome {
        answers,
        tree,
        negative_tree,
        rank,
        complete,
    })
}
