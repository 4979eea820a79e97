//! The ground decision procedure for Datalog programs. Works on the ground
//! instantiation of the program: node constraints are then closed, so each
//! one is represented exactly by the set of theory models satisfying it.
//! Maximal trees are built per atom rank by rank, folding any node whose
//! literal set, selected literal and constraint semantics already occurred;
//! the finite answers stabilize after finitely many ranks, at which point a
//! ground atom is true exactly when the theory entails its finite answer
//! and false exactly when the theory refutes its finite pseudo-answer.

use std::collections::HashMap;
use std::sync::Arc;

use crate::syntax::{Atom, Constraint, Goal, HybridProgram, Literal};
use crate::theory::{FiniteGroundTheory, ModelMask, Theory};
use crate::wf::{AtomId, AtomTable};

use super::safety::check_program;
use super::solve::SelectionRule;
use super::tree::{DerivationTree, Step, TreeKind};
use super::EngineError;

const NODE_CAP: usize = 200_000;

struct GroundHybridRule {
    body: Vec<(bool, AtomId)>,
    mask: ModelMask,
    syn: Constraint,
    head_atom: Atom,
}

struct GroundContext {
    n_models: usize,
    atoms: Arc<AtomTable>,
    rules: Vec<GroundHybridRule>,
    rules_by_head: Vec<Vec<usize>>,
    selection: SelectionRule,
}

impl GroundContext {
    fn new(
        program: &HybridProgram,
        theory: &FiniteGroundTheory,
        selection: SelectionRule,
    ) -> Result<Self, EngineError> {
        if let Some((symbol, _)) = program.signature.functions.iter().next() {
            return Err(EngineError::NonDatalog {
                symbol: symbol.clone(),
            });
        }
        let universe = theory.constant_terms();
        let ground = program.ground_rules(&universe)?;
        let atoms = Arc::new(AtomTable::from_sorted(program.herbrand_base(&universe)));
        let n_models = theory.models()?.len();
        let mut mask_cache: HashMap<Constraint, ModelMask> = HashMap::new();
        let mut rules = Vec::with_capacity(ground.len());
        let mut rules_by_head = vec![Vec::new(); atoms.len()];
        for rule in ground {
            let syn = rule.constraint.simplify();
            let mask = match mask_cache.get(&syn) {
                Some(m) => m.clone(),
                None => {
                    let m = theory.constraint_mask(&syn)?;
                    mask_cache.insert(syn.clone(), m.clone());
                    m
                }
            };
            let head = atoms.id(&rule.head).expect("ground head in base");
            let body = rule
                .body
                .iter()
                .map(|l| (l.positive, atoms.id(&l.atom).expect("ground body atom in base")))
                .collect();
            rules_by_head[head].push(rules.len());
            rules.push(GroundHybridRule {
                body,
                mask,
                syn,
                head_atom: rule.head,
            });
        }
        Ok(GroundContext {
            n_models,
            atoms,
            rules,
            rules_by_head,
            selection,
        })
    }

    fn literal(&self, (positive, id): (bool, AtomId)) -> Literal {
        let atom = self.atoms.atom(id).clone();
        if positive {
            Literal::positive(atom)
        } else {
            Literal::negative(atom)
        }
    }

    fn goal_of(&self, syn: &Constraint, literals: &[(bool, AtomId)]) -> Goal {
        Goal {
            constraint: syn.clone(),
            literals: literals.iter().map(|l| self.literal(*l)).collect(),
        }
    }
}

/// A finite answer (t) or finite pseudo-answer (tu): the set of models in
/// which some successful leaf holds, with a matching printable constraint.
#[derive(Clone, PartialEq, Eq, Debug)]
struct AnswerEntry {
    mask: ModelMask,
    syn: Constraint,
}

struct RankTable {
    t: Vec<AnswerEntry>,
    tu: Vec<AnswerEntry>,
}

impl RankTable {
    fn same_masks(&self, other: &RankTable) -> bool {
        self.t
            .iter()
            .zip(&other.t)
            .all(|(a, b)| a.mask == b.mask)
            && self
                .tu
                .iter()
                .zip(&other.tu)
                .all(|(a, b)| a.mask == b.mask)
    }
}

struct WorkNode {
    mask: ModelMask,
    syn: Constraint,
    literals: Vec<(bool, AtomId)>,
    tree_node: Option<super::tree::NodeId>,
}

type FoldKey = (Vec<(bool, AtomId)>, Option<(bool, AtomId)>, ModelMask);

/// Builds the maximal tree of the given rank for one ground atom, using the
/// previous rank's answers for the negative steps, and returns its finite
/// (pseudo-)answer. Optionally materializes the tree with full negation
/// evidence for export.
fn build_entry(
    ctx: &GroundContext,
    kind: TreeKind,
    atom: AtomId,
    rank: u32,
    prev: Option<&RankTable>,
    trees: Option<&mut TreeBuilder<'_>>,
) -> Result<(AnswerEntry, Option<Arc<DerivationTree>>), EngineError> {
    let mut tree_builder = trees;
    let root_literals = vec![(true, atom)];
    let mut tree = tree_builder.as_ref().map(|_| {
        DerivationTree::new(kind, rank, ctx.goal_of(&Constraint::True, &root_literals))
    });
    let mut answer_mask = ModelMask::empty(ctx.n_models);
    let mut answer_syns: Vec<Constraint> = Vec::new();
    let mut folded: std::collections::HashSet<FoldKey> = Default::default();
    let root = WorkNode {
        mask: ModelMask::full(ctx.n_models),
        syn: Constraint::True,
        literals: root_literals,
        tree_node: tree.as_ref().map(|t| t.root()),
    };
    let mut stack = vec![root];
    let mut made = 1usize;
    while let Some(node) = stack.pop() {
        let polarities: Vec<bool> = node.literals.iter().map(|(p, _)| *p).collect();
        let Some(sel) = ctx.selection.select_by(&polarities) else {
            // successful leaf
            answer_mask.or_with(&node.mask);
            if !answer_syns.contains(&node.syn) {
                answer_syns.push(node.syn.clone());
            }
            continue;
        };
        if let (Some(t), Some(id)) = (tree.as_mut(), node.tree_node) {
            t.set_selected(id, sel);
        }
        let selected = node.literals[sel];
        let fold_key = {
            let mut lits = node.literals.clone();
            lits.sort_unstable();
            lits.dedup();
            (lits, Some(selected), node.mask.clone())
        };
        if !folded.insert(fold_key) {
            continue; // an equivalent node with the same selection exists
        }
        let (positive, sel_atom) = selected;
        let mut children: Vec<(ModelMask, Constraint, Vec<(bool, AtomId)>, StepPlan)> = Vec::new();
        if positive {
            // resolve against every ground rule with this head
            for &ri in &ctx.rules_by_head[sel_atom] {
                let rule = &ctx.rules[ri];
                let mut mask = node.mask.clone();
                mask.and_with(&rule.mask);
                if mask.is_empty() {
                    continue;
                }
                let syn = Constraint::and(vec![node.syn.clone(), rule.syn.clone()]).simplify();
                let mut literals = node.literals[..sel].to_vec();
                literals.extend(rule.body.iter().copied());
                literals.extend(node.literals[sel + 1..].iter().copied());
                children.push((mask, syn, literals, StepPlan::Rule(ri)));
            }
        } else {
            let mut literals = node.literals.clone();
            literals.remove(sel);
            match (kind, rank) {
                (TreeKind::T, 0) => {} // the node stays a leaf
                (TreeKind::Tu, 0) => {
                    children.push((
                        node.mask.clone(),
                        node.syn.clone(),
                        literals,
                        StepPlan::NegationTrivial(sel_atom),
                    ));
                }
                (kind, k) => {
                    let table = prev.expect("rank > 0 has a previous table");
                    let (sub_kind, entry) = match kind {
                        TreeKind::T => (TreeKind::Tu, &table.tu[sel_atom]),
                        TreeKind::Tu => (TreeKind::T, &table.t[sel_atom]),
                    };
                    let mut mask = node.mask.clone();
                    mask.and_with(&entry.mask.negated());
                    if !mask.is_empty() {
                        let used = entry.syn.clone().negated().simplify();
                        let syn =
                            Constraint::and(vec![node.syn.clone(), used.clone()]).simplify();
                        children.push((
                            mask,
                            syn,
                            literals,
                            StepPlan::Negation(sel_atom, sub_kind, k - 1, used),
                        ));
                    }
                }
            }
        }
        for (mask, syn, literals, plan) in children {
            made += 1;
            if made > NODE_CAP {
                return Err(EngineError::Budget { nodes: NODE_CAP });
            }
            let tree_node = match (node.tree_node, tree.as_mut()) {
                (Some(parent), Some(t)) => {
                    let step = match &plan {
                        StepPlan::Rule(ri) => Step::Rule {
                            rule_index: *ri,
                            renamed_head: ctx.rules[*ri].head_atom.clone(),
                        },
                        StepPlan::NegationTrivial(a) => Step::Negation {
                            atom: ctx.atoms.atom(*a).clone(),
                            used: Constraint::True,
                            subsidiary: None,
                        },
                        StepPlan::Negation(a, sub_kind, sub_rank, used) => {
                            let subsidiary = match tree_builder.as_deref_mut() {
                                Some(tb) => Some(tb.subsidiary(*sub_kind, *a, *sub_rank)?),
                                None => None,
                            };
                            Step::Negation {
                                atom: ctx.atoms.atom(*a).clone(),
                                used: used.clone(),
                                subsidiary,
                            }
                        }
                    };
                    let goal = ctx.goal_of(&syn, &literals);
                    Some(t.add_child(parent, goal, step))
                }
                _ => None,
            };
            stack.push(WorkNode {
                mask,
                syn,
                literals,
                tree_node,
            });
        }
    }
    let entry = AnswerEntry {
        mask: answer_mask,
        syn: Constraint::or(answer_syns).simplify(),
    };
    Ok((entry, tree.map(Arc::new)))
}

enum StepPlan {
    Rule(usize),
    NegationTrivial(AtomId),
    Negation(AtomId, TreeKind, u32, Constraint),
}

/// Rebuilds maximal trees with negation evidence, memoized per atom, kind
/// and rank.
struct TreeBuilder<'a> {
    ctx: &'a GroundContext,
    tables: &'a [RankTable],
    memo: HashMap<(TreeKind, AtomId, u32), Arc<DerivationTree>>,
}

impl<'a> TreeBuilder<'a> {
    fn subsidiary(
        &mut self,
        kind: TreeKind,
        atom: AtomId,
        rank: u32,
    ) -> Result<Arc<DerivationTree>, EngineError> {
        if let Some(t) = self.memo.get(&(kind, atom, rank)) {
            return Ok(t.clone());
        }
        // copy the shared borrows out of self before reborrowing it mutably
        let ctx = self.ctx;
        let tables = self.tables;
        let prev = rank.checked_sub(1).map(|r| &tables[r as usize]);
        let (_, tree) = build_entry(ctx, kind, atom, rank, prev, Some(self))?;
        let tree = tree.expect("tree requested");
        self.memo.insert((kind, atom, rank), tree.clone());
        Ok(tree)
    }
}

fn build_table(ctx: &GroundContext, prev: Option<&RankTable>, rank: u32) -> Result<RankTable, EngineError> {
    let n = ctx.atoms.len();
    let mut t = Vec::with_capacity(n);
    let mut tu = Vec::with_capacity(n);
    for atom in 0..n {
        t.push(build_entry(ctx, TreeKind::T, atom, rank, prev, None)?.0);
        tu.push(build_entry(ctx, TreeKind::Tu, atom, rank, prev, None)?.0);
    }
    Ok(RankTable { t, tu })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DecisionOutcome {
    True,
    False,
    Neither,
}

impl std::fmt::Display for DecisionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecisionOutcome::True => "true",
            DecisionOutcome::False => "false",
            DecisionOutcome::Neither => "neither",
        })
    }
}

/// Outcome of the ground decision procedure, with certificates: the theory
/// entails `true_certificate` exactly when the atom holds, and entails
/// `false_certificate` exactly when it is false. For a `Neither` outcome
/// the certificates describe the theory models on each side.
#[derive(Clone, Debug)]
pub struct Decision {
    pub atom: Atom,
    pub outcome: DecisionOutcome,
    pub true_certificate: Constraint,
    pub false_certificate: Constraint,
    pub rank: u32,
    pub t_tree: Arc<DerivationTree>,
    pub tu_tree: Arc<DerivationTree>,
}

/// Decides whether a ground atom holds, fails, or depends on the theory
/// model, for a Datalog program over a theory with decidable closed
/// entailment.
pub fn decide(
    program: &HybridProgram,
    theory: &FiniteGroundTheory,
    atom: &Atom,
    selection: SelectionRule,
) -> Result<Decision, EngineError> {
    if !atom.is_ground() {
        return Err(EngineError::NonGroundAtom {
            atom: atom.to_string(),
        });
    }
    let ctx = GroundContext::new(program, theory, selection)?;
    let id = ctx.atoms.id(atom).ok_or_else(|| EngineError::UnknownAtom {
        atom: atom.to_string(),
    })?;
    let cap = 2 * ctx.atoms.len() as u32 + 8;
    let mut tables: Vec<RankTable> = Vec::new();
    let mut final_rank = None;
    for rank in 0..=cap {
        let table = build_table(&ctx, tables.last(), rank)?;
        let stable = tables.last().map(|p| p.same_masks(&table)).unwrap_or(false);
        tables.push(table);
        if stable {
            final_rank = Some(rank);
            break;
        }
    }
    let Some(rank) = final_rank else {
        return Err(EngineError::RankLimit { rank: cap });
    };
    let table = tables.last().expect("at least one table");
    let t_entry = &table.t[id];
    let tu_entry = &table.tu[id];
    let outcome = if t_entry.mask.is_full() {
        DecisionOutcome::True
    } else if tu_entry.mask.is_empty() {
        DecisionOutcome::False
    } else {
        DecisionOutcome::Neither
    };
    debug_assert!(
        !(t_entry.mask.is_full() && tu_entry.mask.is_empty()) || ctx.n_models == 0,
        "an atom cannot be certified both true and false"
    );
    let mut builder = TreeBuilder {
        ctx: &ctx,
        tables: &tables,
        memo: HashMap::new(),
    };
    let t_tree = builder.subsidiary(TreeKind::T, id, rank)?;
    let tu_tree = builder.subsidiary(TreeKind::Tu, id, rank)?;
    Ok(Decision {
        atom: atom.clone(),
        outcome,
        true_certificate: t_entry.syn.clone(),
        false_certificate: tu_entry.syn.clone().negated().simplify(),
        rank,
        t_tree,
        tu_tree,
    })
}

/// Builds the maximal t- or tu-tree of a given rank for a ground atom of a
/// safe Datalog program, returning the tree and its finite
/// (pseudo-)answer.
pub fn maximal_tree(
    program: &HybridProgram,
    theory: &FiniteGroundTheory,
    kind: TreeKind,
    atom: &Atom,
    rank: u32,
    selection: SelectionRule,
) -> Result<(Arc<DerivationTree>, Constraint), EngineError> {
    let report = check_program(program);
    if let Some((i, variable)) = report.violations.first() {
        return Err(EngineError::Unsafe {
            place: format!("rule {}", i + 1),
            variable: variable.clone(),
        });
    }
    if !atom.is_ground() {
        return Err(EngineError::NonGroundAtom {
            atom: atom.to_string(),
        });
    }
    let ctx = GroundContext::new(program, theory, selection)?;
    let id = ctx.atoms.id(atom).ok_or_else(|| EngineError::UnknownAtom {
        atom: atom.to_string(),
    })?;
    let mut tables: Vec<RankTable> = Vec::new();
    for r in 0..rank {
        let table = build_table(&ctx, tables.last(), r)?;
        tables.push(table);
    }
    let mut builder = TreeBuilder {
        ctx: &ctx,
        tables: &tables,
        memo: HashMap::new(),
    };
    let tree = builder.subsidiary(kind, id, rank)?;
    let prev = rank.checked_sub(1).map(|r| &tables[r as usize]);
    let (entry, _) = build_entry(&ctx, kind, id, rank, prev, None)?;
    Ok((tree, entry.syn))
}
