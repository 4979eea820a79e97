//! Derivation trees. Nodes are goals; a node with no rule literal is a
//! successful leaf. Answers come from successful leaves of t-trees,
//! negative answers from cross-sections of tu-trees. Trees record how each
//! node was derived, including the subsidiary tree consulted when a
//! negative literal was selected.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::syntax::{Atom, Constraint, Goal};

use super::EngineError;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum TreeKind {
    T,
    Tu,
}

impl std::fmt::Display for TreeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TreeKind::T => "t",
            TreeKind::Tu => "tu",
        })
    }
}

pub type NodeId = usize;

/// How a node was obtained from its parent.
#[derive(Clone, Debug)]
pub enum Step {
    /// Resolution with a (renamed) program rule against the selected atom.
    Rule {
        rule_index: usize,
        renamed_head: Atom,
    },
    /// A selected negative literal, resolved using the (negative) answer of
    /// a subsidiary tree of strictly smaller rank. Rank-0 tu-steps carry no
    /// subsidiary and use the trivial `true` answer.
    Negation {
        atom: Atom,
        used: Constraint,
        subsidiary: Option<Arc<DerivationTree>>,
    },
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub goal: Goal,
    pub selected: Option<usize>,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub step: Option<Step>,
}

impl TreeNode {
    pub fn is_successful(&self) -> bool {
        self.goal.literals.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct DerivationTree {
    pub kind: TreeKind,
    pub rank: u32,
    /// False when the node budget stopped expansion; an incomplete tu-tree
    /// yields no negative answer.
    pub complete: bool,
    nodes: Vec<TreeNode>,
}

impl DerivationTree {
    pub fn new(kind: TreeKind, rank: u32, root: Goal) -> Self {
        DerivationTree {
            kind,
            rank,
            complete: true,
            nodes: vec![TreeNode {
                goal: root,
                selected: None,
                parent: None,
                children: Vec::new(),
                step: None,
            }],
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes.iter().enumerate()
    }

    pub(crate) fn set_selected(&mut self, id: NodeId, idx: usize) {
        self.nodes[id].selected = Some(idx);
    }

    pub(crate) fn add_child(&mut self, parent: NodeId, goal: Goal, step: Step) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            goal,
            selected: None,
            parent: Some(parent),
            children: Vec::new(),
            step: Some(step),
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn successful_leaves(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_successful())
            .map(|(i, _)| i)
            .collect()
    }

    /// The answer built from a subset of the successful leaves: the
    /// disjunction of their constraints restricted to the root's free
    /// variables. The empty subset gives `false`.
    pub fn answer(&self, leaves: &[NodeId]) -> Result<Constraint, EngineError> {
        let mut parts = Vec::with_capacity(leaves.len());
        for &id in leaves {
            let node = self
                .nodes
                .get(id)
                .ok_or(EngineError::NoSuchNode { node: id })?;
            if !node.is_successful() {
                return Err(EngineError::NotASuccessfulLeaf { node: id });
            }
            parts.push(node.goal.constraint.clone());
        }
        let root_vars = self.nodes[0].goal.free_vars();
        let answer = Constraint::or(parts)
            .restricted_to(&root_vars)
            .simplify();
        debug_assert!(answer.free_vars().is_subset(&root_vars));
        Ok(answer)
    }

    /// Checks that every successful branch passes through the given node
    /// set and returns the negative answer: the conjunction of the negated
    /// restrictions of the cross-section constraints. The empty
    /// cross-section of a tree without successful branches gives `true`.
    pub fn negative_answer(&self, cross_section: &[NodeId]) -> Result<Constraint, EngineError> {
        if self.kind != TreeKind::Tu {
            return Err(EngineError::WrongTreeKind {
                expected: TreeKind::Tu,
            });
        }
        if !self.complete {
            return Err(EngineError::IncompleteTree);
        }
        let section: BTreeSet<NodeId> = cross_section.iter().copied().collect();
        for &id in &section {
            if id >= self.nodes.len() {
                return Err(EngineError::NoSuchNode { node: id });
            }
        }
        for (leaf, node) in self.nodes.iter().enumerate() {
            if !node.is_successful() {
                continue;
            }
            let mut cur = Some(leaf);
            let mut covered = false;
            while let Some(id) = cur {
                if section.contains(&id) {
                    covered = true;
                    break;
                }
                cur = self.nodes[id].parent;
            }
            if !covered {
                return Err(EngineError::InvalidCrossSection {
                    missed: self.nodes[leaf].goal.to_string(),
                });
            }
        }
        let root_vars = self.nodes[0].goal.free_vars();
        let parts: Vec<Constraint> = section
            .iter()
            .map(|&id| {
                self.nodes[id]
                    .goal
                    .constraint
                    .restricted_to(&root_vars)
                    .negated()
            })
            .collect();
        let answer = Constraint::and(parts).simplify();
        debug_assert!(answer.free_vars().is_subset(&root_vars));
        Ok(answer)
    }

    /// Structural check used by the test suites: every subsidiary tree
    /// referenced by a negation step has strictly smaller rank, recursively.
    pub fn rank_discipline_ok(&self) -> bool {
        self.nodes.iter().all(|n| match &n.step {
            Some(Step::Negation {
                subsidiary: Some(sub),
                ..
            }) => sub.rank < self.rank && sub.rank_discipline_ok(),
            _ => true,
        })
    }

    /// Indented one-line-per-node rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}-tree (rank {}{}) for: {}",
            self.kind,
            self.rank,
            if self.complete { "" } else { ", incomplete" },
            self.nodes[0].goal
        );
        self.render_node(0, 0, &mut out);
        out
    }

    fn render_node(&self, id: NodeId, depth: usize, out: &mut String) {
        let node = &self.nodes[id];
        for _ in 0..depth {
            out.push_str("  ");
        }
        let _ = write!(out, "{}", node.goal);
        if node.is_successful() {
            out.push_str("   [success]");
        }
        out.push('\n');
        for &c in &node.children {
            self.render_node(c, depth + 1, out);
        }
    }

    /// GraphViz rendering: node labels are printed goals, edge labels name
    /// the applied rule head or the negative step with the answer it used.
    pub fn render_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph derivation {\n");
        out.push_str("  node [shape=box];\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "  n{} [label=\"{}\"];",
                id,
                escape(&node.goal.to_string())
            );
            if let (Some(parent), Some(step)) = (node.parent, node.step.as_ref()) {
                let label = match step {
                    Step::Rule { renamed_head, .. } => renamed_head.to_string(),
                    Step::Negation { atom, used, .. } => format!("neg {atom}: {used}"),
                };
                let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", parent, id, escape(&label));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
