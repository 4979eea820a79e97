use std::collections::BTreeSet;

use super::*;
use crate::syntax::{parse_goal, parse_program, parse_theory, Atom, Constraint, Goal, Term};
use crate::theory::{FiniteGroundTheory, Theory};
use crate::wf::DeclarativeOracle;

const HYBRID_GAME: &str = "\
#rulepreds w/1 m/2.
#constraintpreds fi/1 e_cls/1.
#constants a b c d e f.
w(X) :- m(X,Y), ~w(Y).
m(b,a). m(a,b). m(a,c). m(c,d). m(d,e).
m(c,f) :- { not fi(f) }.
m(e,f) :- { e_cls(f) }.
";

const GEO: &str = "\
#constraintpreds fi/1 e_cls/1.
fi(X) -> e_cls(X).
fi(b).
e_cls(c).
";

fn setup() -> (crate::syntax::HybridProgram, FiniteGroundTheory) {
    let program = parse_program(HYBRID_GAME).unwrap();
    let theory = FiniteGroundTheory::bind(parse_theory(GEO).unwrap(), &program).unwrap();
    (program, theory)
}

fn w(x: &str) -> Atom {
    Atom::new("w", vec![Term::constant(x)])
}

fn target_answer() -> Constraint {
    // not fi(f) or e_cls(f)
    Constraint::or(vec![
        Constraint::atom("fi", vec![Term::constant("f")]).negated(),
        Constraint::atom("e_cls", vec![Term::constant("f")]),
    ])
}

#[test]
fn derive_step_on_game_rule() {
    let (program, theory) = setup();
    let goal = Goal::atom(w("c"));
    let rule = &program.rules[0]; // w(X) :- m(X,Y), ~w(Y).
    let derived = derive_step(&goal, 0, rule, &theory).unwrap().unwrap();
    assert_eq!(derived.literals.len(), 2);
    assert_eq!(derived.literals[0].atom.predicate, "m");
    assert!(!derived.literals[1].positive);
    // the equality c = X survives in the child constraint
    assert!(matches!(derived.constraint, Constraint::Eq(_, _)));
}

#[test]
fn derive_step_head_mismatch_is_none() {
    let (program, theory) = setup();
    let goal = Goal::atom(Atom::new("m", vec![Term::constant("a"), Term::constant("b")]));
    let rule = &program.rules[0]; // head predicate w
    assert!(derive_step(&goal, 0, rule, &theory).unwrap().is_none());
}

#[test]
fn derive_step_unsatisfiable_equalities_prune() {
    let (program, theory) = setup();
    let goal = Goal::atom(Atom::new("m", vec![Term::constant("f"), Term::constant("a")]));
    // m(b,a) cannot be equated with m(f,a)
    let fact = &program.rules[1];
    assert!(derive_step(&goal, 0, fact, &theory).unwrap().is_none());
}

#[test]
fn derive_step_rejects_negative_selection() {
    let (program, theory) = setup();
    let goal = parse_goal("~w(f)", &program.signature).unwrap();
    assert!(matches!(
        derive_step(&goal, 0, &program.rules[0], &theory),
        Err(EngineError::NegativeSelection)
    ));
}

#[test]
fn t_tree_for_winning_position_has_paper_shape() {
    let (program, theory) = setup();
    let goal = Goal::atom(w("c"));
    let mut solver = Solver::new(&program, &theory, EngineConfig::default());
    let tree = solver.build(TreeKind::T, &goal, 3).unwrap();
    // root; resolvent; two children (moves to f and to d); two leaves
    assert_eq!(tree.len(), 6);
    assert_eq!(tree.successful_leaves().len(), 2);
    assert!(tree.complete);
    assert!(tree.rank_discipline_ok());
    let answer = tree.answer(&tree.successful_leaves()).unwrap();
    assert!(answer.is_closed());
    assert!(theory.equivalent(&answer, &target_answer()).unwrap());
    assert!(theory.entails(&answer).unwrap());
    // the 6-node indented trace
    let text = tree.render_text();
    assert_eq!(text.lines().count(), 1 + 6);
}

#[test]
fn t_tree_rank_zero_keeps_negative_nodes_as_leaves() {
    let (program, theory) = setup();
    let goal = Goal::atom(w("c"));
    let mut solver = Solver::new(&program, &theory, EngineConfig::default());
    let tree = solver.build(TreeKind::T, &goal, 0).unwrap();
    assert!(tree.successful_leaves().is_empty());
    // nodes with a negative literal selected have no children
    for (_, node) in tree.nodes() {
        if let Some(sel) = node.selected {
            if !node.goal.literals[sel].positive {
                assert!(node.children.is_empty());
            }
        }
    }
}

#[test]
fn tu_tree_for_losing_position_gives_negative_answer_true() {
    let (program, theory) = setup();
    // goal { Y = f } w(Y), as in the worked example
    let goal = parse_goal("{ Y = f } w(Y)", &program.signature).unwrap();
    let mut solver = Solver::new(&program, &theory, EngineConfig::default());
    let tree = solver.build(TreeKind::Tu, &goal, 0).unwrap();
    // single branch: the root and one derived goal, nothing successful
    assert_eq!(tree.len(), 2);
    assert!(tree.successful_leaves().is_empty());
    let na = tree.negative_answer(&[]).unwrap();
    assert_eq!(na, Constraint::True);
}

#[test]
fn cross_section_validation() {
    let (program, theory) = setup();
    let goal = Goal::atom(w("d"));
    let mut solver = Solver::new(&program, &theory, EngineConfig::default());
    // a rank-0 tu-tree for w(d) optimistically succeeds through ~w(e)
    let tree = solver.build(TreeKind::Tu, &goal, 0).unwrap();
    assert!(!tree.successful_leaves().is_empty());
    // the root singleton is always a valid cross-section
    let via_root = tree.negative_answer(&[tree.root()]).unwrap();
    // the root constraint is true, so the negative answer is false
    assert_eq!(via_root, Constraint::False);
    // an empty cross-section misses the successful branches
    assert!(matches!(
        tree.negative_answer(&[]),
        Err(EngineError::InvalidCrossSection { .. })
    ));
}

#[test]
fn lift_negative_answer_cases() {
    let d = Constraint::atom("e_cls", vec![Term::constant("f")]);
    let c = Constraint::atom("fi", vec![Term::constant("b")]);
    let lifted = lift_negative_answer(&d, &c);
    assert_eq!(
        lifted,
        Constraint::or(vec![c.clone().negated(), d.clone()])
    );
    assert_eq!(lift_negative_answer(&d, &Constraint::True), d);
    assert_eq!(
        lift_negative_answer(&Constraint::True, &c),
        Constraint::True
    );
}

#[test]
fn query_winning_position() {
    let (program, theory) = setup();
    let goal = Goal::atom(w("c"));
    let outcome = query(&program, &theory, &goal, EngineConfig::default(), false).unwrap();
    assert!(outcome.complete);
    assert_eq!(outcome.answers.len(), 1);
    let answer = &outcome.answers[0];
    assert!(answer.positive);
    assert_eq!(answer.status, CheckStatus::Entailed);
    assert!(theory.equivalent(&answer.constraint, &target_answer()).unwrap());
}

#[test]
fn query_losing_position_negative_answer() {
    let (program, theory) = setup();
    let goal = Goal::atom(w("f"));
    let outcome = query(&program, &theory, &goal, EngineConfig::default(), true).unwrap();
    // no positive answer; the negative answer is `true`, entailed
    let negatives: Vec<_> = outcome.answers.iter().filter(|a| !a.positive).collect();
    assert_eq!(negatives.len(), 1);
    assert_eq!(negatives[0].constraint, Constraint::True);
    assert_eq!(negatives[0].status, CheckStatus::Entailed);
    assert!(outcome.answers.iter().all(|a| !a.positive));
}

#[test]
fn query_goal_with_negative_literal() {
    let (program, theory) = setup();
    let goal = parse_goal("~w(f)", &program.signature).unwrap();
    let outcome = query(&program, &theory, &goal, EngineConfig::default(), false).unwrap();
    let positives: Vec<_> = outcome.answers.iter().filter(|a| a.positive).collect();
    assert_eq!(positives.len(), 1);
    assert_eq!(positives[0].status, CheckStatus::Entailed);
}

#[test]
fn query_empty_program_has_no_answers() {
    let program = parse_program("#rulepreds p/0.\n#constants a.\n").unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    let goal = Goal::atom(Atom::new("p", vec![]));
    let outcome = query(&program, &theory, &goal, EngineConfig::default(), false).unwrap();
    assert!(outcome.answers.is_empty());
}

#[test]
fn query_trees_keep_rank_discipline() {
    let (program, theory) = setup();
    for name in ["c", "d", "f"] {
        let goal = Goal::atom(w(name));
        let outcome = query(&program, &theory, &goal, EngineConfig::default(), true).unwrap();
        assert!(outcome.tree.rank_discipline_ok());
        assert!(outcome.negative_tree.unwrap().rank_discipline_ok());
    }
}

#[test]
fn budget_exhaustion_marks_tree_incomplete() {
    // p <- p loops; the budget cuts the tree and no negative answer exists
    let text = "#rulepreds p/0.\n#constants a.\np :- p.\n";
    let program = parse_program(text).unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    let goal = Goal::atom(Atom::new("p", vec![]));
    let cfg = EngineConfig {
        node_budget: 16,
        ..Default::default()
    };
    let mut solver = Solver::new(&program, &theory, cfg);
    let tree = solver.build(TreeKind::Tu, &goal, 0).unwrap();
    assert!(!tree.complete);
    assert!(matches!(
        tree.negative_answer(&[]),
        Err(EngineError::IncompleteTree)
    ));
    let outcome = query(&program, &theory, &goal, cfg, true).unwrap();
    assert!(!outcome.complete);
    assert!(outcome.answers.is_empty());
}

#[test]
fn decide_game_atoms() {
    let (program, theory) = setup();
    let d = decide(&program, &theory, &w("c"), SelectionRule::Leftmost).unwrap();
    assert_eq!(d.outcome, DecisionOutcome::True);
    assert!(theory.entails(&d.true_certificate).unwrap());
    assert!(theory
        .equivalent(&d.true_certificate, &target_answer())
        .unwrap());

    let d = decide(&program, &theory, &w("f"), SelectionRule::Leftmost).unwrap();
    assert_eq!(d.outcome, DecisionOutcome::False);
    assert!(theory.entails(&d.false_certificate).unwrap());

    let d = decide(&program, &theory, &w("d"), SelectionRule::Leftmost).unwrap();
    assert_eq!(d.outcome, DecisionOutcome::Neither);
    // e_cls(f) implies falsity of w(d); not e_cls(f) implies truth
    let e_cls_f = Constraint::atom("e_cls", vec![Term::constant("f")]);
    assert!(theory.equivalent(&d.false_certificate, &e_cls_f).unwrap());
    assert!(theory
        .equivalent(&d.true_certificate, &e_cls_f.negated())
        .unwrap());
    assert!(d.t_tree.rank_discipline_ok());
    assert!(d.tu_tree.rank_discipline_ok());
}

#[test]
fn decide_agrees_with_declarative_oracle() {
    use crate::wf::Truth4;
    let (program, theory) = setup();
    let oracle = DeclarativeOracle::new(&program, &theory).unwrap();
    let universe = theory.constant_terms();
    for atom in program.herbrand_base(&universe) {
        let decision = decide(&program, &theory, &atom, SelectionRule::Leftmost).unwrap();
        let class = oracle.classify_atom(&atom).unwrap().value;
        match decision.outcome {
            DecisionOutcome::True => assert_eq!(class, Truth4::True, "{atom}"),
            DecisionOutcome::False => assert_eq!(class, Truth4::False, "{atom}"),
            DecisionOutcome::Neither => assert!(
                class == Truth4::Undefined || class == Truth4::ModelDependent,
                "{atom}: {class}"
            ),
        }
    }
}

#[test]
fn maximal_trees_for_worked_example() {
    let (program, theory) = setup();
    // finite answer for w(c); the full answer needs the rank-2 negative
    // answer for w(d), so rank 3
    let (tree, answer) =
        maximal_tree(&program, &theory, TreeKind::T, &w("c"), 3, SelectionRule::Leftmost)
            .unwrap();
    assert!(theory.equivalent(&answer, &target_answer()).unwrap());
    assert!(tree.rank_discipline_ok());

    // maximal tu-tree for w(f) at rank 0: finite pseudo-answer false,
    // negative answer true
    let (_, pseudo) =
        maximal_tree(&program, &theory, TreeKind::Tu, &w("f"), 0, SelectionRule::Leftmost)
            .unwrap();
    assert_eq!(pseudo, Constraint::False);

    // maximal tu-tree for w(d) at rank 2: negative answer equivalent to
    // e_cls(f)
    let (_, pseudo) =
        maximal_tree(&program, &theory, TreeKind::Tu, &w("d"), 2, SelectionRule::Leftmost)
            .unwrap();
    let e_cls_f = Constraint::atom("e_cls", vec![Term::constant("f")]);
    assert!(theory
        .equivalent(&pseudo.negated(), &e_cls_f)
        .unwrap());
}

#[test]
fn maximal_tree_refuses_unsafe_programs() {
    let text = "#rulepreds p/0.\n#constraintpreds q/1.\n#constants a.\np :- { q(X) }.\n";
    let program = parse_program(text).unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    let err = maximal_tree(
        &program,
        &theory,
        TreeKind::T,
        &Atom::new("p", vec![]),
        1,
        SelectionRule::Leftmost,
    )
    .unwrap_err();
    match err {
        EngineError::Unsafe { variable, .. } => assert_eq!(variable.name(), "X"),
        other => panic!("expected an unsafe error, got {other}"),
    }
}

#[test]
fn unsafe_program_yields_no_entailed_answer() {
    // p :- { q(X) }: the answer `exists X: q(X)` must stay conditional,
    // never entailed, because some theory model falsifies every instance
    let text = "#rulepreds p/0.\n#constraintpreds q/1.\n#constants a.\np :- { q(X) }.\n";
    let program = parse_program(text).unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    let goal = Goal::atom(Atom::new("p", vec![]));
    let outcome = query(&program, &theory, &goal, EngineConfig::default(), false).unwrap();
    for answer in &outcome.answers {
        assert_ne!(answer.status, CheckStatus::Entailed);
    }
}

#[test]
fn decide_refuses_non_datalog() {
    let text = "#rulepreds p/1.\n#constants a.\np(s(X)) :- p(X).\np(a).\n";
    let program = parse_program(text).unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    assert!(matches!(
        decide(
            &program,
            &theory,
            &Atom::new("p", vec![Term::constant("a")]),
            SelectionRule::Leftmost
        ),
        Err(EngineError::NonDatalog { .. })
    ));
}

#[test]
fn selection_rules_pick_expected_literals() {
    let (program, _) = setup();
    let goal = parse_goal("~w(c), m(X,Y), ~w(Y)", &program.signature).unwrap();
    assert_eq!(SelectionRule::Leftmost.select(&goal), Some(0));
    assert_eq!(SelectionRule::Rightmost.select(&goal), Some(2));
    assert_eq!(SelectionRule::NegativeLast.select(&goal), Some(1));
    let empty = Goal::new(Constraint::True, vec![]);
    assert_eq!(SelectionRule::Leftmost.select(&empty), None);
    // with only negative literals, negative-last falls back to the first
    let negs = parse_goal("~w(c), ~w(d)", &program.signature).unwrap();
    assert_eq!(SelectionRule::NegativeLast.select(&negs), Some(0));
}

#[test]
fn dot_export_is_wellformed() {
    let (program, theory) = setup();
    let goal = Goal::atom(w("c"));
    let mut solver = Solver::new(&program, &theory, EngineConfig::default());
    let tree = solver.build(TreeKind::T, &goal, 3).unwrap();
    let dot = tree.render_dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    assert!(dot.contains("n0 ->"));
    assert!(dot.trim_end().ends_with('}'));
    // deterministic output
    let mut solver2 = Solver::new(&program, &theory, EngineConfig::default());
    let tree2 = solver2.build(TreeKind::T, &goal, 3).unwrap();
    assert_eq!(dot, tree2.render_dot());
}

#[test]
fn apart_of_set_in_goal_safety() {
    let (program, _) = setup();
    let goal = parse_goal("{ X = c } w(X), ~w(Y)", &program.signature).unwrap();
    // Y is unsafe on its own but exempted when named apart
    assert!(!check_goal(&goal, &BTreeSet::new()).is_safe());
    let apart: BTreeSet<_> = goal.free_vars();
    assert!(check_goal(&goal, &apart).is_safe());
}
