use super::*;
use crate::syntax::{parse_goal, parse_program, parse_theory};
use crate::theory::FiniteGroundTheory;

const GAME: &str = "\
#rulepreds w/1 m/2.
#constants a b c d e f.
w(X) :- m(X,Y), ~w(Y).
m(b,a). m(a,b). m(a,c). m(c,d). m(d,e). m(c,f). m(e,f).
";

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

fn w(x: &str) -> Atom {
    Atom::new("w", vec![Term::constant(x)])
}

fn m(x: &str, y: &str) -> Atom {
    Atom::new("m", vec![Term::constant(x), Term::constant(y)])
}

fn game_reduced() -> GroundNormalProgram {
    let program = parse_program(GAME).unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    let universe = theory.constant_terms();
    let model = &theory.models().unwrap()[0];
    reduce(&program, &theory, model, &universe).unwrap()
}

/// Tiny builder for hand-written ground programs over atom names.
fn tiny(atoms: &[&str], rules: &[(&str, &[(bool, &str)])]) -> GroundNormalProgram {
    let mut list: Vec<Atom> = atoms.iter().map(|a| Atom::new(*a, vec![])).collect();
    list.sort();
    let table = Arc::new(AtomTable::from_sorted(list));
    let rules = rules
        .iter()
        .map(|(head, body)| GroundRule {
            head: table.id(&Atom::new(*head, vec![])).unwrap(),
            body: body
                .iter()
                .map(|(pos, a)| (*pos, table.id(&Atom::new(*a, vec![])).unwrap()))
                .collect(),
        })
        .collect();
    GroundNormalProgram {
        atoms: table,
        rules,
    }
}

#[test]
fn least_model_of_empty_program_is_empty() {
    let q = tiny(&[], &[]);
    let least = q.extended_by_negations(&[]).least_model();
    assert!(least.pos.is_empty() && least.neg.is_empty());
}

#[test]
fn least_model_chains_facts() {
    // {p <- q, q <-} has least model {q, p}
    let q = tiny(&["p", "q"], &[("p", &[(true, "q")]), ("q", &[])]);
    let least = q.extended_by_negations(&[false, false]).least_model();
    assert!(least.pos.iter().all(|v| *v));
}

#[test]
fn least_model_without_negative_facts_derives_only_edges() {
    // for the game program, no w atom is derivable without negative facts
    let q = game_reduced();
    let least = q
        .extended_by_negations(&vec![false; q.atoms.len()])
        .least_model();
    for (id, atom) in q.atoms.iter() {
        if atom.predicate == "w" {
            assert!(!least.pos[id], "unexpected {atom}");
        }
    }
    assert!(least.pos[q.atoms.id(&m("b", "a")).unwrap()]);
}

#[test]
fn definite_extensions_match_their_definitions() {
    let q = tiny(
        &["p", "q"],
        &[("p", &[(false, "q")])],
    );
    let n = q.atoms.len();
    // with the empty interpretation, the pessimistic extension adds nothing
    let least_t = q
        .definite_with_true_negatives(&Interp::empty(n))
        .least_model();
    assert!(least_t.neg.iter().all(|v| !v));
    // and the optimistic extension adds ~A for every atom
    let least_tu = q
        .definite_with_undefined_negatives(&Interp::empty(n))
        .least_model();
    assert!(least_tu.neg.iter().all(|v| *v));
    // with everything true, the optimistic extension adds nothing again
    let all_true = Interp::new(vec![true; n], vec![false; n]);
    let least_all = q
        .definite_with_undefined_negatives(&all_true)
        .least_model();
    assert!(least_all.neg.iter().all(|v| !v));
}

#[test]
fn wf_step_on_empty_program_makes_everything_false() {
    let q = tiny(&["p", "q"], &[]);
    let step = q.wf_step(&Interp::empty(2));
    assert!(step.f.iter().all(|v| *v));
    assert!(step.t.iter().all(|v| !v));
}

#[test]
fn wf_step_self_negation_is_a_fixpoint_at_empty() {
    // {p <- ~p}: p stays undefined, the fixpoint is reached immediately
    let q = tiny(&["p"], &[("p", &[(false, "p")])]);
    let step = q.wf_step(&Interp::empty(1));
    assert_eq!(step, Interp::empty(1));
    let wf = q.well_founded_model();
    assert_eq!(wf.value(0), Truth3::Undefined);
}

#[test]
fn wf_step_finds_dead_end_position() {
    // one step from the empty interpretation already refutes w(f)
    let q = game_reduced();
    let step = q.wf_step(&Interp::empty(q.atoms.len()));
    assert_eq!(step.value(q.atoms.id(&w("f")).unwrap()), Truth3::False);
}

#[test]
fn wf_of_negated_absent_atom() {
    // {p <- ~q} has well-founded model {p, ~q}
    let q = tiny(&["p", "q"], &[("p", &[(false, "q")])]);
    let wf = q.well_founded_model();
    assert_eq!(wf.value(q.atoms.id(&Atom::new("p", vec![])).unwrap()), Truth3::True);
    assert_eq!(wf.value(q.atoms.id(&Atom::new("q", vec![])).unwrap()), Truth3::False);
}

#[test]
fn game_well_founded_model_exact() {
    let q = game_reduced();
    let wf = q.well_founded_model();
    let expect = [
        ("c", Truth3::True),
        ("e", Truth3::True),
        ("d", Truth3::False),
        ("f", Truth3::False),
        ("a", Truth3::Undefined),
        ("b", Truth3::Undefined),
    ];
    for (name, value) in expect {
        assert_eq!(wf.value(q.atoms.id(&w(name)).unwrap()), value, "w({name})");
    }
    // fixpoint property
    assert_eq!(q.wf_step(&wf), wf);
    assert!(wf.is_consistent());
}

#[test]
fn reduce_keeps_rules_whose_constraint_holds() {
    let program = parse_program(HYBRID_GAME).unwrap();
    let theory = FiniteGroundTheory::bind(parse_theory(GEO).unwrap(), &program).unwrap();
    let universe = theory.constant_terms();
    let models = theory.models().unwrap();
    let e_cls_f = Atom::new("e_cls", vec![Term::constant("f")]);
    let fi_f = Atom::new("fi", vec![Term::constant("f")]);

    let with_e = models.iter().find(|m| m.holds(&e_cls_f) == Some(true)).unwrap();
    let reduced = reduce(&program, &theory, with_e, &universe).unwrap();
    let fact = |p: &GroundNormalProgram, a: &Atom| {
        let id = p.atoms.id(a).unwrap();
        p.rules.iter().any(|r| r.head == id && r.body.is_empty())
    };
    assert!(fact(&reduced, &m("e", "f")));

    let without_fi = models.iter().find(|m| m.holds(&fi_f) == Some(false)).unwrap();
    let reduced = reduce(&program, &theory, without_fi, &universe).unwrap();
    assert!(fact(&reduced, &m("c", "f")));

    // a rule with constraint `false` never survives
    let text = "\
#rulepreds p/0.
#constraintpreds q/1.
#constants a.
p :- { false }.
";
    let program = parse_program(text).unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    let universe = theory.constant_terms();
    for model in theory.models().unwrap() {
        let reduced = reduce(&program, &theory, model, &universe).unwrap();
        assert!(reduced.rules.is_empty());
    }
}

#[test]
fn classify_hybrid_game_examples() {
    let program = parse_program(HYBRID_GAME).unwrap();
    let theory = FiniteGroundTheory::bind(parse_theory(GEO).unwrap(), &program).unwrap();
    let oracle = DeclarativeOracle::new(&program, &theory).unwrap();
    assert_eq!(oracle.model_count(), 162);
    let expect = [
        ("c", Truth4::True),
        ("f", Truth4::False),
        ("a", Truth4::Undefined),
        ("b", Truth4::Undefined),
        ("d", Truth4::ModelDependent),
        ("e", Truth4::ModelDependent),
    ];
    for (name, value) in expect {
        let got = oracle.classify_atom(&w(name)).unwrap();
        assert_eq!(got.value, value, "w({name})");
        if value == Truth4::ModelDependent {
            let ((i, vi), (j, vj)) = got.disagreement.unwrap();
            assert_ne!(vi, vj);
            assert_ne!(i, j);
        }
    }
    // negative literal queries go through the same path
    let goal = parse_goal("~w(f)", &program.signature).unwrap();
    assert_eq!(
        oracle.classify_literals(&goal.literals).unwrap().value,
        Truth4::True
    );
}

#[test]
fn classify_rejects_non_ground_queries() {
    let program = parse_program(HYBRID_GAME).unwrap();
    let theory = FiniteGroundTheory::bind(parse_theory(GEO).unwrap(), &program).unwrap();
    let goal = parse_goal("w(X)", &program.signature).unwrap();
    assert!(matches!(
        classify(&program, &theory, &goal.literals),
        Err(WfError::NonGround { .. })
    ));
}

#[test]
fn classify_rejects_non_datalog_programs() {
    let text = "\
#rulepreds p/1.
#constants a.
p(s(X)) :- p(X).
p(a).
";
    let program = parse_program(text).unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    assert!(matches!(
        classify(&program, &theory, &[Literal::positive(Atom::new("p", vec![Term::constant("a")]))]),
        Err(WfError::NonDatalog { .. })
    ));
}

#[test]
fn fol_compatibility_on_negation_free_fragment() {
    // the game program without the w rule is negation-free
    let text = "\
#rulepreds m/2.
#constraintpreds fi/1 e_cls/1.
#constants a b c d e f.
m(b,a). m(a,b). m(a,c). m(c,d). m(d,e).
m(c,f) :- { not fi(f) }.
m(e,f) :- { e_cls(f) }.
";
    let program = parse_program(text).unwrap();
    let theory = FiniteGroundTheory::bind(parse_theory(GEO).unwrap(), &program).unwrap();
    assert!(fol_compatible(&program, &theory, &m("b", "a")).unwrap());
    assert!(fol_compatible(&program, &theory, &m("c", "f")).unwrap());
    // empty program: vacuously compatible
    let empty = parse_program("#rulepreds p/0.\n#constants a.\n").unwrap();
    let theory = FiniteGroundTheory::empty_for(&empty);
    assert!(fol_compatible(&empty, &theory, &Atom::new("p", vec![])).unwrap());
    // programs with negation are rejected
    let program = parse_program(HYBRID_GAME).unwrap();
    let theory = FiniteGroundTheory::bind(parse_theory(GEO).unwrap(), &program).unwrap();
    assert!(matches!(
        fol_compatible(&program, &theory, &w("c")),
        Err(WfError::NegationPresent)
    ));
}

#[test]
fn depth_bounded_universe_for_non_datalog_reduce() {
    // reduce and the fixpoint accept non-Datalog programs under an explicit
    // ground-term depth bound
    let text = "\
#rulepreds p/1.
#constants a.
p(s(X)) :- p(X).
p(a).
";
    let program = parse_program(text).unwrap();
    let theory = FiniteGroundTheory::empty_for(&program);
    let universe = crate::syntax::ground_terms(&program.signature.all_functions(), 2);
    assert_eq!(universe.len(), 3); // a, s(a), s(s(a))
    let model = &theory.models().unwrap()[0];
    let reduced = reduce(&program, &theory, model, &universe).unwrap();
    let wf = reduced.well_founded_model();
    let sa = Atom::new("p", vec![Term::app("s", vec![Term::constant("a")])]);
    assert_eq!(wf.value(reduced.atoms.id(&sa).unwrap()), Truth3::True);
}

#[test]
fn wf_step_monotone_spot_check() {
    let q = game_reduced();
    let n = q.atoms.len();
    let empty = Interp::empty(n);
    let one = q.wf_step(&empty);
    let two = q.wf_step(&one);
    assert!(one.subset_of(&two));
    assert!(empty.subset_of(&one));
}
