use std::collections::BTreeSet;

use modsm_core::deps::dependency_graph;
use modsm_core::herbrand::{answer_sets, satisfies_sm, PartialInterpretation, SearchConfig};
use modsm_core::polarity::{head_predicates, is_negative_on, occurrences};
use modsm_core::program::{desugar_choice, expand_count, fol_representation, instantiate_at};
use modsm_core::program::{BodyLiteral, HeadLiteral, Program, Rule};
use modsm_core::sm::star_transform;
use modsm_core::{Atom, Formula, Predicate, PredicateList, StepExpr, Term};
use proptest::prelude::*;

const PROPS: [&str; 4] = ["a", "b", "c", "d"];
const OBJECTS: [&str; 2] = ["k1", "k2"];

fn s(arg: Term) -> Formula {
    Formula::atom("s", vec![arg])
}

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        4 => (0..PROPS.len()).prop_map(|i| Formula::prop(PROPS[i])),
        2 => (0..OBJECTS.len()).prop_map(|i| s(Term::constant(OBJECTS[i]))),
        1 => Just(s(Term::var("X"))),
        1 => Just(Formula::top()),
        1 => Just(Formula::Falsity),
    ]
}

/// Sentences over a, b, c, d and s/1, closed universally.
fn sentence() -> impl Strategy<Value = Formula> {
    leaf()
        .prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                inner.prop_map(|f| Formula::exists("X", f)),
            ]
        })
        .prop_map(|f| f.universal_closure())
}

fn all_predicates() -> Vec<Predicate> {
    let mut out: Vec<Predicate> = PROPS.iter().map(|p| Predicate::new(*p, 0)).collect();
    out.push(Predicate::new("s", 1));
    out
}

fn objects() -> Vec<String> {
    OBJECTS.iter().map(|o| o.to_string()).collect()
}

/// The Herbrand interpretation whose true atoms are picked by the bits of
/// `mask`: one bit per proposition, then one per `s(k)`.
fn interpretation(mask: u8) -> PartialInterpretation {
    let mut atoms = Vec::new();
    for (k, p) in PROPS.iter().enumerate() {
        if mask >> k & 1 == 1 {
            atoms.push(Atom::new(*p, vec![]));
        }
    }
    for (k, o) in OBJECTS.iter().enumerate() {
        if mask >> (PROPS.len() + k) & 1 == 1 {
            atoms.push(Atom::new("s", vec![Term::constant(*o)]));
        }
    }
    PartialInterpretation::from_atoms(&objects(), all_predicates(), &atoms).unwrap()
}

fn sublist(mask: u8) -> PredicateList {
    all_predicates()
        .into_iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, p)| p)
        .collect()
}

fn body_literal() -> impl Strategy<Value = BodyLiteral> {
    (0..PROPS.len(), 0..3u8).prop_map(|(i, kind)| {
        let a = Atom::new(PROPS[i], vec![]);
        match kind {
            0 => BodyLiteral::Pos(a),
            1 => BodyLiteral::Neg(a),
            _ => BodyLiteral::NegNeg(a),
        }
    })
}

fn step_atom() -> impl Strategy<Value = Formula> {
    (0..2usize, prop_oneof![(-1i64..=1).prop_map(StepExpr::Offset), (0u64..3).prop_map(StepExpr::Fixed)])
        .prop_map(|(i, step)| Formula::Atom(Atom::parameterized(["x", "y"][i], step, vec![])))
}

fn step_formula() -> impl Strategy<Value = Formula> {
    prop_oneof![step_atom(), leaf()].prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn negation_shifts_every_occurrence(f in sentence(), g in sentence()) {
        let inner: Vec<usize> = occurrences(&f).iter().map(|o| o.antecedents).collect();
        let negated: Vec<usize> = occurrences(&Formula::not(f.clone())).iter().map(|o| o.antecedents).collect();
        prop_assert_eq!(negated, inner.iter().map(|n| n + 1).collect::<Vec<_>>());

        let conclusion: Vec<usize> = occurrences(&g).iter().map(|o| o.antecedents).collect();
        let imp: Vec<usize> = occurrences(&Formula::implies(f, g)).iter().map(|o| o.antecedents).collect();
        let mut expected: Vec<usize> = inner.iter().map(|n| n + 1).collect();
        expected.extend(conclusion);
        prop_assert_eq!(imp, expected);
    }

    #[test]
    fn negated_formulas_are_negative_on_everything(f in sentence()) {
        prop_assert!(is_negative_on(&Formula::not(f), &sublist(0x1f)));
    }

    #[test]
    fn negative_on_passes_to_sublists(f in sentence(), p in 0u8..32, q in 0u8..32) {
        let (p, q) = (sublist(p), sublist(p & q));
        if is_negative_on(&f, &p) {
            prop_assert!(is_negative_on(&f, &q));
        }
    }

    #[test]
    fn heads_are_predicates_of_the_formula(f in sentence()) {
        let preds = f.predicates();
        for h in head_predicates(&f).iter() {
            prop_assert!(preds.contains(h));
        }
    }

    #[test]
    fn closure_is_idempotent(f in sentence()) {
        let once = f.universal_closure();
        prop_assert!(once.is_sentence());
        prop_assert!(once.universal_closure().alpha_eq(&once));
    }

    #[test]
    fn empty_intensional_list_is_classical(f in sentence(), mask in 0u8..64) {
        let i = interpretation(mask);
        let sm = satisfies_sm(&i, &f, &PredicateList::empty(), SearchConfig::default()).unwrap();
        prop_assert_eq!(sm, i.evaluate(&f).unwrap());
    }

    #[test]
    fn stable_models_are_models(f in sentence()) {
        let with_objects = Formula::and(
            f,
            Formula::or(s(Term::constant("k1")), Formula::not(s(Term::constant("k2")))).universal_closure(),
        );
        for m in answer_sets(&with_objects, SearchConfig::default()).unwrap() {
            prop_assert!(m.evaluate(&with_objects).unwrap());
        }
    }

    #[test]
    fn star_without_intensional_predicates_is_equivalent(f in sentence(), mask in 0u8..64) {
        let p = PredicateList::new(vec![Predicate::new("e", 0)]).unwrap();
        let u = [Predicate::new("u1", 0)];
        let starred = star_transform(&f, &p, &u).unwrap();
        let i = interpretation(mask);
        prop_assert_eq!(i.evaluate(&starred).unwrap(), i.evaluate(&f).unwrap());
    }

    #[test]
    fn restriction_and_union_round_trip(mask in 0u8..64, split in 0u8..32) {
        let i = interpretation(mask);
        let left = sublist(split);
        let right = sublist(!split & 0x1f);
        let back = i.restrict(left.iter()).union(&i.restrict(right.iter())).unwrap();
        prop_assert_eq!(back, i);
    }

    #[test]
    fn dependency_graph_grows_with_conjuncts(f in sentence(), g in sentence(), p in 0u8..32) {
        let p = sublist(p);
        let small = dependency_graph(&f, &p);
        let big = dependency_graph(&Formula::and(f, g), &p);
        prop_assert!(small.edges.is_subset(&big.edges));
    }

    #[test]
    fn fact_programs_have_one_answer_set(mask in 0u8..64) {
        let facts = interpretation(mask).atoms();
        let rules = facts.iter().cloned().map(Rule::fact).collect();
        let program = Program::new(rules).unwrap();
        let f = fol_representation(&program).unwrap();
        prop_assert!(f.conjuncts().iter().all(|c| c.is_top() || matches!(c, Formula::Atom(a) if facts.contains(a))));
        let sets = answer_sets(&f, SearchConfig::default()).unwrap();
        prop_assert_eq!(sets.len(), 1);
        prop_assert_eq!(sets[0].atoms(), facts);
    }

    #[test]
    fn choice_rules_desugar_to_the_same_formula(a in 0..PROPS.len(), body in proptest::collection::vec(body_literal(), 0..3)) {
        let rule = Rule::choice(Atom::new(PROPS[a], vec![]), body);
        let plain = desugar_choice(&rule);
        prop_assert!(!plain.is_choice());
        let heads: Vec<HeadLiteral> = plain.head_literals();
        prop_assert_eq!(heads.len(), 2);
        prop_assert!(rule.to_formula().unwrap().alpha_eq(&plain.to_formula().unwrap()));
    }

    #[test]
    fn count_expansion_counts(bound in 1u64..4, size in 1usize..4, mask in 0u8..8) {
        let names: Vec<String> = (0..size).map(|k| format!("o{k}")).collect();
        let x = Term::var("X");
        let elements = [BodyLiteral::Pos(Atom::new("p", vec![x]))];
        let f = expand_count(bound, &["X".to_string()], &elements, &BTreeSet::new()).unwrap();
        prop_assert!(f.is_sentence());
        let true_atoms: Vec<Atom> = names
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, o)| Atom::new("p", vec![Term::constant(o.as_str())]))
            .collect();
        let i = PartialInterpretation::from_atoms(&names, [Predicate::new("p", 1)], &true_atoms).unwrap();
        prop_assert_eq!(i.evaluate(&f).unwrap(), true_atoms.len() as u64 >= bound);
    }

    #[test]
    fn instantiation_commutes_with_connectives(f in step_formula(), g in step_formula(), step in 1u64..5) {
        let whole = instantiate_at(&Formula::implies(f.clone(), Formula::and(g.clone(), Formula::not(f.clone()))), step).unwrap();
        let (fi, gi) = (instantiate_at(&f, step).unwrap(), instantiate_at(&g, step).unwrap());
        prop_assert_eq!(&whole, &Formula::implies(fi.clone(), Formula::and(gi, Formula::not(fi))));
        prop_assert!(!whole.has_parameterized_atoms());
    }
}
