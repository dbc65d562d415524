//! Seeded generators for the property suites.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use modsm_core::module::{DlpModule, FoModule};
use modsm_core::program::{BodyLiteral, HeadLiteral, Program, Rule};
use modsm_core::{Atom, Formula, Predicate, PredicateList, StepExpr, Term};

pub fn atom(name: &str) -> Atom {
    Atom::new(name, Vec::new())
}

pub fn prop_names(n: usize) -> Vec<String> {
    ["a", "b", "c", "d", "e", "g", "h"][..n].iter().map(|s| s.to_string()).collect()
}

fn pick_some<'a, T>(rng: &mut StdRng, from: &'a [T], max: usize) -> Vec<&'a T> {
    let n = rng.gen_range(0..=max.min(from.len()));
    from.choose_multiple(rng, n).collect()
}

fn body_literal(rng: &mut StdRng, a: Atom, double_negation: bool) -> BodyLiteral {
    match rng.gen_range(0..10) {
        0..=5 => BodyLiteral::Pos(a),
        6..=8 => BodyLiteral::Neg(a),
        _ if double_negation => BodyLiteral::NegNeg(a),
        _ => BodyLiteral::Neg(a),
    }
}

/// A ground rule with up to two head atoms drawn from `heads` and up to
/// three body literals over `atoms`. An empty head gets a nonempty body.
pub fn ground_rule(rng: &mut StdRng, heads: &[String], atoms: &[String], double_negation: bool) -> Rule {
    let head: Vec<HeadLiteral> = pick_some(rng, heads, 2)
        .into_iter()
        .map(|h| HeadLiteral::Pos(atom(h)))
        .collect();
    let min_body = usize::from(head.is_empty());
    let n = rng.gen_range(min_body..=3.min(atoms.len()).max(min_body));
    let body = atoms
        .choose_multiple(rng, n)
        .map(|b| body_literal(rng, atom(b), double_negation))
        .collect();
    Rule::new(head, body)
}

/// Up to `max_atoms` atoms and `max_rules` rules; some choice rules and
/// doubly negated body atoms.
pub fn ground_program(rng: &mut StdRng, max_atoms: usize, max_rules: usize) -> Program {
    let atoms = prop_names(rng.gen_range(1..=max_atoms));
    let n = rng.gen_range(0..=max_rules);
    let rules = (0..n)
        .map(|_| {
            if rng.gen_bool(0.1) {
                let a = atoms.choose(rng).expect("nonempty");
                let body = pick_some(rng, &atoms, 2)
                    .into_iter()
                    .map(|b| body_literal(rng, atom(b), true))
                    .collect();
                Rule::choice(atom(a), body)
            } else {
                ground_rule(rng, &atoms, &atoms, true)
            }
        })
        .collect();
    Program::new(rules).expect("propositional atoms")
}

fn literal_formula(rng: &mut StdRng, name: &str) -> Formula {
    let a = Formula::prop(name);
    match rng.gen_range(0..10) {
        0..=5 => a,
        6..=8 => Formula::not(a),
        _ => Formula::not(Formula::not(a)),
    }
}

/// `body → head` with a conjunction of literals as body and a disjunction
/// of atoms (possibly `⊥`) as head.
pub fn rule_formula(rng: &mut StdRng, heads: &[String], atoms: &[String]) -> Formula {
    let head: Vec<&String> = pick_some(rng, heads, 2);
    let min_body = usize::from(head.is_empty());
    let n = rng.gen_range(min_body..=3.min(atoms.len()).max(min_body));
    let body: Vec<Formula> = atoms
        .choose_multiple(rng, n)
        .map(|b| literal_formula(rng, b))
        .collect();
    let head = if head.is_empty() {
        Formula::Falsity
    } else {
        Formula::disjunction(head.into_iter().map(|h| Formula::prop(h.as_str())))
    };
    if body.is_empty() {
        head
    } else {
        Formula::implies(Formula::conjunction(body), head)
    }
}

pub fn props(names: &[String]) -> PredicateList {
    PredicateList::dedup_from(names.iter().map(|n| Predicate::new(n.as_str(), 0)))
}

/// Inputs are the predicates of the conjuncts that are not outputs.
pub fn module_of(conjuncts: Vec<Formula>, outputs: &[String]) -> FoModule {
    let outputs = props(outputs);
    let used = PredicateList::from(Formula::conjunction(conjuncts.iter().cloned()).predicates());
    FoModule::new(conjuncts, used.difference(&outputs), outputs).expect("valid by construction")
}

/// Splits `atoms` into `parts` disjoint output sets and the rest.
fn partition(rng: &mut StdRng, atoms: &[String], parts: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new(); parts + 1];
    for a in atoms {
        out[rng.gen_range(0..=parts)].push(a.clone());
    }
    out
}

/// Two propositional modules with disjoint outputs, each with its own
/// rules and possibly some rules common to both.
pub fn module_pair(rng: &mut StdRng) -> (FoModule, FoModule) {
    let atoms = prop_names(rng.gen_range(3..=6));
    let parts = partition(rng, &atoms, 2);
    let (o1, o2) = (&parts[0], &parts[1]);
    let both: Vec<String> = o1.iter().chain(o2).cloned().collect();
    let own = |rng: &mut StdRng, heads: &[String]| -> Vec<Formula> {
        (0..rng.gen_range(1..=3)).map(|_| rule_formula(rng, heads, &atoms)).collect()
    };
    let mut f1 = own(rng, o1);
    let mut f2 = own(rng, o2);
    let shared: Vec<Formula> = (0..rng.gen_range(0..=2))
        .map(|_| rule_formula(rng, &both, &atoms))
        .collect();
    f1.extend(shared.iter().cloned());
    f2.extend(shared);
    (module_of(f1, o1), module_of(f2, o2))
}

/// Three propositional modules over at most five atoms, at most four
/// conjuncts each; one rule may be shared by two of them.
pub fn module_triple(rng: &mut StdRng) -> [FoModule; 3] {
    let atoms = prop_names(rng.gen_range(3..=5));
    let parts = partition(rng, &atoms, 3);
    let mut conjuncts: Vec<Vec<Formula>> = (0..3)
        .map(|i| {
            (0..rng.gen_range(1..=3))
                .map(|_| rule_formula(rng, &parts[i], &atoms))
                .collect()
        })
        .collect();
    if rng.gen_bool(0.4) {
        let mut which = [0usize, 1, 2];
        which.shuffle(rng);
        let heads: Vec<String> = parts[which[0]].iter().chain(&parts[which[1]]).cloned().collect();
        let r = rule_formula(rng, &heads, &atoms);
        conjuncts[which[0]].push(r.clone());
        conjuncts[which[1]].push(r);
    }
    let mut it = conjuncts.into_iter().enumerate().map(|(i, c)| module_of(c, &parts[i]));
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

fn dlp_module(rules: Vec<Rule>, outputs: &[String]) -> DlpModule {
    let program = Program::new(rules).expect("propositional atoms");
    let outputs: std::collections::BTreeSet<Atom> = outputs.iter().map(|o| atom(o)).collect();
    let inputs = program.atoms().into_iter().filter(|a| !outputs.contains(a)).collect();
    DlpModule::new(program, inputs, outputs).expect("valid by construction")
}

/// Two ground DLP modules with disjoint outputs. Rules whose head meets
/// both output sets are put in both programs.
pub fn dlp_pair(rng: &mut StdRng) -> (DlpModule, DlpModule) {
    let atoms = prop_names(rng.gen_range(3..=6));
    let parts = partition(rng, &atoms, 2);
    let (o1, o2) = (&parts[0], &parts[1]);
    let own = |rng: &mut StdRng, heads: &[String]| -> Vec<Rule> {
        (0..rng.gen_range(1..=3))
            .map(|_| ground_rule(rng, heads, &atoms, true))
            .collect()
    };
    let mut r1 = own(rng, o1);
    let mut r2 = own(rng, o2);
    for _ in 0..rng.gen_range(0..=1) {
        if o1.is_empty() || o2.is_empty() {
            break;
        }
        let h1 = o1.choose(rng).expect("nonempty");
        let h2 = o2.choose(rng).expect("nonempty");
        let body = ground_rule(rng, &[], &atoms, true).body;
        let r = Rule::new(vec![HeadLiteral::Pos(atom(h1)), HeadLiteral::Pos(atom(h2))], body);
        r1.push(r.clone());
        r2.push(r);
    }
    (dlp_module(r1, o1), dlp_module(r2, o2))
}

/// Names used by generated incremental theories: base atoms, cumulative
/// atoms `x`, `y` and the volatile atom `q`.
const BASE: [&str; 2] = ["b0", "b1"];

fn step_atom(name: &str, step: StepExpr) -> Formula {
    Formula::Atom(Atom::parameterized(name, step, Vec::<Term>::new()))
}

fn theory_rule(rng: &mut StdRng, heads: &[Formula], body: &[Formula]) -> Formula {
    let head: Vec<&Formula> = {
        let n = rng.gen_range(0..=2.min(heads.len()));
        heads.choose_multiple(rng, n).collect()
    };
    let min_body = usize::from(head.is_empty());
    let n = rng.gen_range(min_body..=3.min(body.len()).max(min_body));
    let lits: Vec<Formula> = body
        .choose_multiple(rng, n)
        .map(|a| match rng.gen_range(0..10) {
            0..=5 => a.clone(),
            6..=8 => Formula::not(a.clone()),
            _ => Formula::not(Formula::not(a.clone())),
        })
        .collect();
    let head = if head.is_empty() {
        Formula::Falsity
    } else {
        Formula::disjunction(head.into_iter().cloned())
    };
    if lits.is_empty() {
        head
    } else {
        Formula::implies(Formula::conjunction(lits), head)
    }
}

/// A ground incremental theory whose cumulative part defines only `x@(t)`
/// and `y@(t)` and whose volatile part defines only `q@(t)`, so the chain
/// is acyclic by construction. Each step mentions at most five predicates.
pub fn incremental_theory(rng: &mut StdRng) -> (Formula, Formula, Formula) {
    let b: Vec<Formula> = BASE.iter().map(|n| Formula::prop(*n)).collect();
    let x0 = step_atom("x", StepExpr::Fixed(0));
    let base_heads = vec![b[0].clone(), b[1].clone(), x0.clone()];
    let base = Formula::conjunction(
        (0..rng.gen_range(0..=3)).map(|_| theory_rule(rng, &base_heads, &base_heads)),
    );
    let now = |n| step_atom(n, StepExpr::Offset(0));
    let before = |n| step_atom(n, StepExpr::Offset(-1));
    let cum_heads = vec![now("x"), now("y")];
    let cum_body = vec![now("x"), now("y"), before("x"), before("y"), b[0].clone()];
    let cumulative = Formula::conjunction(
        (0..rng.gen_range(1..=3)).map(|_| theory_rule(rng, &cum_heads, &cum_body)),
    );
    let vol_heads = vec![now("q")];
    let vol_body = vec![now("x"), now("y"), now("q"), b[1].clone()];
    let volatile = Formula::conjunction(
        (0..rng.gen_range(0..=2)).map(|_| theory_rule(rng, &vol_heads, &vol_body)),
    );
    (base, cumulative, volatile)
}

const VARS: [&str; 2] = ["x", "y"];

/// A formula of depth at most `depth` over `p`, `q`, `r`, `s/1`, `t/1`
/// with objects `a`, `b`, quantifiers, `⊤` and `⊥`.
pub fn random_formula(rng: &mut StdRng, depth: usize) -> Formula {
    fn go(rng: &mut StdRng, depth: usize, scope: &mut Vec<&'static str>) -> Formula {
        if depth == 0 || rng.gen_bool(0.2) {
            return match rng.gen_range(0..10) {
                0 => Formula::top(),
                1 => Formula::Falsity,
                2..=5 => Formula::prop(["p", "q", "r"][rng.gen_range(0..3)]),
                _ => {
                    let name = ["s", "t"][rng.gen_range(0..2)];
                    let arg = if !scope.is_empty() && rng.gen_bool(0.7) {
                        Term::var(*scope.choose(rng).expect("nonempty"))
                    } else {
                        Term::constant(["a", "b"][rng.gen_range(0..2)])
                    };
                    Formula::atom(name, vec![arg])
                }
            };
        }
        match rng.gen_range(0..6) {
            0 => Formula::not(go(rng, depth - 1, scope)),
            1 => Formula::and(go(rng, depth - 1, scope), go(rng, depth - 1, scope)),
            2 => Formula::or(go(rng, depth - 1, scope), go(rng, depth - 1, scope)),
            3 => Formula::implies(go(rng, depth - 1, scope), go(rng, depth - 1, scope)),
            k => {
                let v = VARS[rng.gen_range(0..2)];
                scope.push(v);
                let body = go(rng, depth - 1, scope);
                scope.pop();
                if k == 4 {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
        }
    }
    go(rng, depth, &mut Vec::new())
}

/// A random sublist of the predicates used by `random_formula`.
pub fn random_projection_list(rng: &mut StdRng) -> PredicateList {
    let all = [
        Predicate::new("p", 0),
        Predicate::new("q", 0),
        Predicate::new("r", 0),
        Predicate::new("s", 1),
        Predicate::new("t", 1),
    ];
    PredicateList::dedup_from(all.into_iter().filter(|_| rng.gen_bool(0.5)))
}

/// Every atom `a` of a propositional formula becomes `a(x)`, and the
/// result is closed by `∀x`.
pub fn unary(f: &Formula) -> Formula {
    let g = f.map_atoms(|a| Formula::atom(a.predicate.name.as_str(), vec![Term::var("x")]));
    Formula::forall("x", g)
}

pub fn unary_preds(names: &[String]) -> PredicateList {
    PredicateList::dedup_from(names.iter().map(|n| Predicate::new(n.as_str(), 1)))
}
