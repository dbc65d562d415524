//! Projection, module instantiation and incremental assembly of theories
//! given as a base, a cumulative part and a volatile part.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::formula::{symbols_of, Atom, Formula, PredicateList};
use crate::herbrand::{herbrand_base, sort_models, stable_models, PartialInterpretation, SearchConfig};
use crate::module::{join_with_shared, DlpModule, FoModule};
use crate::polarity::{head_predicates, strictly_positive_witness};
use crate::program::{fol_representation, ground_program, instantiate_at, uses_step_counter, BodyLiteral, Program, Rule};
use crate::syntax::{FormulaFile, ProgramFile, Section};

// ---- projection ----

/// One rewrite at the root, if any applies. `⊤` is `⊥ → ⊥`, so `¬⊥ ↦ ⊤`
/// holds by construction.
fn rewrite_root(f: &Formula) -> Option<Formula> {
    match f {
        Formula::And(a, b) => {
            if a.is_falsity() || b.is_falsity() {
                Some(Formula::Falsity)
            } else if a.is_top() {
                Some((**b).clone())
            } else if b.is_top() {
                Some((**a).clone())
            } else {
                None
            }
        }
        Formula::Or(a, b) => {
            if a.is_falsity() {
                Some((**b).clone())
            } else if b.is_falsity() {
                Some((**a).clone())
            } else if a.is_top() || b.is_top() {
                Some(Formula::top())
            } else {
                None
            }
        }
        Formula::Implies(a, b) => {
            if a.is_falsity() {
                // already ⊤ when b is ⊥
                (!b.is_falsity()).then(Formula::top)
            } else if a.is_top() {
                Some((**b).clone())
            } else {
                None
            }
        }
        Formula::Forall(_, body) | Formula::Exists(_, body) => {
            if body.is_top() {
                Some(Formula::top())
            } else if body.is_falsity() {
                Some(Formula::Falsity)
            } else {
                None
            }
        }
        Formula::Atom(_) | Formula::Equal(..) | Formula::Falsity => None,
    }
}

fn map_children(f: &Formula, mut g: impl FnMut(&Formula) -> Formula) -> Formula {
    match f {
        Formula::And(a, b) => Formula::and(g(a), g(b)),
        Formula::Or(a, b) => Formula::or(g(a), g(b)),
        Formula::Implies(a, b) => Formula::implies(g(a), g(b)),
        Formula::Forall(v, body) => Formula::forall(v.clone(), g(body)),
        Formula::Exists(v, body) => Formula::exists(v.clone(), g(body)),
        Formula::Atom(_) | Formula::Equal(..) | Formula::Falsity => f.clone(),
    }
}

fn bottom_up_pass(f: &Formula) -> Formula {
    let g = map_children(f, bottom_up_pass);
    rewrite_root(&g).unwrap_or(g)
}

fn top_down_pass(f: &Formula) -> Formula {
    let mut g = f.clone();
    while let Some(h) = rewrite_root(&g) {
        g = h;
    }
    map_children(&g, top_down_pass)
}

fn to_fixpoint(f: &Formula, pass: fn(&Formula) -> Formula) -> Formula {
    let mut cur = f.clone();
    loop {
        let next = pass(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Applies the `⊤`/`⊥` rewrites bottom-up until nothing changes.
pub fn simplify(f: &Formula) -> Formula {
    to_fixpoint(f, bottom_up_pass)
}

/// The same rewrites applied outermost first; used to check that the
/// result does not depend on the order.
pub fn simplify_top_down(f: &Formula) -> Formula {
    to_fixpoint(f, top_down_pass)
}

/// Atoms of predicates outside `p` become `⊥`; nothing is simplified.
pub fn replace_outside(f: &Formula, p: &PredicateList) -> Formula {
    f.map_atoms(|a| {
        if p.contains(&a.predicate) {
            Formula::Atom(a.clone())
        } else {
            Formula::Falsity
        }
    })
}

/// Atoms of predicates outside `p` become `⊥`, then the result is
/// simplified.
pub fn project_formula(f: &Formula, p: &PredicateList) -> Formula {
    simplify(&replace_outside(f, p))
}

/// Drops rules with a positive (or doubly negated) body atom outside `x`,
/// then `not c` literals with `c` outside `x`.
pub fn project_program(program: &Program, x: &BTreeSet<Atom>) -> Result<Program> {
    if let Some(r) = program.rules.iter().find(|r| !r.is_ground()) {
        return Err(Error::NonGround(r.to_string()));
    }
    let rules = program
        .rules
        .iter()
        .filter(|r| {
            r.body.iter().all(|l| match l {
                BodyLiteral::Pos(a) | BodyLiteral::NegNeg(a) => x.contains(a),
                _ => true,
            })
        })
        .map(|r| Rule {
            head: r.head.clone(),
            body: r
                .body
                .iter()
                .filter(|l| !matches!(l, BodyLiteral::Neg(a) if !x.contains(a)))
                .cloned()
                .collect(),
        })
        .collect();
    let mut out = Program::new(rules)?;
    out.signature.extend(&program.signature);
    Ok(out)
}

/// Ground the program, project onto inputs plus all heads to find the
/// outputs, then project onto inputs plus outputs.
pub fn dm_instantiate(program: &Program, inputs: &BTreeSet<Atom>) -> Result<DlpModule> {
    let ground = ground_program(program, &program.signature)?;
    let mut reach: BTreeSet<Atom> = inputs.clone();
    reach.extend(ground.head_atoms());
    let outputs = project_program(&ground, &reach)?.head_atoms();
    let mut keep = inputs.clone();
    keep.extend(outputs.iter().cloned());
    let projected = project_program(&ground, &keep)?;
    DlpModule::new(projected, inputs.clone(), outputs)
}

/// `FM(F, I)` with the sequence `F⁰, F¹, …` up to and including the first
/// repeated formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instantiation {
    pub module: FoModule,
    pub trace: Vec<Formula>,
}

pub fn fm_instantiate(f: &Formula, inputs: &PredicateList) -> Result<Instantiation> {
    let mut trace = alloc::vec![f.clone()];
    loop {
        let cur = trace.last().expect("nonempty");
        let keep = inputs.union(&head_predicates(cur));
        let next = project_formula(cur, &keep);
        let done = &next == cur;
        trace.push(next);
        if done {
            break;
        }
    }
    let fixpoint = trace.last().expect("nonempty").clone();
    let outputs = PredicateList::from(f.predicates()).difference(inputs);
    let module = FoModule::from_formula(&fixpoint, inputs.clone(), outputs)?;
    Ok(Instantiation { module, trace })
}

impl Instantiation {
    /// `F^0 = …` lines followed by the module.
    pub fn render(&self, notation: crate::Notation) -> String {
        let mut s = String::new();
        for (i, f) in self.trace.iter().enumerate() {
            s.push_str(&format!("F^{i} = {}\n", f.display(notation)));
        }
        s.push_str(&format!(
            "FM = ({}, {}, {})\n",
            self.module.formula().display(notation),
            self.module.inputs(),
            self.module.outputs()
        ));
        s
    }
}

// ---- incremental theories ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncrementalTheory {
    pub base: Formula,
    pub cumulative: Formula,
    pub volatile: Formula,
}

/// Which member of the chain `B ≺ P[1] ≺ … ≺ P[k] ≺ Q[k]` a formula is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    Base,
    Cumulative(u64),
    Volatile(u64),
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Base => f.write_str("B"),
            Component::Cumulative(i) => write!(f, "P[{i}]"),
            Component::Volatile(i) => write!(f, "Q[{i}]"),
        }
    }
}

impl IncrementalTheory {
    pub fn new(base: Formula, cumulative: Formula, volatile: Formula) -> Result<Self> {
        let mut stepped = None;
        base.for_each_atom(&mut |a| {
            if a.step.is_some_and(|s| s.depends_on_counter()) && stepped.is_none() {
                stepped = Some(a.to_string());
            }
        });
        if let Some(a) = stepped {
            return Err(Error::UnexpectedStep(a));
        }
        debug_assert!(!uses_step_counter(&base));
        Ok(IncrementalTheory {
            base,
            cumulative,
            volatile,
        })
    }

    pub fn from_formula_file(file: &FormulaFile) -> Result<Self> {
        Self::new(
            file.section(Section::Base),
            file.section(Section::Cumulative),
            file.section(Section::Volatile),
        )
    }

    pub fn from_program_file(file: &ProgramFile) -> Result<Self> {
        let part = |s| -> Result<Formula> { fol_representation(&Program::new(file.section(s))?) };
        Self::new(part(Section::Base)?, part(Section::Cumulative)?, part(Section::Volatile)?)
    }

    /// The chain for step `k` with each member instantiated.
    pub fn components(&self, k: u64) -> Result<Vec<(Component, Formula)>> {
        // the base has only fixed steps, so any step instantiates it
        let mut out = alloc::vec![(Component::Base, instantiate_at(&self.base, 0)?)];
        for i in 1..=k {
            out.push((Component::Cumulative(i), instantiate_at(&self.cumulative, i)?));
        }
        out.push((Component::Volatile(k), instantiate_at(&self.volatile, k)?));
        Ok(out)
    }
}

/// `B ∧ P[1] ∧ … ∧ P[k] ∧ Q[k]`
pub fn k_expansion(t: &IncrementalTheory, k: u64) -> Result<Formula> {
    Ok(Formula::conjunction(t.components(k)?.into_iter().map(|(_, f)| f)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicityViolation {
    pub earlier: Component,
    pub later: Component,
    pub predicate: crate::formula::Predicate,
}

impl fmt::Display for AcyclicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} occurs strictly positively in {} but already occurs in {}",
            self.predicate.qualified(),
            self.later,
            self.earlier
        )
    }
}

/// Every later member of the chain must be negative on the predicates of
/// every earlier one.
pub fn acyclic_check(t: &IncrementalTheory, k: u64) -> Result<Vec<AcyclicityViolation>> {
    let chain = t.components(k)?;
    let mut out = Vec::new();
    for (j, (later, g)) in chain.iter().enumerate() {
        for (earlier, f) in &chain[..j] {
            let earlier_preds = PredicateList::from(f.predicates());
            if let Some(p) = strictly_positive_witness(g, &earlier_preds) {
                out.push(AcyclicityViolation {
                    earlier: *earlier,
                    later: *later,
                    predicate: p,
                });
            }
        }
    }
    Ok(out)
}

fn require_acyclic(t: &IncrementalTheory, k: u64) -> Result<()> {
    match acyclic_check(t, k)?.into_iter().next() {
        Some(v) => Err(Error::NotAcyclic(v.to_string())),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblyStep {
    pub component: Component,
    pub instantiation: Instantiation,
    /// `P_i`, or `R_k` for the volatile step.
    pub joined: FoModule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembly {
    pub k: u64,
    pub steps: Vec<AssemblyStep>,
}

impl Assembly {
    pub fn result(&self) -> &FoModule {
        &self.steps.last().expect("at least base and volatile").joined
    }

    /// `Out(P_i)` for `i = 0..=k`.
    pub fn outputs(&self) -> Vec<&PredicateList> {
        self.steps
            .iter()
            .filter(|s| !matches!(s.component, Component::Volatile(_)))
            .map(|s| s.joined.outputs())
            .collect()
    }
}

/// `P_0 = FM(B, ∅)`, `P_i = P_{i-1} ⊔ FM(P[i], Out(P_{i-1}))` and
/// `R_k = P_k ⊔ FM(Q[k], Out(P_k))`, checking that every join is defined
/// and that `Out(P_i)` is exactly the predicates of `B ∧ P[1] ∧ … ∧ P[i]`.
pub fn assemble(t: &IncrementalTheory, k: u64) -> Result<Assembly> {
    require_acyclic(t, k)?;
    let chain = t.components(k)?;
    let mut steps: Vec<AssemblyStep> = Vec::new();
    let mut seen = BTreeSet::new();
    for (component, f) in chain {
        let previous = steps.last().map(|s: &AssemblyStep| s.joined.clone());
        let inputs = previous
            .as_ref()
            .map_or_else(PredicateList::empty, |p| p.outputs().clone());
        let instantiation = fm_instantiate(&f, &inputs)?;
        let joined = match &previous {
            None => instantiation.module.clone(),
            Some(p) => join_with_shared(p, &instantiation.module, &[]).map_err(|e| {
                Error::Internal(format!("join at {component} is undefined for an acyclic theory: {e}"))
            })?,
        };
        seen.extend(f.predicates());
        if !matches!(component, Component::Volatile(_))
            && !joined.outputs().same_members(&PredicateList::from(seen.clone()))
        {
            return Err(Error::Internal(format!(
                "outputs after {component} are {}, expected {}",
                joined.outputs(),
                PredicateList::from(seen.clone())
            )));
        }
        steps.push(AssemblyStep {
            component,
            instantiation,
            joined,
        });
    }
    Ok(Assembly { k, steps })
}

/// Solves the components in order, each one with its inputs fixed by the
/// models found so far.
pub fn incremental_solve(
    t: &IncrementalTheory,
    k: u64,
    config: SearchConfig,
) -> Result<Vec<PartialInterpretation>> {
    let assembly = assemble(t, k)?;
    let expansion = k_expansion(t, k)?;
    let base = herbrand_base(&symbols_of(&expansion))?;
    let mut models = alloc::vec![base];
    for step in &assembly.steps {
        let module = &step.instantiation.module;
        let formula = module.formula();
        let mut next = Vec::new();
        for m in &models {
            next.extend(stable_models(&formula, module.outputs(), m, config)?);
        }
        models = next;
        if models.is_empty() {
            break;
        }
    }
    sort_models(&mut models);
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::display::Notation;
    use crate::formula::Predicate;
    use crate::herbrand::{answer_sets, atoms_to_string};
    use crate::syntax::{parse_atoms, parse_formula, parse_formula_file, parse_program};

    fn props(names: &[&str]) -> PredicateList {
        PredicateList::new(names.iter().map(|n| Predicate::new(*n, 0)).collect()).unwrap()
    }

    #[test]
    fn projection_of_eleven() {
        let f = parse_formula(
            "forall x (p(x) -> q(x)) & (q(a) & ~p(a) -> r) & forall x (~q(x) & t(x) -> s(x))",
        )
        .unwrap();
        let onto = PredicateList::new(alloc::vec![
            Predicate::new("q", 1),
            Predicate::new("r", 0),
            Predicate::new("s", 1),
            Predicate::new("t", 1),
            Predicate::new("m", 0),
        ])
        .unwrap();
        let g = project_formula(&f, &onto);
        assert_eq!(g.to_string(), "(q(a) → r) ∧ ∀x(¬q(x) ∧ t(x) → s(x))");
        assert_eq!(project_formula(&f, &PredicateList::from(f.predicates())), f);
        assert_eq!(project_formula(&parse_formula("p & q").unwrap(), &props(&["q"])), Formula::Falsity);
    }

    #[test]
    fn rewrite_table() {
        let cases = [
            ("~#true", "⊥"),
            ("#false & q", "⊥"),
            ("q & #false", "⊥"),
            ("#true & q", "q"),
            ("q & #true", "q"),
            ("#false | q", "q"),
            ("q | #false", "q"),
            ("#true | q", "⊤"),
            ("q | #true", "⊤"),
            ("#false -> q", "⊤"),
            ("#true -> q", "q"),
            ("exists x #true", "⊤"),
            ("exists x #false", "⊥"),
            ("forall x #true", "⊤"),
            ("forall x #false", "⊥"),
            // no rule for F → ⊥ or F → ⊤
            ("q -> #false", "¬q"),
            ("q -> #true", "q → ⊤"),
        ];
        for (input, expected) in cases {
            let f = parse_formula(input).unwrap();
            assert_eq!(simplify(&f).to_string(), expected, "{input}");
            assert_eq!(simplify_top_down(&f).to_string(), expected, "{input}");
        }
    }

    #[test]
    fn example_two_trace() {
        let f = parse_formula("(p -> q) & (q -> r) & (t & ~r -> s)").unwrap();
        let inst = fm_instantiate(&f, &props(&["t", "m"])).unwrap();
        assert_eq!(
            inst.render(Notation::Unicode),
            "F^0 = (p → q) ∧ (q → r) ∧ (t ∧ ¬r → s)\n\
             F^1 = (q → r) ∧ (t ∧ ¬r → s)\n\
             F^2 = t ∧ ¬r → s\n\
             F^3 = t → s\n\
             F^4 = t → s\n\
             FM = (t → s, {t, m}, {p, q, r, s})\n"
        );
    }

    #[test]
    fn example_three() {
        let program = parse_program("n :- t. p :- q, t. q :- r, not s. r :- m.").unwrap();
        let dm = dm_instantiate(&program, &parse_atoms("{l, t}").unwrap()).unwrap();
        assert_eq!(dm.to_string(), "({n :- t. p :- q, t.}, {l, t}, {n, p, q})");
        let f = fol_representation(&program).unwrap();
        let fm = fm_instantiate(&f, &props(&["l", "t"])).unwrap();
        assert_eq!(fm.module.to_string(), "(t → n, {l, t}, {m, n, p, q, r, s})");
        // F² matches the DLP instantiation
        assert_eq!(fm.trace[2].to_string(), "(t → n) ∧ (q ∧ t → p)");
    }

    #[test]
    fn program_projection() {
        let p = parse_program("a :- b.").unwrap();
        assert!(project_program(&p, &BTreeSet::new()).unwrap().rules.is_empty());
        let q = parse_program("a :- b, not c. d.").unwrap();
        assert_eq!(project_program(&q, &q.atoms()).unwrap().rules, q.rules);
        assert!(matches!(
            project_program(&parse_program("a(X) :- b(X).").unwrap(), &BTreeSet::new()),
            Err(Error::NonGround(_))
        ));
    }

    #[test]
    fn dm_instantiation_corner_cases() {
        let facts = parse_program("a. b.").unwrap();
        let dm = dm_instantiate(&facts, &BTreeSet::new()).unwrap();
        assert_eq!(dm.to_string(), "({a. b.}, {}, {a, b})");
        let unreachable = parse_program("a :- b.").unwrap();
        let dm = dm_instantiate(&unreachable, &BTreeSet::new()).unwrap();
        assert_eq!(dm.to_string(), "({}, {}, {})");
    }

    #[test]
    fn fm_on_input_only_formula_is_identity() {
        let f = parse_formula("p -> q").unwrap();
        let fm = fm_instantiate(&f, &props(&["p", "q"])).unwrap();
        assert_eq!(fm.module.formula(), f);
        assert!(fm.module.outputs().is_empty());
    }

    fn counter(volatile: &str) -> IncrementalTheory {
        let text = format!("#base.\np@(0).\n#cumulative t.\np@(t-1) -> p@(t).\n#volatile t.\n{volatile}");
        IncrementalTheory::from_formula_file(&parse_formula_file(&text).unwrap()).unwrap()
    }

    #[test]
    fn counter_theory() {
        let t = counter("#true.");
        assert!(acyclic_check(&t, 3).unwrap().is_empty());
        assert_eq!(
            k_expansion(&t, 2).unwrap().to_string(),
            "p_0 ∧ (p_0 → p_1) ∧ (p_1 → p_2) ∧ ⊤"
        );
        assert_eq!(k_expansion(&t, 0).unwrap().to_string(), "p_0 ∧ ⊤");
        let a = assemble(&t, 2).unwrap();
        let outs: Vec<String> = a.outputs().iter().map(|o| o.sorted().to_string()).collect();
        assert_eq!(outs, ["{p_0}", "{p_0, p_1}", "{p_0, p_1, p_2}"]);
        let models = incremental_solve(&t, 2, SearchConfig::default()).unwrap();
        let shown: Vec<String> = models.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["{p_0, p_1, p_2}"]);
    }

    #[test]
    fn volatile_constraint_by_step() {
        // p_3 is never derived before step 3, so a goal on it fails early
        let t = counter("~~p@(3).");
        let cfg = SearchConfig::default();
        for k in 0..=4 {
            let solved = incremental_solve(&t, k, cfg);
            let direct = answer_sets(&k_expansion(&t, k).unwrap(), cfg);
            match (solved, direct) {
                (Ok(a), Ok(b)) => {
                    assert_eq!(a, b, "k = {k}");
                    assert_eq!(a.is_empty(), k < 3, "k = {k}");
                }
                (a, b) => panic!("k = {k}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn unsatisfiable_base() {
        let t = IncrementalTheory::new(Formula::Falsity, Formula::top(), Formula::top()).unwrap();
        for k in 0..3 {
            assert!(incremental_solve(&t, k, SearchConfig::default()).unwrap().is_empty());
        }
    }

    #[test]
    fn cyclic_theory_is_rejected() {
        let file = parse_formula_file("#base.\nq.\n#cumulative t.\nq.\n#volatile t.\n#true.").unwrap();
        let t = IncrementalTheory::from_formula_file(&file).unwrap();
        let v = acyclic_check(&t, 1).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "q/0 occurs strictly positively in P[1] but already occurs in B");
        assert!(matches!(assemble(&t, 1), Err(Error::NotAcyclic(_))));
        let empty = IncrementalTheory::new(Formula::top(), Formula::top(), Formula::top()).unwrap();
        assert!(acyclic_check(&empty, 2).unwrap().is_empty());
    }

    #[test]
    fn base_may_not_use_the_counter() {
        let f = parse_formula_file("#cumulative t.\n#base.\np@(t).").unwrap();
        assert!(matches!(IncrementalTheory::from_formula_file(&f), Err(Error::UnexpectedStep(_))));
    }

    #[test]
    fn volatile_constraint_adds_no_outputs() {
        let t = counter("~p@(t).");
        let a = assemble(&t, 1).unwrap();
        assert!(a.result().outputs().same_members(a.outputs()[1]));
        assert!(incremental_solve(&t, 1, SearchConfig::default()).unwrap().is_empty());
        let m = answer_sets(&k_expansion(&t, 1).unwrap(), SearchConfig::default()).unwrap();
        assert!(m.is_empty());
        let _ = atoms_to_string;
    }
}
