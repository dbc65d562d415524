//! First-order modules and their join, plus ground DLP modules as the
//! propositional special case.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::deps::{dependency_graph, DependencyGraph};
use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, Predicate, PredicateList};
use crate::herbrand::{gl_answer_sets, satisfies_sm, stable_models, PartialInterpretation, SearchConfig};
use crate::polarity::strictly_positive_witness;
use crate::program::{BodyLiteral, HeadLiteral, Program, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinFailure {
    SharedOutputs(Vec<Predicate>),
    MixedComponent(Vec<Predicate>),
    LeftNotNegative(Predicate),
    RightNotNegative(Predicate),
    /// A rule of the first program defines an output of the second but is
    /// missing from the second program.
    LeftRuleMissing(String),
    RightRuleMissing(String),
}

impl fmt::Display for JoinFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JoinFailure::SharedOutputs(ps) => {
                write!(f, "output lists overlap on {}", PredicateList::dedup_from(ps.iter().cloned()))
            }
            JoinFailure::MixedComponent(ps) => write!(
                f,
                "strongly connected component {} mixes outputs of both modules",
                PredicateList::dedup_from(ps.iter().cloned())
            ),
            JoinFailure::LeftNotNegative(p) => write!(
                f,
                "first module's own conjuncts are not negative on the second's outputs: {} occurs strictly positively",
                p.qualified()
            ),
            JoinFailure::RightNotNegative(p) => write!(
                f,
                "second module's own conjuncts are not negative on the first's outputs: {} occurs strictly positively",
                p.qualified()
            ),
            JoinFailure::LeftRuleMissing(r) => write!(
                f,
                "rule `{r}` of the first module defines an output of the second but is not in the second"
            ),
            JoinFailure::RightRuleMissing(r) => write!(
                f,
                "rule `{r}` of the second module defines an output of the first but is not in the first"
            ),
        }
    }
}

/// `(F, I, O)` with `F` kept as its list of conjuncts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoModule {
    conjuncts: Vec<Formula>,
    inputs: PredicateList,
    outputs: PredicateList,
}

impl FoModule {
    pub fn new(conjuncts: Vec<Formula>, inputs: PredicateList, outputs: PredicateList) -> Result<Self> {
        if let Some(p) = inputs.iter().find(|p| outputs.contains(p)) {
            return Err(Error::InvalidModule(format!(
                "{} is both an input and an output",
                p.qualified()
            )));
        }
        for c in &conjuncts {
            if let Some(v) = c.free_variables().into_iter().next() {
                return Err(Error::FreeVariable(v));
            }
            if let Some(p) = c
                .predicates()
                .into_iter()
                .find(|p| !inputs.contains(p) && !outputs.contains(p))
            {
                return Err(Error::InvalidModule(format!(
                    "{} occurs in the formula but is neither an input nor an output",
                    p.qualified()
                )));
            }
        }
        Ok(FoModule {
            conjuncts,
            inputs,
            outputs,
        })
    }

    /// Splits `f` into its top-level conjuncts.
    pub fn from_formula(f: &Formula, inputs: PredicateList, outputs: PredicateList) -> Result<Self> {
        Self::new(f.conjuncts().into_iter().cloned().collect(), inputs, outputs)
    }

    /// `(⊤, ∅, ∅)`
    pub fn empty() -> Self {
        FoModule {
            conjuncts: alloc::vec![Formula::top()],
            inputs: PredicateList::empty(),
            outputs: PredicateList::empty(),
        }
    }

    pub fn conjuncts(&self) -> &[Formula] {
        &self.conjuncts
    }

    pub fn formula(&self) -> Formula {
        Formula::conjunction(self.conjuncts.iter().cloned())
    }

    pub fn inputs(&self) -> &PredicateList {
        &self.inputs
    }

    pub fn outputs(&self) -> &PredicateList {
        &self.outputs
    }

    /// `I ⊨ SM[F; O]`
    pub fn is_stable_model(&self, i: &PartialInterpretation, config: SearchConfig) -> Result<bool> {
        for o in &self.outputs {
            if !i.covers(o) {
                return Err(Error::Uncovered(o.qualified()));
            }
        }
        satisfies_sm(i, &self.formula(), &self.outputs, config)
    }

    /// Stable models agreeing with `inputs` outside the outputs.
    pub fn stable_models(
        &self,
        inputs: &PartialInterpretation,
        config: SearchConfig,
    ) -> Result<Vec<PartialInterpretation>> {
        stable_models(&self.formula(), &self.outputs, inputs, config)
    }
}

impl fmt::Display for FoModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.formula(), self.inputs, self.outputs)
    }
}

/// How two modules factor as `F1 ∧ H` and `F2 ∧ H`, and whether they join.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinReport {
    pub shared: Vec<Formula>,
    pub left_rest: Vec<Formula>,
    pub right_rest: Vec<Formula>,
    pub graph: DependencyGraph,
    pub components: Vec<Vec<Predicate>>,
    pub failure: Option<JoinFailure>,
}

impl JoinReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for JoinReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "shared: ")?;
        if self.shared.is_empty() {
            write!(f, "none")?;
        } else {
            write!(f, "{}", Formula::conjunction(self.shared.iter().cloned()))?;
        }
        match &self.failure {
            None => write!(f, "\njoinable"),
            Some(e) => write!(f, "\nnot joinable: {e}"),
        }
    }
}

/// Removes one alpha-equivalent copy of each of `wanted` from `from`.
fn take_matches(from: &[Formula], wanted: &[Formula]) -> Option<Vec<Formula>> {
    let mut used = alloc::vec![false; from.len()];
    for w in wanted {
        let k = (0..from.len()).find(|&k| !used[k] && from[k].alpha_eq(w))?;
        used[k] = true;
    }
    Some(
        from.iter()
            .zip(&used)
            .filter(|(_, u)| !**u)
            .map(|(c, _)| c.clone())
            .collect(),
    )
}

/// The largest multiset of conjuncts the two modules share, in the first
/// module's order.
pub fn shared_conjuncts(m1: &FoModule, m2: &FoModule) -> Vec<Formula> {
    let mut used = alloc::vec![false; m2.conjuncts.len()];
    let mut shared = Vec::new();
    for c in &m1.conjuncts {
        if let Some(k) = (0..used.len()).find(|&k| !used[k] && m2.conjuncts[k].alpha_eq(c)) {
            used[k] = true;
            shared.push(c.clone());
        }
    }
    shared
}

pub fn joinable(m1: &FoModule, m2: &FoModule) -> JoinReport {
    let shared = shared_conjuncts(m1, m2);
    joinable_with_shared(m1, m2, &shared).expect("shared part is taken from both")
}

/// Joinability with `H` given explicitly; each member of `shared` must be a
/// conjunct of both modules.
pub fn joinable_with_shared(m1: &FoModule, m2: &FoModule, shared: &[Formula]) -> Result<JoinReport> {
    let missing = |side: &str| {
        Error::InvalidModule(format!("declared shared conjuncts are not all conjuncts of the {side} module"))
    };
    let left_rest = take_matches(&m1.conjuncts, shared).ok_or_else(|| missing("first"))?;
    let right_rest = take_matches(&m2.conjuncts, shared).ok_or_else(|| missing("second"))?;
    let outputs = m1.outputs.union(&m2.outputs);
    let whole = Formula::conjunction(
        left_rest
            .iter()
            .chain(&right_rest)
            .chain(shared)
            .cloned(),
    );
    let graph = dependency_graph(&whole, &outputs);
    let components = graph.strongly_connected_components();

    let overlap: Vec<Predicate> = m1.outputs.intersection(&m2.outputs).iter().cloned().collect();
    let failure = if !overlap.is_empty() {
        Some(JoinFailure::SharedOutputs(overlap))
    } else if let Some(c) = components
        .iter()
        .find(|c| !c.iter().all(|x| m1.outputs.contains(x)) && !c.iter().all(|x| m2.outputs.contains(x)))
    {
        Some(JoinFailure::MixedComponent(c.clone()))
    } else if let Some(w) =
        strictly_positive_witness(&Formula::conjunction(left_rest.iter().cloned()), &m2.outputs)
    {
        Some(JoinFailure::LeftNotNegative(w))
    } else {
        strictly_positive_witness(&Formula::conjunction(right_rest.iter().cloned()), &m1.outputs)
            .map(JoinFailure::RightNotNegative)
    };
    Ok(JoinReport {
        shared: shared.to_vec(),
        left_rest,
        right_rest,
        graph,
        components,
        failure,
    })
}

fn join_from_report(m1: &FoModule, m2: &FoModule, report: JoinReport) -> Result<FoModule> {
    if let Some(e) = report.failure {
        return Err(Error::NotJoinable(e));
    }
    let outputs = m1.outputs.union(&m2.outputs);
    let inputs = m1.inputs.union(&m2.inputs).difference(&outputs);
    let conjuncts = report
        .left_rest
        .into_iter()
        .chain(report.right_rest)
        .chain(report.shared)
        .collect();
    FoModule::new(conjuncts, inputs, outputs)
}

pub fn join(m1: &FoModule, m2: &FoModule) -> Result<FoModule> {
    join_from_report(m1, m2, joinable(m1, m2))
}

pub fn join_with_shared(m1: &FoModule, m2: &FoModule, shared: &[Formula]) -> Result<FoModule> {
    join_from_report(m1, m2, joinable_with_shared(m1, m2, shared)?)
}

/// Both sides of the module theorem for one pair of partial
/// interpretations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TheoremSides {
    pub joined: bool,
    pub first: bool,
    pub second: bool,
}

impl TheoremSides {
    pub fn agree(&self) -> bool {
        self.joined == (self.first && self.second)
    }
}

fn check_coverage(m: &FoModule, i: &PartialInterpretation) -> Result<()> {
    let f = m.formula();
    for p in f.predicates().iter().chain(m.outputs.iter()) {
        if !i.covers(p) {
            return Err(Error::Uncovered(p.qualified()));
        }
    }
    let sig = crate::formula::symbols_of(&f);
    if let Some(o) = sig.objects.iter().find(|o| !i.objects().contains_key(*o)) {
        return Err(Error::Uncovered(o.clone()));
    }
    Ok(())
}

/// Evaluates `I1 ∪ I2 ⊨ SM[M1 ⊔ M2]` and `I1 ⊨ SM[M1]`, `I2 ⊨ SM[M2]`.
pub fn module_theorem_sides(
    m1: &FoModule,
    m2: &FoModule,
    i1: &PartialInterpretation,
    i2: &PartialInterpretation,
    config: SearchConfig,
) -> Result<TheoremSides> {
    let joined = join(m1, m2)?;
    check_coverage(m1, i1)?;
    check_coverage(m2, i2)?;
    let union = i1.union(i2)?;
    Ok(TheoremSides {
        joined: joined.is_stable_model(&union, config)?,
        first: m1.is_stable_model(i1, config)?,
        second: m2.is_stable_model(i2, config)?,
    })
}

pub fn module_theorem_check(
    m1: &FoModule,
    m2: &FoModule,
    i1: &PartialInterpretation,
    i2: &PartialInterpretation,
    config: SearchConfig,
) -> Result<bool> {
    Ok(module_theorem_sides(m1, m2, i1, i2, config)?.agree())
}

// ---- ground DLP modules ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlpModule {
    program: Program,
    inputs: BTreeSet<Atom>,
    outputs: BTreeSet<Atom>,
}

impl DlpModule {
    pub fn new(program: Program, inputs: BTreeSet<Atom>, outputs: BTreeSet<Atom>) -> Result<Self> {
        if let Some(r) = program.rules.iter().find(|r| !r.is_ground()) {
            return Err(Error::NonGround(r.to_string()));
        }
        if let Some(r) = program.rules.iter().find(|r| r.aggregates().next().is_some()) {
            return Err(Error::Aggregate(r.to_string()));
        }
        if let Some(a) = inputs.intersection(&outputs).next() {
            return Err(Error::InvalidModule(format!("{a} is both an input and an output")));
        }
        if let Some(a) = program
            .atoms()
            .into_iter()
            .find(|a| !inputs.contains(a) && !outputs.contains(a))
        {
            return Err(Error::InvalidModule(format!(
                "{a} occurs in the program but is neither an input nor an output"
            )));
        }
        if let Some(r) = program.rules.iter().find(|r| {
            let heads = r.head_atoms();
            !heads.is_empty() && !heads.iter().any(|a| outputs.contains(*a))
        }) {
            return Err(Error::InvalidModule(format!("rule `{r}` has no output atom in its head")));
        }
        Ok(DlpModule {
            program,
            inputs,
            outputs,
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn inputs(&self) -> &BTreeSet<Atom> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<Atom> {
        &self.outputs
    }

    fn with_rules(&self, extra: impl IntoIterator<Item = Rule>) -> Result<Program> {
        let mut rules = self.program.rules.clone();
        rules.extend(extra);
        Program::new(rules)
    }
}

impl fmt::Display for DlpModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |atoms: &BTreeSet<Atom>| crate::herbrand::atoms_to_string(atoms);
        write!(f, "({{")?;
        for (k, r) in self.program.rules.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}, {}, {})", set(&self.inputs), set(&self.outputs))
    }
}

/// Module answer sets by adding the chosen inputs as facts.
pub fn module_answer_sets_by_facts(d: &DlpModule, config: SearchConfig) -> Result<Vec<BTreeSet<Atom>>> {
    let inputs: Vec<&Atom> = d.inputs.iter().collect();
    if inputs.len() >= 63 {
        return Err(Error::CandidateLimit {
            count: u128::MAX,
            limit: config.max_candidates,
        });
    }
    let mut out = Vec::new();
    for mask in 0..1u64 << inputs.len() {
        let chosen: BTreeSet<Atom> = inputs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, a)| (*a).clone())
            .collect();
        let program = d.with_rules(chosen.iter().cloned().map(Rule::fact))?;
        for x in gl_answer_sets(&program, config)? {
            let x_inputs: BTreeSet<Atom> = x.intersection(&d.inputs).cloned().collect();
            if x_inputs == chosen {
                out.push(x);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Module answer sets with a choice rule for every input atom.
pub fn module_answer_sets_by_choice(d: &DlpModule, config: SearchConfig) -> Result<Vec<BTreeSet<Atom>>> {
    let program = d.with_rules(d.inputs.iter().map(|a| Rule::choice(a.clone(), Vec::new())))?;
    gl_answer_sets(&program, config)
}

/// Module answer sets, computed both ways; a disagreement is reported as
/// an internal error.
pub fn dlp_module_answer_sets(d: &DlpModule, config: SearchConfig) -> Result<Vec<BTreeSet<Atom>>> {
    let by_choice = module_answer_sets_by_choice(d, config)?;
    let by_facts = module_answer_sets_by_facts(d, config)?;
    if by_choice != by_facts {
        return Err(Error::Internal(format!(
            "choice and fact formulations disagree on {d}"
        )));
    }
    Ok(by_choice)
}

/// Ground atoms as 0-ary predicates named by the atom's text.
pub fn atom_predicate(a: &Atom) -> Predicate {
    Predicate::new(a.to_string(), 0)
}

fn propositional_rule(r: &Rule) -> Result<Rule> {
    r.try_map_atoms(|a| Ok(Atom::new(a.to_string(), Vec::new())))
}

pub fn dlp_to_fo(d: &DlpModule) -> Result<FoModule> {
    let conjuncts = if d.program.rules.is_empty() {
        alloc::vec![Formula::top()]
    } else {
        d.program
            .rules
            .iter()
            .map(|r| propositional_rule(r)?.to_formula())
            .collect::<Result<Vec<_>>>()?
    };
    let inputs = PredicateList::new(d.inputs.iter().map(atom_predicate).collect())?;
    let outputs = PredicateList::new(d.outputs.iter().map(atom_predicate).collect())?;
    FoModule::new(conjuncts, inputs, outputs)
}

/// Edges from head atoms to positive body atoms, outputs as vertices.
pub fn dlp_dependency_graph(rules: &[Rule], outputs: &BTreeSet<Atom>) -> DependencyGraph {
    let mut edges = BTreeSet::new();
    for r in rules {
        for h in r.head_atoms() {
            if !outputs.contains(h) {
                continue;
            }
            for b in r.body.iter() {
                if let BodyLiteral::Pos(b) = b {
                    if outputs.contains(b) {
                        edges.insert((atom_predicate(h), atom_predicate(b)));
                    }
                }
            }
        }
    }
    DependencyGraph {
        vertices: outputs.iter().map(atom_predicate).collect(),
        edges,
    }
}

pub fn dlp_joinable(d1: &DlpModule, d2: &DlpModule) -> Option<JoinFailure> {
    let overlap: Vec<Predicate> = d1.outputs.intersection(&d2.outputs).map(atom_predicate).collect();
    if !overlap.is_empty() {
        return Some(JoinFailure::SharedOutputs(overlap));
    }
    let rules: Vec<Rule> = d1.program.rules.iter().chain(&d2.program.rules).cloned().collect();
    let outputs: BTreeSet<Atom> = d1.outputs.union(&d2.outputs).cloned().collect();
    let o1: BTreeSet<Predicate> = d1.outputs.iter().map(atom_predicate).collect();
    let o2: BTreeSet<Predicate> = d2.outputs.iter().map(atom_predicate).collect();
    let graph = dlp_dependency_graph(&rules, &outputs);
    if let Some(c) = graph
        .strongly_connected_components()
        .into_iter()
        .find(|c| !c.iter().all(|x| o1.contains(x)) && !c.iter().all(|x| o2.contains(x)))
    {
        return Some(JoinFailure::MixedComponent(c));
    }
    let defines = |r: &Rule, outs: &BTreeSet<Atom>| r.head_atoms().iter().any(|a| outs.contains(*a));
    if let Some(r) = d1
        .program
        .rules
        .iter()
        .find(|r| defines(r, &d2.outputs) && !d2.program.rules.contains(r))
    {
        return Some(JoinFailure::LeftRuleMissing(r.to_string()));
    }
    d2.program
        .rules
        .iter()
        .find(|r| defines(r, &d1.outputs) && !d1.program.rules.contains(r))
        .map(|r| JoinFailure::RightRuleMissing(r.to_string()))
}

pub fn dlp_join(d1: &DlpModule, d2: &DlpModule) -> Result<DlpModule> {
    if let Some(e) = dlp_joinable(d1, d2) {
        return Err(Error::NotJoinable(e));
    }
    let mut rules = d1.program.rules.clone();
    for r in &d2.program.rules {
        if !rules.contains(r) {
            rules.push(r.clone());
        }
    }
    let outputs: BTreeSet<Atom> = d1.outputs.union(&d2.outputs).cloned().collect();
    let inputs = d1
        .inputs
        .union(&d2.inputs)
        .filter(|a| !outputs.contains(*a))
        .cloned()
        .collect();
    DlpModule::new(Program::new(rules)?, inputs, outputs)
}

/// `X1 ∩ A = X2 ∩ A`
pub fn compatible_on(x1: &BTreeSet<Atom>, x2: &BTreeSet<Atom>, a: &BTreeSet<Atom>) -> bool {
    x1.intersection(a).eq(x2.intersection(a))
}

/// Both sides of the DLP module theorem for compatible `X1`, `X2`.
pub fn dlp_theorem_sides(
    d1: &DlpModule,
    d2: &DlpModule,
    x1: &BTreeSet<Atom>,
    x2: &BTreeSet<Atom>,
    config: SearchConfig,
) -> Result<TheoremSides> {
    let v1: BTreeSet<Atom> = d1.inputs.union(&d1.outputs).cloned().collect();
    let v2: BTreeSet<Atom> = d2.inputs.union(&d2.outputs).cloned().collect();
    let shared: BTreeSet<Atom> = v1.intersection(&v2).cloned().collect();
    if !compatible_on(x1, x2, &shared) {
        return Err(Error::Incompatible("atom sets differ on shared atoms".to_string()));
    }
    let joined = dlp_join(d1, d2)?;
    let union: BTreeSet<Atom> = x1.union(x2).cloned().collect();
    Ok(TheoremSides {
        joined: dlp_module_answer_sets(&joined, config)?.contains(&union),
        first: dlp_module_answer_sets(d1, config)?.contains(x1),
        second: dlp_module_answer_sets(d2, config)?.contains(x2),
    })
}

/// Head literals of a rule as written, for callers building modules.
pub fn head_atoms_of(r: &Rule) -> Vec<Atom> {
    r.head_literals().iter().map(HeadLiteral::atom).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herbrand::{atoms_to_string, PartialInterpretation};
    use crate::syntax::{parse_atoms, parse_formula, parse_program};

    fn atoms(s: &str) -> BTreeSet<Atom> {
        parse_atoms(s).unwrap()
    }

    fn props(names: &[&str]) -> PredicateList {
        PredicateList::new(names.iter().map(|n| Predicate::new(*n, 0)).collect()).unwrap()
    }

    fn pi1() -> DlpModule {
        DlpModule::new(parse_program("p | q :- r. s.").unwrap(), atoms("{q, r}"), atoms("{p, s}")).unwrap()
    }

    fn pi2() -> DlpModule {
        DlpModule::new(parse_program("p | q :- r. t.").unwrap(), atoms("{p, r}"), atoms("{q, t}")).unwrap()
    }

    #[test]
    fn lifting_the_dlp_modules() {
        let m1 = dlp_to_fo(&pi1()).unwrap();
        let m2 = dlp_to_fo(&pi2()).unwrap();
        assert_eq!(m1.to_string(), "((r → p ∨ q) ∧ s, {q, r}, {p, s})");
        assert_eq!(m2.to_string(), "((r → p ∨ q) ∧ t, {p, r}, {q, t})");
        let empty = DlpModule::new(Program::default(), BTreeSet::new(), BTreeSet::new()).unwrap();
        assert_eq!(dlp_to_fo(&empty).unwrap().to_string(), "(⊤, {}, {})");
    }

    #[test]
    fn fo_join_of_the_lifted_modules() {
        let m1 = dlp_to_fo(&pi1()).unwrap();
        let m2 = dlp_to_fo(&pi2()).unwrap();
        let report = joinable(&m1, &m2);
        assert!(report.holds(), "{report}");
        assert_eq!(report.shared, [parse_formula("r -> p | q").unwrap()]);
        let j = join(&m1, &m2).unwrap();
        assert_eq!(j.to_string(), "(s ∧ t ∧ (r → p ∨ q), {r}, {p, s, q, t})");
        // commutes up to conjunct order
        let k = join(&m2, &m1).unwrap();
        assert_eq!(k.inputs(), j.inputs());
        assert!(k.outputs().same_members(j.outputs()));
    }

    #[test]
    fn dlp_join_of_the_modules() {
        assert_eq!(dlp_joinable(&pi1(), &pi2()), None);
        let j = dlp_join(&pi1(), &pi2()).unwrap();
        assert_eq!(j.to_string(), "({p ; q :- r. s. t.}, {r}, {p, q, s, t})");
    }

    #[test]
    fn overlapping_outputs_do_not_join() {
        let a = FoModule::from_formula(&parse_formula("p").unwrap(), PredicateList::empty(), props(&["p"])).unwrap();
        let r = joinable(&a, &a);
        assert_eq!(r.failure, Some(JoinFailure::SharedOutputs(alloc::vec![Predicate::new("p", 0)])));
        assert!(matches!(join(&a, &a), Err(Error::NotJoinable(_))));
    }

    #[test]
    fn empty_module_is_neutral() {
        let m = FoModule::from_formula(&parse_formula("q -> p").unwrap(), props(&["q"]), props(&["p"])).unwrap();
        let j = join(&m, &FoModule::empty()).unwrap();
        assert_eq!(j.to_string(), "((q → p) ∧ ⊤, {q}, {p})");
    }

    #[test]
    fn module_validation() {
        let f = parse_formula("q -> p").unwrap();
        assert!(matches!(
            FoModule::from_formula(&f, PredicateList::empty(), props(&["p"])),
            Err(Error::InvalidModule(_))
        ));
        assert!(matches!(
            FoModule::from_formula(&f, props(&["p", "q"]), props(&["p"])),
            Err(Error::InvalidModule(_))
        ));
        assert!(matches!(
            DlpModule::new(parse_program("p :- q.").unwrap(), atoms("{p, q}"), BTreeSet::new()),
            Err(Error::InvalidModule(_))
        ));
    }

    #[test]
    fn module_answer_sets_of_the_first_module() {
        let cfg = SearchConfig::default();
        let shown: Vec<String> = dlp_module_answer_sets(&pi1(), cfg)
            .unwrap()
            .iter()
            .map(atoms_to_string)
            .collect();
        assert_eq!(shown, ["{p, r, s}", "{q, r, s}", "{q, s}", "{s}"]);
        let empty = DlpModule::new(Program::default(), BTreeSet::new(), BTreeSet::new()).unwrap();
        assert_eq!(dlp_module_answer_sets(&empty, cfg).unwrap(), [BTreeSet::new()]);
        let fact = DlpModule::new(parse_program("p.").unwrap(), BTreeSet::new(), atoms("{p}")).unwrap();
        assert_eq!(dlp_module_answer_sets(&fact, cfg).unwrap(), [atoms("{p}")]);
    }

    #[test]
    fn theorem_on_the_lifted_modules() {
        let cfg = SearchConfig::default();
        let m1 = dlp_to_fo(&pi1()).unwrap();
        let m2 = dlp_to_fo(&pi2()).unwrap();
        let i1 = PartialInterpretation::from_atoms(&BTreeSet::new(), props(&["p", "q", "r", "s"]).iter().cloned(), &atoms("{s}")).unwrap();
        let i2 = PartialInterpretation::from_atoms(&BTreeSet::new(), props(&["p", "q", "r", "t"]).iter().cloned(), &atoms("{t}")).unwrap();
        let sides = module_theorem_sides(&m1, &m2, &i1, &i2, cfg).unwrap();
        assert_eq!(sides, TheoremSides { joined: true, first: true, second: true });
        let bad = PartialInterpretation::from_atoms(&BTreeSet::new(), props(&["p", "q", "r", "t"]).iter().cloned(), &atoms("{t, r}")).unwrap();
        assert!(matches!(module_theorem_check(&m1, &m2, &i1, &bad, cfg), Err(Error::Incompatible(_))));
    }

    #[test]
    fn dlp_theorem_on_the_modules() {
        let cfg = SearchConfig::default();
        let sides = dlp_theorem_sides(&pi1(), &pi2(), &atoms("{s}"), &atoms("{t}"), cfg).unwrap();
        assert!(sides.agree() && sides.joined);
        let sides = dlp_theorem_sides(&pi1(), &pi2(), &atoms("{p, r, s}"), &atoms("{p, r, t}"), cfg).unwrap();
        assert!(sides.agree() && sides.joined);
    }

    #[test]
    fn missing_shared_rule_blocks_the_dlp_join() {
        let a = DlpModule::new(parse_program("p | q :- r.").unwrap(), atoms("{q, r}"), atoms("{p}")).unwrap();
        let b = DlpModule::new(parse_program("q :- r.").unwrap(), atoms("{r}"), atoms("{q}")).unwrap();
        assert!(matches!(dlp_joinable(&a, &b), Some(JoinFailure::LeftRuleMissing(_))));
    }

    #[test]
    fn explicit_shared_part() {
        let m1 = dlp_to_fo(&pi1()).unwrap();
        let m2 = dlp_to_fo(&pi2()).unwrap();
        // declaring nothing shared leaves r → p ∨ q on both sides
        let r = joinable_with_shared(&m1, &m2, &[]).unwrap();
        assert_eq!(r.failure, Some(JoinFailure::LeftNotNegative(Predicate::new("q", 0))));
        assert!(joinable_with_shared(&m1, &m2, &[parse_formula("u").unwrap()]).is_err());
    }
}
