//! Randomized property suites run by `modsm verify` and the acceptance
//! test. Every suite compares the implementation against a second route
//! to the same answer.

use std::collections::BTreeSet;
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use modsm_core::deps::{check_split, split_counterexample};
use modsm_core::herbrand::{
    all_extensions, answer_sets, gl_answer_sets, herbrand_models_sm, satisfies_sm, PartialInterpretation,
    SearchConfig,
};
use modsm_core::incremental::{
    acyclic_check, assemble, dm_instantiate, fm_instantiate, incremental_solve, k_expansion, project_formula,
    replace_outside, simplify, simplify_top_down, IncrementalTheory,
};
use modsm_core::module::{
    dlp_join, dlp_joinable, dlp_module_answer_sets, dlp_theorem_sides, dlp_to_fo, join, joinable,
    module_answer_sets_by_choice, module_answer_sets_by_facts, module_theorem_check, FoModule,
};
use modsm_core::program::{fol_representation, Head};
use modsm_core::{Atom, Formula, Predicate, PredicateList};

use crate::gen;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    ModuleTheorem,
    JoinLaws,
    DlpModules,
    Incremental,
    Projection,
    Splitting,
    Instantiation,
    DmFm,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Oracle,
        Suite::ModuleTheorem,
        Suite::JoinLaws,
        Suite::DlpModules,
        Suite::Incremental,
        Suite::Projection,
        Suite::Splitting,
        Suite::Instantiation,
        Suite::DmFm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::ModuleTheorem => "module-theorem",
            Suite::JoinLaws => "join-laws",
            Suite::DlpModules => "dlp-modules",
            Suite::Incremental => "incremental",
            Suite::Projection => "projection",
            Suite::Splitting => "splitting",
            Suite::Instantiation => "instantiation",
            Suite::DmFm => "dm-fm",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Instances run when no count is given.
    pub fn default_count(self) -> usize {
        match self {
            Suite::Oracle => 500,
            Suite::ModuleTheorem | Suite::JoinLaws | Suite::DlpModules => 200,
            Suite::Incremental | Suite::Splitting | Suite::Instantiation | Suite::DmFm => 100,
            Suite::Projection => 1000,
        }
    }

    /// Runs until `count` instances qualify. `bound` is the largest
    /// universe the splitting suite checks.
    pub fn run(self, count: usize, seed: u64, bound: usize, config: SearchConfig) -> SuiteReport {
        let mut report = SuiteReport {
            suite: self,
            instances: 0,
            generated: 0,
            checks: 0,
            failures: Vec::new(),
        };
        let mut rng = StdRng::seed_from_u64(seed);
        // generators may produce instances a suite has to skip
        let budget = count.saturating_mul(50).max(1);
        while report.instances < count && report.generated < budget {
            report.generated += 1;
            let outcome = match self {
                Suite::Oracle => oracle(&mut rng, config),
                Suite::ModuleTheorem => module_theorem(&mut rng, config),
                Suite::JoinLaws => join_laws(&mut rng, config),
                Suite::DlpModules => dlp_modules(&mut rng, config),
                Suite::Incremental => incremental(&mut rng, config),
                Suite::Projection => projection(&mut rng),
                Suite::Splitting => splitting(&mut rng, bound, config),
                Suite::Instantiation => instantiation(&mut rng, config),
                Suite::DmFm => dm_fm(&mut rng, config),
            };
            match outcome {
                Ok(Some(checks)) => {
                    report.instances += 1;
                    report.checks += checks;
                }
                Ok(None) => {}
                Err(failure) => {
                    report.instances += 1;
                    report.failures.push(failure);
                }
            }
        }
        report
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    /// Instances that qualified and were checked.
    pub instances: usize,
    /// Instances drawn, including skipped ones.
    pub generated: usize,
    /// Individual comparisons made.
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self, wanted: usize) -> bool {
        self.failures.is_empty() && self.instances >= wanted
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} instances ({} drawn), {} checks, {} failures",
            self.suite,
            self.instances,
            self.generated,
            self.checks,
            self.failures.len()
        )?;
        for x in self.failures.iter().take(3) {
            write!(f, "\n  {x}")?;
        }
        Ok(())
    }
}

/// `Ok(Some(n))`: checked with `n` comparisons; `Ok(None)`: skipped;
/// `Err`: a counterexample.
type Outcome = Result<Option<usize>, String>;

fn fail<E: fmt::Display>(context: impl fmt::Display) -> impl FnOnce(E) -> String {
    move |e| format!("{context}: {e}")
}

fn atom_sets(models: &[PartialInterpretation]) -> BTreeSet<BTreeSet<Atom>> {
    models.iter().map(PartialInterpretation::atoms).collect()
}

fn show_sets(sets: &BTreeSet<BTreeSet<Atom>>) -> String {
    let items: Vec<String> = sets.iter().map(modsm_core::herbrand::atoms_to_string).collect();
    format!("[{}]", items.join(" "))
}

fn oracle(rng: &mut StdRng, config: SearchConfig) -> Outcome {
    let program = gen::ground_program(rng, 6, 8);
    let ctx = || program.to_string().replace('\n', " ");
    let f = fol_representation(&program).map_err(fail(ctx()))?;
    let ours = atom_sets(&answer_sets(&f, config).map_err(fail(ctx()))?);
    let theirs: BTreeSet<BTreeSet<Atom>> = gl_answer_sets(&program, config)
        .map_err(fail(ctx()))?
        .into_iter()
        .collect();
    if ours != theirs {
        return Err(format!(
            "{}: SM gives {}, reduct gives {}",
            ctx(),
            show_sets(&ours),
            show_sets(&theirs)
        ));
    }
    Ok(Some(1))
}

fn covered(m: &FoModule) -> Vec<Predicate> {
    m.inputs().union(m.outputs()).iter().cloned().collect()
}

fn all_props(ms: &[&FoModule]) -> Vec<Predicate> {
    let set: BTreeSet<Predicate> = ms.iter().flat_map(|m| covered(m)).collect();
    set.into_iter().collect()
}

fn module_theorem(rng: &mut StdRng, config: SearchConfig) -> Outcome {
    let (m1, m2) = gen::module_pair(rng);
    if !joinable(&m1, &m2).holds() {
        return Ok(None);
    }
    let ctx = format!("{m1} and {m2}");
    let preds = all_props(&[&m1, &m2]);
    let (c1, c2) = (covered(&m1), covered(&m2));
    let mut checks = 0;
    for i in all_extensions(&PartialInterpretation::default(), &preds, config).map_err(fail(&ctx))? {
        let (i1, i2) = (i.restrict(&c1), i.restrict(&c2));
        if !module_theorem_check(&m1, &m2, &i1, &i2, config).map_err(fail(&ctx))? {
            return Err(format!("{ctx}: theorem fails at {i}"));
        }
        checks += 1;
    }
    Ok(Some(checks))
}

/// Herbrand stable models of a module over all values of its inputs.
fn module_models(m: &FoModule, config: SearchConfig) -> Result<BTreeSet<BTreeSet<Atom>>, String> {
    let extra = covered(m);
    herbrand_models_sm(&m.formula(), m.outputs(), &extra, config)
        .map(|ms| atom_sets(&ms))
        .map_err(fail(m))
}

fn compare_joins(
    what: &str,
    left: Option<FoModule>,
    right: Option<FoModule>,
    config: SearchConfig,
) -> Result<bool, String> {
    match (left, right) {
        (None, None) => Ok(false),
        (Some(l), Some(r)) => {
            let (ml, mr) = (module_models(&l, config)?, module_models(&r, config)?);
            if ml != mr {
                return Err(format!("{what}: {l} has {}, {r} has {}", show_sets(&ml), show_sets(&mr)));
            }
            Ok(true)
        }
        (l, r) => Err(format!(
            "{what}: one side is {}, the other {}",
            l.map_or("undefined".to_string(), |m| m.to_string()),
            r.map_or("undefined".to_string(), |m| m.to_string())
        )),
    }
}

fn join_laws(rng: &mut StdRng, config: SearchConfig) -> Outcome {
    let [m1, m2, m3] = gen::module_triple(rng);
    let ctx = format!("{m1}, {m2}, {m3}");
    let j = |a: &FoModule, b: &FoModule| join(a, b).ok();
    let mut checks = 0;
    compare_joins(&format!("{ctx}: commutativity"), j(&m1, &m2), j(&m2, &m1), config)?;
    checks += 1;
    let left = j(&m1, &m2).and_then(|x| j(&x, &m3));
    let right = j(&m2, &m3).and_then(|x| j(&m1, &x));
    let defined = compare_joins(&format!("{ctx}: associativity"), left, right, config)?;
    checks += 1;
    Ok(defined.then_some(checks))
}

fn subsets(atoms: &[Atom]) -> impl Iterator<Item = BTreeSet<Atom>> + '_ {
    (0..1u32 << atoms.len()).map(move |mask| {
        atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect()
    })
}

fn dlp_modules(rng: &mut StdRng, config: SearchConfig) -> Outcome {
    let (d1, d2) = gen::dlp_pair(rng);
    let ctx = format!("{d1} and {d2}");
    let mut checks = 0;
    let mut answer_sets = Vec::new();
    for d in [&d1, &d2] {
        let facts = module_answer_sets_by_facts(d, config).map_err(fail(&ctx))?;
        let choice = module_answer_sets_by_choice(d, config).map_err(fail(&ctx))?;
        if facts != choice {
            return Err(format!("{d}: input facts and choice rules disagree"));
        }
        // the same module read as a first-order module
        let fo = dlp_to_fo(d).map_err(fail(d))?;
        let by_sm: BTreeSet<BTreeSet<String>> = module_models(&fo, config)?
            .into_iter()
            .map(|x| x.iter().map(|a| a.predicate.name.clone()).collect())
            .collect();
        let by_gl: BTreeSet<BTreeSet<String>> = facts
            .iter()
            .map(|x| x.iter().map(|a| a.to_string()).collect())
            .collect();
        if by_sm != by_gl {
            return Err(format!("{d}: SM of its formula differs from its module answer sets"));
        }
        checks += 2;
        answer_sets.push(facts);
    }
    if dlp_joinable(&d1, &d2).is_some() {
        return Ok(None);
    }
    let joined = dlp_join(&d1, &d2).map_err(fail(&ctx))?;
    let whole = dlp_module_answer_sets(&joined, config).map_err(fail(&ctx))?;
    let v1: BTreeSet<Atom> = d1.inputs().union(d1.outputs()).cloned().collect();
    let v2: BTreeSet<Atom> = d2.inputs().union(d2.outputs()).cloned().collect();
    let all: Vec<Atom> = v1.union(&v2).cloned().collect();
    for x in subsets(&all) {
        let x1: BTreeSet<Atom> = x.intersection(&v1).cloned().collect();
        let x2: BTreeSet<Atom> = x.intersection(&v2).cloned().collect();
        let lhs = whole.contains(&x);
        let rhs = answer_sets[0].contains(&x1) && answer_sets[1].contains(&x2);
        if lhs != rhs {
            return Err(format!(
                "{ctx}: {} is {}an answer set of the join",
                modsm_core::herbrand::atoms_to_string(&x),
                if lhs { "" } else { "not " }
            ));
        }
        checks += 1;
    }
    // one pair through the library's own theorem check
    let x = whole.first().cloned().unwrap_or_default();
    let x1 = x.intersection(&v1).cloned().collect();
    let x2 = x.intersection(&v2).cloned().collect();
    if !dlp_theorem_sides(&d1, &d2, &x1, &x2, config).map_err(fail(&ctx))?.agree() {
        return Err(format!("{ctx}: theorem sides disagree"));
    }
    Ok(Some(checks + 1))
}

fn incremental(rng: &mut StdRng, config: SearchConfig) -> Outcome {
    let (b, p, q) = gen::incremental_theory(rng);
    let k = rng.gen_range(0..=3);
    let ctx = format!("B = {b}, P[t] = {p}, Q[t] = {q}, k = {k}");
    let t = IncrementalTheory::new(b, p, q).map_err(fail(&ctx))?;
    if !acyclic_check(&t, k).map_err(fail(&ctx))?.is_empty() {
        return Ok(None);
    }
    assemble(&t, k).map_err(fail(&ctx))?;
    let stepwise = atom_sets(&incremental_solve(&t, k, config).map_err(fail(&ctx))?);
    let expansion = k_expansion(&t, k).map_err(fail(&ctx))?;
    let direct = atom_sets(&answer_sets(&expansion, config).map_err(fail(&ctx))?);
    if stepwise != direct {
        return Err(format!(
            "{ctx}: incremental {}, expansion {}",
            show_sets(&stepwise),
            show_sets(&direct)
        ));
    }
    Ok(Some(1))
}

// ---- independent rewriting with a random redex order ----

fn is_top(f: &Formula) -> bool {
    matches!(f, Formula::Implies(a, b) if **a == Formula::Falsity && **b == Formula::Falsity)
}

fn step(f: &Formula) -> Option<Formula> {
    let bot = |g: &Formula| *g == Formula::Falsity;
    match f {
        Formula::And(a, _) | Formula::And(_, a) if bot(a) => Some(Formula::Falsity),
        Formula::And(a, b) if is_top(a) => Some((**b).clone()),
        Formula::And(a, b) if is_top(b) => Some((**a).clone()),
        Formula::Or(a, b) if bot(a) => Some((**b).clone()),
        Formula::Or(a, b) if bot(b) => Some((**a).clone()),
        Formula::Or(a, _) | Formula::Or(_, a) if is_top(a) => Some(Formula::top()),
        Formula::Implies(a, b) if bot(a) && !bot(b) => Some(Formula::top()),
        Formula::Implies(a, b) if is_top(a) => Some((**b).clone()),
        Formula::Forall(_, g) | Formula::Exists(_, g) if is_top(g) => Some(Formula::top()),
        Formula::Forall(_, g) | Formula::Exists(_, g) if bot(g) => Some(Formula::Falsity),
        _ => None,
    }
}

fn count_redexes(f: &Formula) -> usize {
    let here = usize::from(step(f).is_some());
    here + match f {
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => count_redexes(a) + count_redexes(b),
        Formula::Forall(_, g) | Formula::Exists(_, g) => count_redexes(g),
        _ => 0,
    }
}

/// Rewrites the `n`-th redex in preorder.
fn rewrite_nth(f: &Formula, n: &mut usize) -> Formula {
    if let Some(g) = step(f) {
        if *n == 0 {
            *n = usize::MAX;
            return g;
        }
        *n -= 1;
    }
    match f {
        Formula::And(a, b) => {
            let a = rewrite_nth(a, n);
            Formula::and(a, rewrite_nth(b, n))
        }
        Formula::Or(a, b) => {
            let a = rewrite_nth(a, n);
            Formula::or(a, rewrite_nth(b, n))
        }
        Formula::Implies(a, b) => {
            let a = rewrite_nth(a, n);
            Formula::implies(a, rewrite_nth(b, n))
        }
        Formula::Forall(v, g) => Formula::forall(v.clone(), rewrite_nth(g, n)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), rewrite_nth(g, n)),
        _ => f.clone(),
    }
}

/// Normal form reached by rewriting one randomly chosen redex at a time.
pub fn random_order_normal_form(f: &Formula, rng: &mut StdRng) -> Formula {
    let mut cur = f.clone();
    loop {
        let n = count_redexes(&cur);
        if n == 0 {
            return cur;
        }
        cur = rewrite_nth(&cur, &mut rng.gen_range(0..n));
    }
}

fn projection(rng: &mut StdRng) -> Outcome {
    let depth = rng.gen_range(0..=5);
    let f = gen::random_formula(rng, depth);
    let p = gen::random_projection_list(rng);
    let ctx = format!("{f} onto {p}");
    let once = project_formula(&f, &p);
    if project_formula(&once, &p) != once {
        return Err(format!("{ctx}: projecting twice changes {once}"));
    }
    if let Some(q) = once.predicates().into_iter().find(|q| !p.contains(q)) {
        return Err(format!("{ctx}: {} survives", q.qualified()));
    }
    let replaced = replace_outside(&f, &p);
    let bottom_up = simplify(&replaced);
    let top_down = simplify_top_down(&replaced);
    let random = random_order_normal_form(&replaced, rng);
    if bottom_up != top_down || bottom_up != random || bottom_up != once {
        return Err(format!(
            "{ctx}: bottom-up {bottom_up}, top-down {top_down}, random order {random}"
        ));
    }
    Ok(Some(3))
}

fn every_interpretation(
    preds: &BTreeSet<Predicate>,
    config: SearchConfig,
) -> Result<Vec<PartialInterpretation>, String> {
    let preds: Vec<Predicate> = preds.iter().cloned().collect();
    all_extensions(&PartialInterpretation::default(), &preds, config).map_err(|e| e.to_string())
}

/// The splitting lemma (`F` on both sides) and the extended splitting
/// theorem (own rules of each side plus the mixed ones as `H`), on unary
/// rules checked over every structure up to `bound` elements.
fn splitting(rng: &mut StdRng, bound: usize, config: SearchConfig) -> Outcome {
    let names = gen::prop_names(rng.gen_range(2..=4));
    let (p_names, q_names): (Vec<String>, Vec<String>) = names.iter().cloned().partition(|_| rng.gen_bool(0.5));
    let mut own_p = Vec::new();
    let mut own_q = Vec::new();
    let mut mixed = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let r = gen::rule_formula(rng, &names, &names);
        let heads = modsm_core::polarity::strictly_positive_predicates(&r);
        let in_p = heads.iter().all(|h| p_names.contains(&h.name));
        let in_q = heads.iter().all(|h| q_names.contains(&h.name));
        let r = gen::unary(&r);
        match (in_p, in_q) {
            (true, false) => own_p.push(r),
            (false, true) => own_q.push(r),
            _ => mixed.push(r),
        }
    }
    let (p, q) = (gen::unary_preds(&p_names), gen::unary_preds(&q_names));
    let f = Formula::conjunction(own_p);
    let g = Formula::conjunction(own_q);
    let h = Formula::conjunction(mixed);
    let whole = Formula::conjunction([f.clone(), g.clone(), h.clone()]);
    let ctx = format!("F = {f}, G = {g}, H = {h}, p = {p}, q = {q}");
    let top = Formula::top();
    let mut checks = 0;
    if check_split(&top, &top, &whole, &p, &q).holds() {
        if let Some(i) = split_counterexample(&top, &top, &whole, &p, &q, bound, config).map_err(fail(&ctx))? {
            return Err(format!("{ctx}: splitting lemma fails at {i}"));
        }
        checks += 1;
    }
    if check_split(&f, &g, &h, &p, &q).holds() {
        if let Some(i) = split_counterexample(&f, &g, &h, &p, &q, bound, config).map_err(fail(&ctx))? {
            return Err(format!("{ctx}: extended splitting fails at {i}"));
        }
        checks += 1;
    }
    Ok((checks > 0).then_some(checks))
}

fn instantiation(rng: &mut StdRng, config: SearchConfig) -> Outcome {
    let atoms = gen::prop_names(rng.gen_range(2..=5));
    let conjuncts: Vec<Formula> = (0..rng.gen_range(1..=4))
        .map(|_| gen::rule_formula(rng, &atoms, &atoms))
        .collect();
    let f = Formula::conjunction(conjuncts.iter().cloned());
    let inputs: Vec<String> = atoms.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
    let inputs = gen::props(&inputs);
    let ctx = format!("{f} with inputs {inputs}");
    let fm = fm_instantiate(&f, &inputs).map_err(fail(&ctx))?;
    let iterations = fm.trace.len() - 1;
    if iterations > conjuncts.len() + 2 {
        return Err(format!("{ctx}: {iterations} iterations"));
    }
    let rest = PredicateList::from(f.predicates()).difference(&inputs);
    let g = fm.module.formula();
    let mut checks = 1;
    let preds: BTreeSet<Predicate> = f.predicates().into_iter().chain(inputs.iter().cloned()).collect();
    for i in every_interpretation(&preds, config).map_err(fail(&ctx))? {
        let original = satisfies_sm(&i, &f, &rest, config).map_err(fail(&ctx))?;
        let instantiated = satisfies_sm(&i, &g, fm.module.outputs(), config).map_err(fail(&ctx))?;
        if original != instantiated {
            return Err(format!("{ctx}: FM = {g} differs at {i}"));
        }
        checks += 1;
    }
    Ok(Some(checks))
}

fn dm_fm(rng: &mut StdRng, config: SearchConfig) -> Outcome {
    let program = gen::ground_program(rng, 5, 6);
    if program.rules.iter().any(|r| matches!(r.head, Head::Choice(_))) {
        return Ok(None);
    }
    // an input that is also a head atom would be an output of DM as well
    let heads = program.head_atoms();
    let atoms: Vec<Atom> = program.atoms().into_iter().filter(|a| !heads.contains(a)).collect();
    let inputs: BTreeSet<Atom> = atoms.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    let ctx = format!(
        "{} with inputs {}",
        program.to_string().replace('\n', " "),
        modsm_core::herbrand::atoms_to_string(&inputs)
    );
    let dm = dm_instantiate(&program, &inputs).map_err(fail(&ctx))?;
    let by_dm: BTreeSet<BTreeSet<Atom>> = dlp_module_answer_sets(&dm, config)
        .map_err(fail(&ctx))?
        .into_iter()
        .collect();
    let f = fol_representation(&program).map_err(fail(&ctx))?;
    let input_preds = PredicateList::dedup_from(inputs.iter().map(|a| a.predicate.clone()));
    let fm = fm_instantiate(&f, &input_preds).map_err(fail(&ctx))?;
    let by_fm = module_models(&fm.module, config)?;
    if by_dm != by_fm {
        return Err(format!(
            "{ctx}: DM = {dm} gives {}, FM = {} gives {}",
            show_sets(&by_dm),
            fm.module,
            show_sets(&by_fm)
        ));
    }
    Ok(Some(1))
}
