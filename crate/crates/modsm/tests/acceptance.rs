//! One line per acceptance criterion. Runs without the test harness so
//! the lines are always printed; exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use modsm::cli::run_args;
use modsm::io::{load_module, load_source};
use modsm::suites::Suite;
use modsm_core::deps::check_split;
use modsm_core::herbrand::{
    all_extensions, answer_sets, gl_answer_sets, satisfies_sm, PartialInterpretation, SearchConfig,
};
use modsm_core::incremental::{dm_instantiate, fm_instantiate, project_formula};
use modsm_core::module::{join, joinable, module_theorem_check};
use modsm_core::program::{fol_representation, ground_program};
use modsm_core::syntax::{parse_atoms, parse_formula, parse_program};
use modsm_core::{Atom, Formula, Predicate, PredicateList};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn preds(items: &[(&str, usize)]) -> PredicateList {
    PredicateList::new(items.iter().map(|(n, a)| Predicate::new(*n, *a)).collect()).unwrap()
}

fn atoms(text: &str) -> BTreeSet<Atom> {
    parse_atoms(text).unwrap()
}

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let file = data("pqr.lp");
    let out = run_args(["modsm", "solve", file.to_str().unwrap()]);
    let elapsed = start.elapsed();
    ensure(out.exit_code() == 0, format!("exit {}: {}", out.exit_code(), out.stderr))?;
    ensure(
        out.stdout == "{p(a), q(b), r(a)}\n",
        format!("got {:?}", out.stdout),
    )?;
    // grounding plus the reduct, independently of SM
    let program = parse_program(&std::fs::read_to_string(&file).unwrap()).map_err(err)?;
    let ground = ground_program(&program, &program.signature).map_err(err)?;
    let oracle = gl_answer_sets(&ground, SearchConfig::default()).map_err(err)?;
    ensure(oracle == vec![atoms("{p(a), q(b), r(a)}")], "reduct oracle disagrees")?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("solve prints {{p(a), q(b), r(a)}} in {elapsed:.2?}"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let f1 = load_source(&data("pqr.lp")).map_err(err)?.formula().map_err(err)?;
    let f2 = parse_formula(
        "forall x ((p(x) -> x = a) & (x = a -> p(x))) \
         & forall x ((q(x) -> x = b) & (x = b -> q(x))) \
         & forall x ((r(x) -> p(x) & ~q(x)) & (p(x) & ~q(x) -> r(x)))",
    )
    .map_err(err)?;
    let p = PredicateList::from(f1.predicates());
    let base = PartialInterpretation::herbrand(&["a".to_string(), "b".to_string()]);
    let all = all_extensions(&base, p.as_slice(), SearchConfig::default()).map_err(err)?;
    ensure(all.len() == 64, format!("{} interpretations", all.len()))?;
    let mut models = 0;
    for i in &all {
        let sm = satisfies_sm(i, &f1, &p, SearchConfig::default()).map_err(err)?;
        let fo = i.evaluate(&f2).map_err(err)?;
        ensure(sm == fo, format!("differ at {i}"))?;
        models += usize::from(sm);
    }
    ensure(models == 1, format!("{models} models"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("SM and its completion agree on all 64 Herbrand interpretations in {elapsed:.2?}"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let config = SearchConfig::default();
    let h = parse_formula("r -> p | q").unwrap();
    let s = Formula::prop("s");
    let t = Formula::prop("t");
    let six = Formula::conjunction([h.clone(), s.clone(), t.clone()]);
    let left = Formula::and(h.clone(), s.clone());
    let right = Formula::and(h.clone(), t.clone());
    let (ps, qt) = (preds(&[("p", 0), ("s", 0)]), preds(&[("q", 0), ("t", 0)]));
    let pqst = ps.union(&qt);
    ensure(check_split(&s, &t, &h, &ps, &qt).holds(), "extended split conditions fail")?;
    ensure(
        !check_split(&left, &right, &Formula::top(), &ps, &qt).holds(),
        "plain split conditions should fail",
    )?;
    let all_preds = preds(&[("p", 0), ("q", 0), ("r", 0), ("s", 0), ("t", 0)]);
    let mut whole = BTreeSet::new();
    let mut split = BTreeSet::new();
    for i in all_extensions(&PartialInterpretation::default(), all_preds.as_slice(), config).map_err(err)? {
        if satisfies_sm(&i, &six, &pqst, config).map_err(err)? {
            whole.insert(i.atoms());
        }
        if satisfies_sm(&i, &left, &ps, config).map_err(err)? && satisfies_sm(&i, &right, &qt, config).map_err(err)? {
            split.insert(i.atoms());
        }
    }
    ensure(whole == split, "split and whole formulas have different models")?;
    // with r minimized as well, i.e. no input r
    let r = Atom::new("r", vec![]);
    let without_r: BTreeSet<_> = whole.iter().filter(|x| !x.contains(&r)).cloned().collect();
    let expected: BTreeSet<_> = [atoms("{s, t}")].into_iter().collect();
    ensure(without_r == expected, "models without r are not {{s, t}}")?;
    let answer: BTreeSet<_> = answer_sets(&six, config).map_err(err)?.iter().map(|m| m.atoms()).collect();
    ensure(answer == expected, "answer sets of the whole formula are not {{s, t}}")?;
    let gl: BTreeSet<_> = gl_answer_sets(&parse_program("p ; q :- r. s. t.").unwrap(), config)
        .map_err(err)?
        .into_iter()
        .collect();
    ensure(gl == expected, "reduct oracle is not {{s, t}}")?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "split and whole formulas share {} models over p, q, r, s, t; answer sets {{s, t}} by SM and reduct, {elapsed:.2?}",
        whole.len()
    ))
}

fn criterion_4() -> Check {
    let golden = std::fs::read_to_string(data("chain.golden")).map_err(err)?;
    let file = data("chain.fo");
    let out = run_args(["modsm", "instantiate", file.to_str().unwrap(), "--input", "t,m", "--unicode"]);
    ensure(out.exit_code() == 0, out.stderr.clone())?;
    ensure(out.stdout == golden, format!("trace differs:\n{}", out.stdout))?;
    let f = load_source(&file).map_err(err)?.formula().map_err(err)?;
    let inst = fm_instantiate(&f, &preds(&[("t", 0), ("m", 0)])).map_err(err)?;
    ensure(inst.trace.len() == 5, "expected F^0 to F^4")?;
    ensure(inst.module.formula() == parse_formula("t -> s").unwrap(), "FM formula is not t -> s")?;
    ensure(
        inst.module.outputs().same_members(&preds(&[("p", 0), ("q", 0), ("r", 0), ("s", 0)])),
        "outputs are not {p, q, r, s}",
    )?;
    Ok("trace F^0 to F^4 and (t -> s, {t, m}, {p, q, r, s}) match the golden file byte for byte".into())
}

fn criterion_5() -> Check {
    let program = parse_program(&std::fs::read_to_string(data("tnpq.lp")).unwrap()).map_err(err)?;
    let f = fol_representation(&program).map_err(err)?;
    let inst = fm_instantiate(&f, &preds(&[("l", 0), ("t", 0)])).map_err(err)?;
    let fm = &inst.module;
    ensure(fm.formula() == parse_formula("t -> n").unwrap(), format!("FM is {fm}"))?;
    ensure(fm.inputs() == &preds(&[("l", 0), ("t", 0)]), format!("FM is {fm}"))?;
    ensure(
        fm.outputs().same_members(&preds(&[("m", 0), ("n", 0), ("p", 0), ("q", 0), ("r", 0), ("s", 0)])),
        format!("FM is {fm}"),
    )?;
    let dm = dm_instantiate(&program, &atoms("{l, t}")).map_err(err)?;
    ensure(dm.program().rules == parse_program("n :- t. p :- q, t.").unwrap().rules, format!("DM is {dm}"))?;
    ensure(dm.inputs() == &atoms("{l, t}") && dm.outputs() == &atoms("{n, p, q}"), format!("DM is {dm}"))?;
    Ok(format!("FM = {fm}, DM = {dm}"))
}

fn criterion_6() -> Check {
    let f = parse_formula(&std::fs::read_to_string(data("projection.fo")).unwrap()).map_err(err)?;
    let onto = preds(&[("q", 1), ("r", 0), ("s", 1), ("t", 1), ("m", 0)]);
    let got = project_formula(&f, &onto);
    let want = parse_formula("(q(a) -> r) & forall x (~q(x) & t(x) -> s(x))").unwrap();
    ensure(got == want, format!("got {got}"))?;
    Ok(format!("projection is {got}"))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let config = SearchConfig::default();
    let g = load_module(&data("graph.lp")).map_err(err)?.module;
    let r = load_module(&data("reach.lp")).map_err(err)?.module;
    let c = load_module(&data("clique.lp")).map_err(err)?.module;
    let gr = join(&g, &r).map_err(err)?;
    ensure(joinable(&gr, &c).holds(), "F_G, F_R, F_C are not joinable")?;

    let objects: Vec<String> = ["a", "b", "c", "d", "e", "f"].iter().map(|s| s.to_string()).collect();
    let mut step = PartialInterpretation::herbrand(&objects);
    let mut parts = Vec::new();
    for m in [&g, &r, &c] {
        let models = m.stable_models(&step, config).map_err(err)?;
        ensure(models.len() == 1, format!("{} stable models of {m}", models.len()))?;
        let covered: Vec<Predicate> = m.inputs().union(m.outputs()).iter().cloned().collect();
        parts.push(models[0].restrict(&covered));
        step = models[0].clone();
    }
    let composite = parts[0].union(&parts[1]).and_then(|x| x.union(&parts[2])).map_err(err)?;

    // I_G, I_R and I_C as listed with the example
    let edges = "edge(a,a) edge(a,b) edge(b,c) edge(c,b) edge(c,c) edge(d,e) \
                 edge(d,f) edge(e,d) edge(e,f) edge(f,d) edge(f,e)";
    let expected = atoms(&format!(
        "vertex(a) vertex(b) vertex(c) vertex(d) vertex(e) vertex(f) {edges} at(a) \
         reachable(a) reachable(b) reachable(c) in_clique(b) in_clique(c)"
    ));
    ensure(composite.atoms() == expected, format!("composite model is {composite}"))?;
    ensure(
        module_theorem_check(&r, &c, &parts[1], &parts[2], config).map_err(err)?,
        "module theorem fails for F_R and F_C",
    )?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("unique composite model, reachable = {{a, b, c}}, in_clique = {{b, c}}, {elapsed:.2?}"))
}

fn suite(s: Suite, count: usize, limit: Option<Duration>) -> Check {
    let start = Instant::now();
    let report = s.run(count, 2012, 2, SearchConfig::default());
    let elapsed = start.elapsed();
    ensure(report.passed(count), report.to_string())?;
    if let Some(limit) = limit {
        within(elapsed, limit)?;
    }
    Ok(format!("{report}, {elapsed:.2?}"))
}

type Criterion = (usize, &'static str, Box<dyn Fn() -> Check>);

fn main() -> ExitCode {
    let minute = Duration::from_secs(60);
    let criteria: Vec<Criterion> = vec![
        (1, "answer set of the example program", Box::new(criterion_1)),
        (2, "SM of p/q/r program equals its completion", Box::new(criterion_2)),
        (3, "extended splitting with a shared rule", Box::new(criterion_3)),
        (4, "instantiation trace golden", Box::new(criterion_4)),
        (5, "FM and DM of the simple program", Box::new(criterion_5)),
        (6, "projection of the three-rule formula", Box::new(criterion_6)),
        (7, "clique pipeline", Box::new(criterion_7)),
        (8, "oracle equivalence", Box::new(move || suite(Suite::Oracle, 500, Some(minute)))),
        (9, "module theorem", Box::new(move || suite(Suite::ModuleTheorem, 200, Some(minute)))),
        (10, "join commutativity and associativity", Box::new(|| suite(Suite::JoinLaws, 200, None))),
        (11, "DLP module answer sets and join", Box::new(|| suite(Suite::DlpModules, 200, None))),
        (12, "incremental assembly", Box::new(move || suite(Suite::Incremental, 100, Some(2 * minute)))),
        (13, "projection idempotence and confluence", Box::new(|| suite(Suite::Projection, 1000, None))),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
