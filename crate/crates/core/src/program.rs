//! Logic programs with disjunction, choice, double negation and count
//! aggregates, and their translation into first-order sentences.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::formula::{fresh_name, symbols_of, Atom, Formula, Signature, StepExpr, Term};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeadLiteral {
    Pos(Atom),
    /// `not a` in a head; only produced by choice desugaring or written
    /// explicitly.
    Neg(Atom),
}

impl HeadLiteral {
    pub fn atom(&self) -> &Atom {
        match self {
            HeadLiteral::Pos(a) | HeadLiteral::Neg(a) => a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    /// `a1 ; … ; an`, empty for constraints.
    Disjunction(Vec<HeadLiteral>),
    /// `{a}`
    Choice(Atom),
}

/// `b { x1, …, xn : l1, …, lm }`, optionally under `not`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountAggregate {
    pub negated: bool,
    pub bound: u64,
    pub variables: Vec<String>,
    pub elements: Vec<BodyLiteral>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyLiteral {
    Pos(Atom),
    Neg(Atom),
    NegNeg(Atom),
    Equal(Term, Term),
    NotEqual(Term, Term),
    Count(CountAggregate),
}

impl BodyLiteral {
    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            BodyLiteral::Pos(a) | BodyLiteral::Neg(a) | BodyLiteral::NegNeg(a) => {
                out.extend(a.variables())
            }
            BodyLiteral::Equal(l, r) | BodyLiteral::NotEqual(l, r) => {
                out.extend(l.variables());
                out.extend(r.variables());
            }
            BodyLiteral::Count(agg) => {
                let mut inner = BTreeSet::new();
                agg.elements
                    .iter()
                    .for_each(|l| l.collect_variables(&mut inner));
                out.extend(
                    inner
                        .into_iter()
                        .filter(|v| !agg.variables.contains(v)),
                );
            }
        }
    }

    fn substitute(&self, var: &str, by: &Term) -> BodyLiteral {
        match self {
            BodyLiteral::Pos(a) => BodyLiteral::Pos(a.substitute(var, by)),
            BodyLiteral::Neg(a) => BodyLiteral::Neg(a.substitute(var, by)),
            BodyLiteral::NegNeg(a) => BodyLiteral::NegNeg(a.substitute(var, by)),
            BodyLiteral::Equal(l, r) => {
                BodyLiteral::Equal(l.substitute(var, by), r.substitute(var, by))
            }
            BodyLiteral::NotEqual(l, r) => {
                BodyLiteral::NotEqual(l.substitute(var, by), r.substitute(var, by))
            }
            BodyLiteral::Count(agg) if agg.variables.iter().any(|v| v == var) => self.clone(),
            BodyLiteral::Count(agg) => BodyLiteral::Count(CountAggregate {
                elements: agg.elements.iter().map(|l| l.substitute(var, by)).collect(),
                ..agg.clone()
            }),
        }
    }

    fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Result<Atom>) -> Result<BodyLiteral> {
        Ok(match self {
            BodyLiteral::Pos(a) => BodyLiteral::Pos(f(a)?),
            BodyLiteral::Neg(a) => BodyLiteral::Neg(f(a)?),
            BodyLiteral::NegNeg(a) => BodyLiteral::NegNeg(f(a)?),
            BodyLiteral::Equal(..) | BodyLiteral::NotEqual(..) => self.clone(),
            BodyLiteral::Count(agg) => BodyLiteral::Count(CountAggregate {
                elements: agg
                    .elements
                    .iter()
                    .map(|l| l.map_atoms(f))
                    .collect::<Result<_>>()?,
                ..agg.clone()
            }),
        })
    }

    fn atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            BodyLiteral::Pos(a) | BodyLiteral::Neg(a) | BodyLiteral::NegNeg(a) => out.push(a),
            BodyLiteral::Equal(..) | BodyLiteral::NotEqual(..) => {}
            BodyLiteral::Count(agg) => agg.elements.iter().for_each(|l| l.atoms(out)),
        }
    }

    /// The literal as a formula. Aggregates need a set of names to stay
    /// clear of.
    pub fn to_formula(&self, avoid: &BTreeSet<String>) -> Result<Formula> {
        Ok(match self {
            BodyLiteral::Pos(a) => Formula::Atom(a.clone()),
            BodyLiteral::Neg(a) => Formula::not(Formula::Atom(a.clone())),
            BodyLiteral::NegNeg(a) => Formula::not(Formula::not(Formula::Atom(a.clone()))),
            BodyLiteral::Equal(l, r) => Formula::equal(l.clone(), r.clone()),
            BodyLiteral::NotEqual(l, r) => Formula::not(Formula::equal(l.clone(), r.clone())),
            BodyLiteral::Count(agg) => {
                let f = expand_count(agg.bound, &agg.variables, &agg.elements, avoid)?;
                if agg.negated {
                    Formula::not(f)
                } else {
                    f
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyLiteral>,
}

impl Rule {
    pub fn new(head: Vec<HeadLiteral>, body: Vec<BodyLiteral>) -> Self {
        Rule {
            head: Head::Disjunction(head),
            body,
        }
    }

    pub fn fact(atom: Atom) -> Self {
        Rule::new(alloc::vec![HeadLiteral::Pos(atom)], Vec::new())
    }

    pub fn choice(atom: Atom, body: Vec<BodyLiteral>) -> Self {
        Rule {
            head: Head::Choice(atom),
            body,
        }
    }

    pub fn is_choice(&self) -> bool {
        matches!(self.head, Head::Choice(_))
    }

    pub fn head_literals(&self) -> Vec<HeadLiteral> {
        match &self.head {
            Head::Disjunction(lits) => lits.clone(),
            Head::Choice(a) => alloc::vec![HeadLiteral::Pos(a.clone())],
        }
    }

    /// Atoms occurring in the head, positively or under `not`.
    pub fn head_atoms(&self) -> Vec<&Atom> {
        match &self.head {
            Head::Disjunction(lits) => lits.iter().map(HeadLiteral::atom).collect(),
            Head::Choice(a) => alloc::vec![a],
        }
    }

    pub fn positive_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            BodyLiteral::Pos(a) => Some(a),
            _ => None,
        })
    }

    pub fn negative_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            BodyLiteral::Neg(a) => Some(a),
            _ => None,
        })
    }

    pub fn double_negative_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            BodyLiteral::NegNeg(a) => Some(a),
            _ => None,
        })
    }

    pub fn aggregates(&self) -> impl Iterator<Item = &CountAggregate> {
        self.body.iter().filter_map(|l| match l {
            BodyLiteral::Count(agg) => Some(agg),
            _ => None,
        })
    }

    /// Every atom of the rule, aggregate elements included.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = self.head_atoms();
        self.body.iter().for_each(|l| l.atoms(&mut out));
        out
    }

    /// Variables that are not local to an aggregate.
    pub fn global_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in self.head_atoms() {
            out.extend(a.variables());
        }
        self.body.iter().for_each(|l| l.collect_variables(&mut out));
        out
    }

    fn all_variables(&self) -> BTreeSet<String> {
        let mut out = self.global_variables();
        for agg in self.aggregates() {
            out.extend(agg.variables.iter().cloned());
            let mut inner = BTreeSet::new();
            agg.elements
                .iter()
                .for_each(|l| l.collect_variables(&mut inner));
            out.extend(inner);
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.global_variables().is_empty()
    }

    pub fn substitute(&self, var: &str, by: &Term) -> Rule {
        let head = match &self.head {
            Head::Disjunction(lits) => Head::Disjunction(
                lits.iter()
                    .map(|l| match l {
                        HeadLiteral::Pos(a) => HeadLiteral::Pos(a.substitute(var, by)),
                        HeadLiteral::Neg(a) => HeadLiteral::Neg(a.substitute(var, by)),
                    })
                    .collect(),
            ),
            Head::Choice(a) => Head::Choice(a.substitute(var, by)),
        };
        Rule {
            head,
            body: self.body.iter().map(|l| l.substitute(var, by)).collect(),
        }
    }

    pub fn try_map_atoms(&self, mut f: impl FnMut(&Atom) -> Result<Atom>) -> Result<Rule> {
        let head = match &self.head {
            Head::Disjunction(lits) => Head::Disjunction(
                lits.iter()
                    .map(|l| {
                        Ok(match l {
                            HeadLiteral::Pos(a) => HeadLiteral::Pos(f(a)?),
                            HeadLiteral::Neg(a) => HeadLiteral::Neg(f(a)?),
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            Head::Choice(a) => Head::Choice(f(a)?),
        };
        let body = self
            .body
            .iter()
            .map(|l| l.map_atoms(&mut f))
            .collect::<Result<_>>()?;
        Ok(Rule { head, body })
    }

    /// `Body → Head`, universally closed.
    pub fn to_formula(&self) -> Result<Formula> {
        let head = match &self.head {
            Head::Disjunction(lits) => Formula::disjunction(lits.iter().map(|l| match l {
                HeadLiteral::Pos(a) => Formula::Atom(a.clone()),
                HeadLiteral::Neg(a) => Formula::not(Formula::Atom(a.clone())),
            })),
            Head::Choice(a) => Formula::or(
                Formula::Atom(a.clone()),
                Formula::not(Formula::Atom(a.clone())),
            ),
        };
        let f = if self.body.is_empty() {
            head
        } else {
            let avoid = self.all_variables();
            let body = self
                .body
                .iter()
                .map(|l| l.to_formula(&avoid))
                .collect::<Result<Vec<_>>>()?;
            Formula::implies(Formula::conjunction(body), head)
        };
        Ok(f.universal_closure())
    }
}

/// `{p(x)} ← B` becomes `p(x) ; not p(x) ← B`. Other rules pass through.
pub fn desugar_choice(rule: &Rule) -> Rule {
    match &rule.head {
        Head::Choice(a) => Rule::new(
            alloc::vec![HeadLiteral::Pos(a.clone()), HeadLiteral::Neg(a.clone())],
            rule.body.clone(),
        ),
        Head::Disjunction(_) => rule.clone(),
    }
}

/// `b{x : F(x)}` as `∃x¹…xᵇ (⋀ F(xⁱ) ∧ ⋀_{i<j} ¬(xⁱ = xʲ))`, with fresh
/// variable copies chosen outside `avoid`.
pub fn expand_count(
    bound: u64,
    variables: &[String],
    elements: &[BodyLiteral],
    avoid: &BTreeSet<String>,
) -> Result<Formula> {
    if bound < 1 {
        return Err(Error::AggregateBound);
    }
    if variables.is_empty() {
        return Err(Error::Aggregate("empty variable list".to_string()));
    }
    let mut taken = avoid.clone();
    for l in elements {
        l.collect_variables(&mut taken);
    }
    taken.extend(variables.iter().cloned());

    // copies[i][j] renames variables[j] in the i-th copy
    let mut copies: Vec<Vec<String>> = Vec::new();
    for i in 1..=bound {
        let mut row = Vec::new();
        for v in variables {
            let preferred = format!("{v}{i}");
            let name = if taken.contains(&preferred) {
                fresh_name(&format!("{preferred}_"), &taken)
            } else {
                preferred
            };
            taken.insert(name.clone());
            row.push(name);
        }
        copies.push(row);
    }

    let element = Formula::conjunction(
        elements
            .iter()
            .map(|l| l.to_formula(&taken))
            .collect::<Result<Vec<_>>>()?,
    );
    let mut conjuncts = Vec::new();
    for row in &copies {
        let mut inst = element.clone();
        for (v, fresh) in variables.iter().zip(row) {
            inst = inst.substitute(v, &Term::Variable(fresh.clone()));
        }
        conjuncts.extend(inst.conjuncts().into_iter().cloned());
    }
    for i in 0..copies.len() {
        for j in i + 1..copies.len() {
            let eq = Formula::conjunction(
                copies[i]
                    .iter()
                    .zip(&copies[j])
                    .map(|(a, b)| Formula::equal(Term::var(a.clone()), Term::var(b.clone()))),
            );
            conjuncts.push(Formula::not(eq));
        }
    }
    let matrix = Formula::conjunction(conjuncts);
    Ok(copies
        .iter()
        .flatten()
        .rev()
        .fold(matrix, |body, v| Formula::exists(v.clone(), body)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub signature: Signature,
    pub rules: Vec<Rule>,
}

impl Program {
    /// Builds a program whose signature is collected from its rules.
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        let mut signature = Signature::new();
        for r in &rules {
            // aggregates may leave bound variables; symbols are all we need
            let f = rule_symbols_formula(r);
            signature.extend(&symbols_of(&f));
        }
        signature.validate()?;
        Ok(Program { signature, rules })
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(Rule::is_ground)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.rules
            .iter()
            .flat_map(|r| r.atoms().into_iter().cloned())
            .collect()
    }

    /// Atoms occurring in some head.
    pub fn head_atoms(&self) -> BTreeSet<Atom> {
        self.rules
            .iter()
            .flat_map(|r| r.head_atoms().into_iter().cloned())
            .collect()
    }
}

/// A formula mentioning every atom and term of the rule; used only for
/// symbol collection, never evaluated.
fn rule_symbols_formula(r: &Rule) -> Formula {
    let mut parts: Vec<Formula> = r.atoms().into_iter().map(|a| Formula::Atom(a.clone())).collect();
    fn terms(l: &BodyLiteral, parts: &mut Vec<Formula>) {
        match l {
            BodyLiteral::Equal(a, b) | BodyLiteral::NotEqual(a, b) => {
                parts.push(Formula::equal(a.clone(), b.clone()))
            }
            BodyLiteral::Count(agg) => agg.elements.iter().for_each(|e| terms(e, parts)),
            _ => {}
        }
    }
    r.body.iter().for_each(|l| terms(l, &mut parts));
    Formula::conjunction(parts)
}

/// Conjunction of the universal closures of the rules, in rule order.
pub fn fol_representation(program: &Program) -> Result<Formula> {
    Ok(Formula::conjunction(
        program
            .rules
            .iter()
            .map(Rule::to_formula)
            .collect::<Result<Vec<_>>>()?,
    ))
}

fn instantiate_atom(a: &Atom, step: u64) -> Result<Atom> {
    match a.step {
        None => Ok(a.clone()),
        Some(expr) => {
            let v = expr.eval(step).ok_or_else(|| Error::NegativeStep {
                expr: expr.to_string(),
                step,
            })?;
            Ok(Atom::new(format!("{}_{}", a.predicate.name, v), a.args.clone()))
        }
    }
}

/// Replaces every parameterized atom `p@(f(t))(x)` by `p_v(x)` where
/// `v = f(step)`.
pub fn instantiate_at(f: &Formula, step: u64) -> Result<Formula> {
    f.try_map_atoms(&mut |a| instantiate_atom(a, step).map(Formula::Atom))
}

pub fn instantiate_rule_at(r: &Rule, step: u64) -> Result<Rule> {
    r.try_map_atoms(|a| instantiate_atom(a, step))
}

pub fn instantiate_program_at(p: &Program, step: u64) -> Result<Program> {
    Program::new(
        p.rules
            .iter()
            .map(|r| instantiate_rule_at(r, step))
            .collect::<Result<_>>()?,
    )
}

/// True when some atom depends on the step counter (a fixed step does not).
pub fn uses_step_counter(f: &Formula) -> bool {
    let mut found = false;
    f.for_each_atom(&mut |a| {
        found |= a.step.is_some_and(|s: StepExpr| s.depends_on_counter())
    });
    found
}

/// All ground instances over the object constants of `signature` (and of
/// the program), rule order first, then assignments in lexicographic order.
pub fn ground_program(program: &Program, signature: &Signature) -> Result<Program> {
    if let Some((f, _)) = signature
        .functions
        .iter()
        .chain(program.signature.functions.iter())
        .next()
    {
        return Err(Error::FunctionSymbols(f.clone()));
    }
    let universe: Vec<String> = signature
        .objects
        .iter()
        .chain(program.signature.objects.iter())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut rules = Vec::new();
    for rule in &program.rules {
        let vars: Vec<String> = rule.global_variables().into_iter().collect();
        if vars.is_empty() {
            rules.push(rule.clone());
            continue;
        }
        if universe.is_empty() {
            return Err(Error::NoObjectConstant);
        }
        let mut index = alloc::vec![0usize; vars.len()];
        loop {
            let mut inst = rule.clone();
            for (v, &i) in vars.iter().zip(&index) {
                inst = inst.substitute(v, &Term::Constant(universe[i].clone()));
            }
            rules.push(inst);
            // odometer, last variable fastest
            let mut pos = vars.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                index[pos] += 1;
                if index[pos] < universe.len() {
                    break;
                }
                index[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
    }
    let mut grounded = Program::new(rules)?;
    grounded.signature.extend(signature);
    grounded.signature.extend(&program.signature);
    Ok(grounded)
}

impl fmt::Display for HeadLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadLiteral::Pos(a) => write!(f, "{a}"),
            HeadLiteral::Neg(a) => write!(f, "not {a}"),
        }
    }
}

impl fmt::Display for BodyLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyLiteral::Pos(a) => write!(f, "{a}"),
            BodyLiteral::Neg(a) => write!(f, "not {a}"),
            BodyLiteral::NegNeg(a) => write!(f, "not not {a}"),
            BodyLiteral::Equal(l, r) => write!(f, "{l} = {r}"),
            BodyLiteral::NotEqual(l, r) => write!(f, "{l} != {r}"),
            BodyLiteral::Count(agg) => {
                if agg.negated {
                    f.write_str("not ")?;
                }
                write!(f, "{} {{ {} : ", agg.bound, agg.variables.join(", "))?;
                for (i, l) in agg.elements.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str(" }")
            }
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::Choice(a) => write!(f, "{{ {a} }}")?,
            Head::Disjunction(lits) => {
                for (i, l) in lits.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ; ")?;
                    }
                    write!(f, "{l}")?;
                }
            }
        }
        if !self.body.is_empty() {
            if !matches!(&self.head, Head::Disjunction(l) if l.is_empty()) {
                f.write_str(" ")?;
            }
            f.write_str(":- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        } else if matches!(&self.head, Head::Disjunction(l) if l.is_empty()) {
            f.write_str(":-")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
