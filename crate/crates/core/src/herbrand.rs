//! Finite interpretations, exhaustive SM checking and answer-set search.
//!
//! Extents are bitsets indexed by tuples read as mixed-radix numbers over
//! the sorted universe, so tuple order is lexicographic. Formulas are
//! compiled once per search and evaluated with an explicit variable stack.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::formula::{symbols_of, Atom, Formula, Predicate, PredicateList, Signature, Term};
use crate::polarity::strictly_positive_predicates;
use crate::program::{BodyLiteral, Head, HeadLiteral, Program};
use crate::sm::build_sm;

pub const DEFAULT_MAX_CANDIDATES: u64 = 1 << 24;

/// Largest extent, in tuples, that a single predicate may have.
const MAX_TUPLES: usize = 1 << 22;

/// Name of the only element of a universe built for a signature without
/// object constants. `#` never occurs in parsed identifiers.
pub const PLACEHOLDER: &str = "#";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_candidates: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

impl SearchConfig {
    fn guard(&self, count: u128) -> Result<()> {
        if count > self.max_candidates as u128 {
            Err(Error::CandidateLimit {
                count,
                limit: self.max_candidates,
            })
        } else {
            Ok(())
        }
    }
}

fn pow2(bits: usize) -> u128 {
    if bits >= 127 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

/// An interpretation restricted to some of the signature's constants.
/// Elements of the universe are referred to by index into the sorted
/// element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialInterpretation {
    universe: Vec<String>,
    objects: BTreeMap<String, usize>,
    functions: BTreeMap<(String, usize), BTreeMap<Vec<usize>, usize>>,
    extents: BTreeMap<Predicate, BTreeSet<Vec<usize>>>,
}

impl PartialInterpretation {
    /// A universe with nothing covered yet.
    pub fn new<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let universe: Vec<String> = elements
            .into_iter()
            .map(Into::into)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if universe.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        Ok(PartialInterpretation {
            universe,
            objects: BTreeMap::new(),
            functions: BTreeMap::new(),
            extents: BTreeMap::new(),
        })
    }

    /// The Herbrand universe of a function-free signature, every object
    /// constant denoting itself. Without object constants the universe is a
    /// single placeholder element, which only propositional formulas can
    /// observe.
    pub fn herbrand<'a, I>(objects: I) -> Self
    where
        I: IntoIterator<Item = &'a String>,
    {
        let objects: BTreeSet<String> = objects.into_iter().cloned().collect();
        if objects.is_empty() {
            return Self::new([PLACEHOLDER]).expect("one element");
        }
        let mut i = Self::new(objects.iter().cloned()).expect("nonempty");
        for (k, o) in i.universe.clone().into_iter().enumerate() {
            i.objects.insert(o, k);
        }
        i
    }

    /// Herbrand interpretation of `signature` in which exactly `atoms` are
    /// true among `covered` predicates.
    pub fn from_atoms<'a>(
        objects: impl IntoIterator<Item = &'a String>,
        covered: impl IntoIterator<Item = Predicate>,
        atoms: impl IntoIterator<Item = &'a Atom>,
    ) -> Result<Self> {
        let mut i = Self::herbrand(objects);
        for p in covered {
            i.extents.entry(p).or_default();
        }
        for a in atoms {
            i.add_atom(a)?;
        }
        Ok(i)
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn objects(&self) -> &BTreeMap<String, usize> {
        &self.objects
    }

    pub fn set_object(&mut self, name: impl Into<String>, element: usize) -> Result<()> {
        if element >= self.universe.len() {
            return Err(Error::Internal(format!("element {element} outside the universe")));
        }
        self.objects.insert(name.into(), element);
        Ok(())
    }

    /// Covers a function constant with the given total table.
    pub fn set_function(
        &mut self,
        name: impl Into<String>,
        arity: usize,
        table: BTreeMap<Vec<usize>, usize>,
    ) {
        self.functions.insert((name.into(), arity), table);
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.extents.keys()
    }

    pub fn covers(&self, p: &Predicate) -> bool {
        self.extents.contains_key(p)
    }

    pub fn extent(&self, p: &Predicate) -> Option<&BTreeSet<Vec<usize>>> {
        self.extents.get(p)
    }

    /// Covers `p` with exactly the given tuples of element indices.
    pub fn set_extent(&mut self, p: Predicate, tuples: BTreeSet<Vec<usize>>) -> Result<()> {
        if let Some(t) = tuples
            .iter()
            .find(|t| t.len() != p.arity || t.iter().any(|&e| e >= self.universe.len()))
        {
            return Err(Error::Internal(format!(
                "tuple {t:?} does not fit {}",
                p.qualified()
            )));
        }
        self.extents.insert(p, tuples);
        Ok(())
    }

    pub fn remove_predicate(&mut self, p: &Predicate) {
        self.extents.remove(p);
    }

    /// Makes a ground atom true, covering its predicate if needed.
    pub fn add_atom(&mut self, a: &Atom) -> Result<()> {
        let tuple = a
            .args
            .iter()
            .map(|t| self.denote(t))
            .collect::<Result<Vec<_>>>()?;
        self.extents
            .entry(a.predicate.clone())
            .or_default()
            .insert(tuple);
        Ok(())
    }

    fn denote(&self, t: &Term) -> Result<usize> {
        match t {
            Term::Variable(v) => Err(Error::NonGround(v.clone())),
            Term::Constant(c) => self
                .objects
                .get(c)
                .copied()
                .ok_or_else(|| Error::Uncovered(c.clone())),
            Term::Function(name, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.denote(a))
                    .collect::<Result<Vec<_>>>()?;
                self.functions
                    .get(&(name.clone(), args.len()))
                    .and_then(|table| table.get(&vals))
                    .copied()
                    .ok_or_else(|| Error::Uncovered(format!("{name}/{}", args.len())))
            }
        }
    }

    /// Whether a ground atom is true; its predicate must be covered.
    pub fn holds(&self, a: &Atom) -> Result<bool> {
        let ext = self
            .extents
            .get(&a.predicate)
            .ok_or_else(|| Error::Uncovered(a.predicate.qualified()))?;
        let tuple = a
            .args
            .iter()
            .map(|t| self.denote(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(ext.contains(&tuple))
    }

    /// The true atoms, with elements written by name.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for (p, tuples) in &self.extents {
            for t in tuples {
                out.insert(Atom::new(
                    p.name.clone(),
                    t.iter()
                        .map(|&e| Term::Constant(self.universe[e].clone()))
                        .collect(),
                ));
            }
        }
        out
    }

    /// Same universe, and every shared constant denotes the same thing.
    pub fn compatible(&self, other: &PartialInterpretation) -> bool {
        if self.universe != other.universe {
            return false;
        }
        let objects = self
            .objects
            .iter()
            .all(|(k, v)| other.objects.get(k).is_none_or(|w| w == v));
        let functions = self
            .functions
            .iter()
            .all(|(k, v)| other.functions.get(k).is_none_or(|w| w == v));
        let extents = self
            .extents
            .iter()
            .all(|(k, v)| other.extents.get(k).is_none_or(|w| w == v));
        objects && functions && extents
    }

    fn first_conflict(&self, other: &PartialInterpretation) -> String {
        if self.universe != other.universe {
            return "universes differ".to_string();
        }
        if let Some((k, _)) = self
            .objects
            .iter()
            .find(|(k, v)| other.objects.get(*k).is_some_and(|w| w != *v))
        {
            return format!("object constant `{k}`");
        }
        if let Some(((k, a), _)) = self
            .functions
            .iter()
            .find(|(k, v)| other.functions.get(*k).is_some_and(|w| w != *v))
        {
            return format!("function constant `{k}/{a}`");
        }
        match self
            .extents
            .iter()
            .find(|(k, v)| other.extents.get(*k).is_some_and(|w| w != *v))
        {
            Some((k, _)) => format!("predicate `{}`", k.qualified()),
            None => "no conflict".to_string(),
        }
    }

    pub fn union(&self, other: &PartialInterpretation) -> Result<PartialInterpretation> {
        if !self.compatible(other) {
            return Err(Error::Incompatible(self.first_conflict(other)));
        }
        let mut out = self.clone();
        out.objects
            .extend(other.objects.iter().map(|(k, v)| (k.clone(), *v)));
        out.functions
            .extend(other.functions.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.extents
            .extend(other.extents.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(out)
    }

    /// Keeps only the listed predicates; objects and functions stay.
    pub fn restrict<'a>(&self, predicates: impl IntoIterator<Item = &'a Predicate>) -> Self {
        let keep: BTreeSet<&Predicate> = predicates.into_iter().collect();
        PartialInterpretation {
            universe: self.universe.clone(),
            objects: self.objects.clone(),
            functions: self.functions.clone(),
            extents: self
                .extents
                .iter()
                .filter(|(k, _)| keep.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Classical satisfaction of a sentence.
    pub fn evaluate(&self, f: &Formula) -> Result<bool> {
        if let Some(p) = f.predicates().iter().find(|p| !self.covers(p)) {
            return Err(Error::Uncovered(p.qualified()));
        }
        let layout = Layout::new(self, f.predicates().iter())?;
        let node = layout.compile(f)?;
        let ext = layout.load(self)?;
        Ok(layout.eval(&node, &ext, &mut Vec::new()))
    }
}

impl fmt::Display for PartialInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atoms(f, &self.atoms())
    }
}

/// `{p(a), q(b)}`, atoms in their canonical order.
pub fn write_atoms(f: &mut impl fmt::Write, atoms: &BTreeSet<Atom>) -> fmt::Result {
    f.write_char('{')?;
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_char('}')
}

pub fn atoms_to_string(atoms: &BTreeSet<Atom>) -> String {
    let mut s = String::new();
    write_atoms(&mut s, atoms).expect("writing to a string");
    s
}

// ---- compiled evaluation ----

#[derive(Clone, Debug)]
enum CTerm {
    Var(usize),
    Elem(usize),
    Func(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
enum Node {
    Atom(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    False,
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Forall(Box<Node>),
    Exists(Box<Node>),
}

type Bits = Vec<u64>;

fn bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(b: &mut Bits, i: usize, value: bool) {
    if value {
        b[i / 64] |= 1 << (i % 64);
    } else {
        b[i / 64] &= !(1 << (i % 64));
    }
}

/// Predicate slots and function tables for one universe.
type FunctionTable = ((String, usize), BTreeMap<Vec<usize>, usize>);

#[derive(Clone, Debug)]
struct Layout {
    size: usize,
    slots: Vec<Predicate>,
    index: BTreeMap<Predicate, usize>,
    objects: BTreeMap<String, usize>,
    functions: Vec<FunctionTable>,
}

impl Layout {
    fn new<'a>(
        i: &PartialInterpretation,
        predicates: impl Iterator<Item = &'a Predicate>,
    ) -> Result<Self> {
        let mut layout = Layout {
            size: i.universe.len(),
            slots: Vec::new(),
            index: BTreeMap::new(),
            objects: i.objects.clone(),
            functions: i
                .functions
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        };
        for p in predicates {
            layout.add(p)?;
        }
        Ok(layout)
    }

    fn add(&mut self, p: &Predicate) -> Result<usize> {
        if let Some(&s) = self.index.get(p) {
            return Ok(s);
        }
        self.tuple_count(p.arity)?;
        self.slots.push(p.clone());
        self.index.insert(p.clone(), self.slots.len() - 1);
        Ok(self.slots.len() - 1)
    }

    fn tuple_count(&self, arity: usize) -> Result<usize> {
        u32::try_from(arity)
            .ok()
            .and_then(|a| self.size.checked_pow(a))
            .filter(|&n| n <= MAX_TUPLES)
            .ok_or(Error::CandidateLimit {
                count: (self.size as u128).saturating_pow(arity as u32),
                limit: MAX_TUPLES as u64,
            })
    }

    fn tuple_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &e| acc * self.size + e)
    }

    fn tuple_of(&self, mut index: usize, arity: usize) -> Vec<usize> {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = index % self.size;
            index /= self.size;
        }
        t
    }

    fn empty_extents(&self) -> Vec<Bits> {
        self.slots
            .iter()
            .map(|p| {
                let n = self.tuple_count(p.arity).expect("checked in add");
                vec![0u64; n.div_ceil(64).max(1)]
            })
            .collect()
    }

    /// Extents of every slot the interpretation covers; the rest empty.
    fn load(&self, i: &PartialInterpretation) -> Result<Vec<Bits>> {
        let mut ext = self.empty_extents();
        for (s, p) in self.slots.iter().enumerate() {
            if let Some(tuples) = i.extents.get(p) {
                for t in tuples {
                    set_bit(&mut ext[s], self.tuple_index(t), true);
                }
            }
        }
        Ok(ext)
    }

    fn compile(&self, f: &Formula) -> Result<Node> {
        self.compile_in(f, &mut Vec::new())
    }

    fn compile_term(&self, t: &Term, scope: &[String]) -> Result<CTerm> {
        match t {
            Term::Variable(v) => scope
                .iter()
                .rposition(|s| s == v)
                .map(CTerm::Var)
                .ok_or_else(|| Error::FreeVariable(v.clone())),
            Term::Constant(c) => self
                .objects
                .get(c)
                .map(|&e| CTerm::Elem(e))
                .ok_or_else(|| Error::Uncovered(c.clone())),
            Term::Function(name, args) => {
                let id = self
                    .functions
                    .iter()
                    .position(|((n, a), _)| n == name && *a == args.len())
                    .ok_or_else(|| Error::Uncovered(format!("{name}/{}", args.len())))?;
                let args = args
                    .iter()
                    .map(|a| self.compile_term(a, scope))
                    .collect::<Result<_>>()?;
                Ok(CTerm::Func(id, args))
            }
        }
    }

    fn compile_in(&self, f: &Formula, scope: &mut Vec<String>) -> Result<Node> {
        Ok(match f {
            Formula::Atom(a) => {
                let slot = *self
                    .index
                    .get(&a.predicate)
                    .ok_or_else(|| Error::Uncovered(a.predicate.qualified()))?;
                let args = a
                    .args
                    .iter()
                    .map(|t| self.compile_term(t, scope))
                    .collect::<Result<_>>()?;
                Node::Atom(slot, args)
            }
            Formula::Equal(l, r) => {
                Node::Eq(self.compile_term(l, scope)?, self.compile_term(r, scope)?)
            }
            Formula::Falsity => Node::False,
            Formula::And(a, b) => Node::And(
                Box::new(self.compile_in(a, scope)?),
                Box::new(self.compile_in(b, scope)?),
            ),
            Formula::Or(a, b) => Node::Or(
                Box::new(self.compile_in(a, scope)?),
                Box::new(self.compile_in(b, scope)?),
            ),
            Formula::Implies(a, b) => Node::Implies(
                Box::new(self.compile_in(a, scope)?),
                Box::new(self.compile_in(b, scope)?),
            ),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                scope.push(v.clone());
                let inner = self.compile_in(body, scope);
                scope.pop();
                let inner = Box::new(inner?);
                if matches!(f, Formula::Forall(..)) {
                    Node::Forall(inner)
                } else {
                    Node::Exists(inner)
                }
            }
        })
    }

    fn value(&self, t: &CTerm, env: &[usize]) -> usize {
        match t {
            CTerm::Var(i) => env[*i],
            CTerm::Elem(e) => *e,
            CTerm::Func(id, args) => {
                let vals: Vec<usize> = args.iter().map(|a| self.value(a, env)).collect();
                // tables are total by construction of the interpretation
                self.functions[*id].1.get(&vals).copied().unwrap_or(0)
            }
        }
    }

    fn eval(&self, n: &Node, ext: &[Bits], env: &mut Vec<usize>) -> bool {
        match n {
            Node::Atom(slot, args) => {
                let idx = args
                    .iter()
                    .fold(0, |acc, t| acc * self.size + self.value(t, env));
                bit(&ext[*slot], idx)
            }
            Node::Eq(l, r) => self.value(l, env) == self.value(r, env),
            Node::False => false,
            Node::And(a, b) => self.eval(a, ext, env) && self.eval(b, ext, env),
            Node::Or(a, b) => self.eval(a, ext, env) || self.eval(b, ext, env),
            Node::Implies(a, b) => !self.eval(a, ext, env) || self.eval(b, ext, env),
            Node::Forall(body) => (0..self.size).all(|e| {
                env.push(e);
                let r = self.eval(body, ext, env);
                env.pop();
                r
            }),
            Node::Exists(body) => (0..self.size).any(|e| {
                env.push(e);
                let r = self.eval(body, ext, env);
                env.pop();
                r
            }),
        }
    }
}

/// Decides `I ⊨ SM[F; p]` for interpretations over one universe by trying
/// every `u` below the extents of `p`.
#[derive(Clone, Debug)]
pub struct SmChecker {
    layout: Layout,
    formula: Node,
    matrix: Node,
    intensional: Vec<usize>,
    variables: Vec<usize>,
    config: SearchConfig,
}

impl SmChecker {
    /// `base` supplies the universe and the object and function constants.
    pub fn new(
        f: &Formula,
        p: &PredicateList,
        base: &PartialInterpretation,
        config: SearchConfig,
    ) -> Result<Self> {
        if !f.is_sentence() {
            let v = f.free_variables().into_iter().next().unwrap_or_default();
            return Err(Error::FreeVariable(v));
        }
        let sentence = build_sm(f, p)?;
        let mut layout = Layout::new(base, f.predicates().iter())?;
        let intensional = p.iter().map(|q| layout.add(q)).collect::<Result<Vec<_>>>()?;
        let variables = sentence
            .variables
            .iter()
            .map(|u| layout.add(u))
            .collect::<Result<Vec<_>>>()?;
        let formula = layout.compile(f)?;
        let matrix = layout.compile(&sentence.matrix)?;
        Ok(SmChecker {
            layout,
            formula,
            matrix,
            intensional,
            variables,
            config,
        })
    }

    fn check_extents(&self, ext: &mut [Bits]) -> Result<bool> {
        let mut env = Vec::new();
        if !self.layout.eval(&self.formula, ext, &mut env) {
            return Ok(false);
        }
        // true tuples of the intensional predicates, as (list position, tuple)
        let mut members: Vec<(usize, usize)> = Vec::new();
        for (k, &slot) in self.intensional.iter().enumerate() {
            let n = self.layout.tuple_count(self.layout.slots[slot].arity)?;
            members.extend((0..n).filter(|&t| bit(&ext[slot], t)).map(|t| (k, t)));
        }
        let total = pow2(members.len());
        self.config.guard(total - 1)?;
        let total = total as u64;
        for mask in 0..total - 1 {
            for &slot in &self.variables {
                ext[slot].iter_mut().for_each(|w| *w = 0);
            }
            for (i, &(k, t)) in members.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    set_bit(&mut ext[self.variables[k]], t, true);
                }
            }
            if self.layout.eval(&self.matrix, ext, &mut env) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `I ⊨ SM[F; p]`. `I` must cover every predicate of `F` and `p` and
    /// share the checker's universe.
    pub fn check(&self, i: &PartialInterpretation) -> Result<bool> {
        if i.universe.len() != self.layout.size {
            return Err(Error::Incompatible("universe size differs".to_string()));
        }
        for (s, p) in self.layout.slots.iter().enumerate() {
            if !self.variables.contains(&s) && !i.covers(p) {
                return Err(Error::Uncovered(p.qualified()));
            }
        }
        let mut ext = self.layout.load(i)?;
        self.check_extents(&mut ext)
    }
}

/// `I ⊨ SM[F; p]`.
pub fn satisfies_sm(
    i: &PartialInterpretation,
    f: &Formula,
    p: &PredicateList,
    config: SearchConfig,
) -> Result<bool> {
    SmChecker::new(f, p, i, config)?.check(i)
}

/// Enumerates the extents of `p` over a fixed interpretation of everything
/// else and keeps the `p`-stable models. Candidates are numbered so the
/// search can be split into ranges.
#[derive(Clone, Debug)]
pub struct StableModelSearch {
    checker: SmChecker,
    fixed: PartialInterpretation,
    template: Vec<Bits>,
    free: Vec<(usize, usize)>,
    facts: bool,
}

/// `F` is `⊤` or a conjunction of ground atoms.
fn is_fact_conjunction(f: &Formula) -> bool {
    f.conjuncts()
        .iter()
        .all(|c| c.is_top() || matches!(c, Formula::Atom(a) if a.is_ground()))
}

impl StableModelSearch {
    pub fn new(
        f: &Formula,
        p: &PredicateList,
        fixed: &PartialInterpretation,
        config: SearchConfig,
    ) -> Result<Self> {
        let mut base = fixed.clone();
        for q in p {
            base.remove_predicate(q);
        }
        for q in f.predicates() {
            if !p.contains(&q) && !base.covers(&q) {
                return Err(Error::Uncovered(q.qualified()));
            }
        }
        let checker = SmChecker::new(f, p, &base, config)?;
        let mut template = checker.layout.load(&base)?;

        let facts = is_fact_conjunction(f) && f.predicates().iter().all(|q| p.contains(q));
        let mut free = Vec::new();
        if facts {
            let mut env = Vec::new();
            for c in f.conjuncts() {
                if let Formula::Atom(a) = c {
                    let slot = checker.layout.index[&a.predicate];
                    let args: Vec<CTerm> = a
                        .args
                        .iter()
                        .map(|t| checker.layout.compile_term(t, &[]))
                        .collect::<Result<_>>()?;
                    let idx = args
                        .iter()
                        .fold(0, |acc, t| acc * checker.layout.size + checker.layout.value(t, &env));
                    set_bit(&mut template[slot], idx, true);
                }
            }
            env.clear();
        } else {
            // an intensional predicate without strictly positive
            // occurrences is empty in every stable model
            let heads = strictly_positive_predicates(f);
            for (k, q) in p.iter().enumerate() {
                if heads.contains(q) {
                    let slot = checker.intensional[k];
                    let n = checker.layout.tuple_count(q.arity)?;
                    free.extend((0..n).map(|t| (slot, t)));
                }
            }
            config.guard(pow2(free.len()))?;
        }
        Ok(StableModelSearch {
            checker,
            fixed: base,
            template,
            free,
            facts,
        })
    }

    pub fn candidate_count(&self) -> u64 {
        1u64 << self.free.len()
    }

    fn interpretation(&self, ext: &[Bits]) -> PartialInterpretation {
        let mut out = self.fixed.clone();
        let layout = &self.checker.layout;
        for &slot in &self.checker.intensional {
            let p = &layout.slots[slot];
            let n = layout.tuple_count(p.arity).expect("checked");
            let tuples = (0..n)
                .filter(|&t| bit(&ext[slot], t))
                .map(|t| layout.tuple_of(t, p.arity))
                .collect();
            out.extents.insert(p.clone(), tuples);
        }
        out
    }

    /// The stable model numbered `candidate`, if that candidate is one.
    pub fn check(&self, candidate: u64) -> Result<Option<PartialInterpretation>> {
        let mut ext = self.template.clone();
        for (i, &(slot, t)) in self.free.iter().enumerate() {
            if candidate >> i & 1 == 1 {
                set_bit(&mut ext[slot], t, true);
            }
        }
        if self.facts {
            return Ok(Some(self.interpretation(&ext)));
        }
        let model = self.checker.check_extents(&mut ext)?;
        Ok(model.then(|| self.interpretation(&ext)))
    }

    pub fn run(&self, range: Range<u64>) -> Result<Vec<PartialInterpretation>> {
        let mut out = Vec::new();
        for c in range {
            if let Some(m) = self.check(c)? {
                out.push(m);
            }
        }
        Ok(out)
    }

    pub fn run_all(&self) -> Result<Vec<PartialInterpretation>> {
        let mut models = self.run(0..self.candidate_count())?;
        sort_models(&mut models);
        Ok(models)
    }
}

/// Canonical order: by the sorted atom sets.
pub fn sort_models(models: &mut Vec<PartialInterpretation>) {
    models.sort_by_cached_key(|m| m.atoms().into_iter().collect::<Vec<_>>());
    models.dedup();
}

/// The `p`-stable models extending `fixed`.
pub fn stable_models(
    f: &Formula,
    p: &PredicateList,
    fixed: &PartialInterpretation,
    config: SearchConfig,
) -> Result<Vec<PartialInterpretation>> {
    StableModelSearch::new(f, p, fixed, config)?.run_all()
}

/// Herbrand base interpretation for `σ(F)`: rejects function symbols and
/// non-propositional signatures without object constants.
pub fn herbrand_base(sig: &Signature) -> Result<PartialInterpretation> {
    if let Some((name, _)) = sig.functions.iter().next() {
        return Err(Error::FunctionSymbols(name.clone()));
    }
    if sig.objects.is_empty() && sig.predicates.iter().any(|p| p.arity > 0) {
        return Err(Error::NoObjectConstant);
    }
    Ok(PartialInterpretation::herbrand(&sig.objects))
}

/// Herbrand interpretations of `σ(F)` satisfying `SM[F]`.
pub fn answer_sets(f: &Formula, config: SearchConfig) -> Result<Vec<PartialInterpretation>> {
    let sig = symbols_of(f);
    let base = herbrand_base(&sig)?;
    let p = PredicateList::from(f.predicates());
    stable_models(f, &p, &base, config)
}

/// Every way of covering `predicates` on top of `base`, in binary-counting
/// order over the tuples.
pub fn all_extensions(
    base: &PartialInterpretation,
    predicates: &[Predicate],
    config: SearchConfig,
) -> Result<Vec<PartialInterpretation>> {
    let layout = Layout::new(base, predicates.iter())?;
    let mut free = Vec::new();
    for p in predicates {
        let n = layout.tuple_count(p.arity)?;
        free.extend((0..n).map(|t| (p, layout.tuple_of(t, p.arity))));
    }
    config.guard(pow2(free.len()))?;
    let mut out = Vec::new();
    for mask in 0..1u64 << free.len() {
        let mut i = base.clone();
        for p in predicates {
            i.extents.insert(p.clone(), BTreeSet::new());
        }
        for (k, (p, t)) in free.iter().enumerate() {
            if mask >> k & 1 == 1 {
                i.extents.get_mut(*p).expect("inserted").insert(t.clone());
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// All Herbrand interpretations of `σ(F)` (plus `extra` predicates) that
/// satisfy `SM[F; p]`; predicates outside `p` range over every extent.
pub fn herbrand_models_sm(
    f: &Formula,
    p: &PredicateList,
    extra: &[Predicate],
    config: SearchConfig,
) -> Result<Vec<PartialInterpretation>> {
    let sig = symbols_of(f);
    let base = herbrand_base(&sig)?;
    let mut inputs: Vec<Predicate> = f
        .predicates()
        .into_iter()
        .chain(extra.iter().cloned())
        .filter(|q| !p.contains(q))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    inputs.dedup();
    let search_base = all_extensions(&base, &inputs, config)?;
    let mut out = Vec::new();
    for b in &search_base {
        out.extend(stable_models(f, p, b, config)?);
    }
    sort_models(&mut out);
    Ok(out)
}

/// Every assignment of the object constants to elements of the universe
/// `{#1, …, #size}`, with no predicate covered.
pub fn object_assignments(
    objects: &BTreeSet<String>,
    size: usize,
    config: SearchConfig,
) -> Result<Vec<PartialInterpretation>> {
    if size == 0 {
        return Err(Error::EmptyUniverse);
    }
    let names: Vec<String> = (1..=size).map(|k| format!("#{k}")).collect();
    let empty = PartialInterpretation::new(names)?;
    let assignments = (size as u128).saturating_pow(objects.len() as u32);
    config.guard(assignments)?;
    let mut out = Vec::new();
    for mut code in 0..assignments as u64 {
        let mut base = empty.clone();
        for o in objects {
            base.objects.insert(o.clone(), (code % size as u64) as usize);
            code /= size as u64;
        }
        out.push(base);
    }
    Ok(out)
}

/// Every interpretation with universe `{#1, …, #size}` of the given object
/// constants and predicates (function-free).
pub fn structures(
    objects: &BTreeSet<String>,
    predicates: &[Predicate],
    size: usize,
    config: SearchConfig,
) -> Result<Vec<PartialInterpretation>> {
    let mut out = Vec::new();
    for base in object_assignments(objects, size, config)? {
        out.extend(all_extensions(&base, predicates, config)?);
    }
    Ok(out)
}

// ---- Gelfond–Lifschitz oracle ----

fn ground_equal(l: &Term, r: &Term) -> Result<bool> {
    if !l.is_ground() || !r.is_ground() {
        return Err(Error::NonGround(format!("{l} = {r}")));
    }
    Ok(l == r)
}

/// Minimal models of the reduct, by brute force over subsets of the atoms.
pub fn gl_answer_sets(program: &Program, config: SearchConfig) -> Result<Vec<BTreeSet<Atom>>> {
    if !program.is_ground() {
        let r = program.rules.iter().find(|r| !r.is_ground()).expect("non-ground rule");
        return Err(Error::NonGround(r.to_string()));
    }
    if let Some(r) = program.rules.iter().find(|r| r.aggregates().next().is_some()) {
        return Err(Error::Aggregate(r.to_string()));
    }
    let atoms: Vec<Atom> = program.atoms().into_iter().collect();
    let index: BTreeMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    config.guard(pow2(atoms.len()))?;

    struct Ground {
        head: Vec<HeadLiteral>,
        body: Vec<BodyLiteral>,
    }
    let rules: Vec<Ground> = program
        .rules
        .iter()
        .map(|r| Ground {
            head: match &r.head {
                Head::Disjunction(lits) => lits.clone(),
                Head::Choice(a) => vec![HeadLiteral::Pos(a.clone()), HeadLiteral::Neg(a.clone())],
            },
            body: r.body.clone(),
        })
        .collect();

    let mut out = Vec::new();
    for x in 0..1u64 << atoms.len() {
        let has = |a: &Atom| x >> index[a] & 1 == 1;
        // reduct: (head atoms, body atoms) as bitmasks
        let mut reduct: Vec<(u64, u64)> = Vec::new();
        'rules: for r in &rules {
            let mut head = 0u64;
            for l in &r.head {
                match l {
                    HeadLiteral::Pos(a) => head |= 1 << index[a],
                    // `not a` in a head behaves like `not not a` in the body
                    HeadLiteral::Neg(a) => {
                        if !has(a) {
                            continue 'rules;
                        }
                    }
                }
            }
            let mut body = 0u64;
            for l in &r.body {
                match l {
                    BodyLiteral::Pos(a) => body |= 1 << index[a],
                    BodyLiteral::Neg(a) => {
                        if has(a) {
                            continue 'rules;
                        }
                    }
                    BodyLiteral::NegNeg(a) => {
                        if !has(a) {
                            continue 'rules;
                        }
                    }
                    BodyLiteral::Equal(l, r) => {
                        if !ground_equal(l, r)? {
                            continue 'rules;
                        }
                    }
                    BodyLiteral::NotEqual(l, r) => {
                        if ground_equal(l, r)? {
                            continue 'rules;
                        }
                    }
                    BodyLiteral::Count(_) => unreachable!("rejected above"),
                }
            }
            reduct.push((head, body));
        }
        let is_model = |y: u64| {
            reduct
                .iter()
                .all(|&(h, b)| b & !y != 0 || h & y != 0)
        };
        if !is_model(x) {
            continue;
        }
        // proper subsets of x, enumerated by the standard submask walk
        let mut minimal = true;
        let mut y = x;
        while y != 0 {
            y = (y - 1) & x;
            if is_model(y) {
                minimal = false;
                break;
            }
        }
        if minimal {
            out.push(
                atoms
                    .iter()
                    .filter(|a| has(a))
                    .cloned()
                    .collect::<BTreeSet<_>>(),
            );
        }
    }
    out.sort();
    Ok(out)
}

impl Default for PartialInterpretation {
    fn default() -> Self {
        Self::herbrand(&BTreeSet::<String>::new())
    }
}

/// `name` of every predicate, with arity when it is ambiguous; for messages.
pub fn describe_predicates(ps: &BTreeSet<Predicate>) -> String {
    ps.iter()
        .map(|p| p.qualified())
        .collect::<Vec<_>>()
        .join(", ")
        .to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::fol_representation;
    use crate::syntax::{parse_atoms, parse_formula, parse_program};

    fn formula_one() -> Formula {
        parse_formula("p(a) & q(b) & forall x (p(x) & ~q(x) -> r(x))").unwrap()
    }

    fn list(items: &[(&str, usize)]) -> PredicateList {
        PredicateList::new(items.iter().map(|(n, a)| Predicate::new(*n, *a)).collect()).unwrap()
    }

    fn interp(f: &Formula, atoms: &str) -> PartialInterpretation {
        let sig = symbols_of(f);
        PartialInterpretation::from_atoms(&sig.objects, sig.predicates.clone(), &parse_atoms(atoms).unwrap())
            .unwrap()
    }

    #[test]
    fn the_only_answer_set_of_formula_one() {
        let models = answer_sets(&formula_one(), SearchConfig::default()).unwrap();
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].to_string(), "{p(a), q(b), r(a)}");
    }

    #[test]
    fn satisfies_sm_examples() {
        let f = formula_one();
        let p = list(&[("p", 1), ("q", 1), ("r", 1)]);
        let cfg = SearchConfig::default();
        assert!(satisfies_sm(&interp(&f, "{p(a), q(b), r(a)}"), &f, &p, cfg).unwrap());
        assert!(!satisfies_sm(&interp(&f, "{p(a), q(b), r(a), r(b)}"), &f, &p, cfg).unwrap());
        // with no intensional predicates SM is just F
        let i = interp(&f, "{p(a), q(b), r(a), r(b)}");
        assert!(satisfies_sm(&i, &f, &PredicateList::empty(), cfg).unwrap());
        assert!(i.evaluate(&f).unwrap());
    }

    #[test]
    fn evaluation_basics() {
        let f = formula_one();
        assert!(interp(&f, "{p(a), q(b), r(a)}").evaluate(&f).unwrap());
        assert!(!interp(&f, "{}").evaluate(&Formula::Falsity).unwrap());
        let g = parse_formula("forall x (p(x) -> q(x))").unwrap();
        let i = PartialInterpretation::from_atoms(
            &["a".to_string()].into_iter().collect::<BTreeSet<_>>(),
            [Predicate::new("p", 1), Predicate::new("q", 1)],
            &BTreeSet::new(),
        )
        .unwrap();
        assert!(i.evaluate(&g).unwrap());
        let err = i.evaluate(&parse_formula("s(a)").unwrap()).unwrap_err();
        assert_eq!(err, Error::Uncovered("s/1".into()));
        assert!(matches!(
            i.evaluate(&parse_formula("p(x)").unwrap()),
            Err(Error::FreeVariable(_))
        ));
    }

    #[test]
    fn answer_sets_of_small_programs() {
        let cfg = SearchConfig::default();
        assert!(answer_sets(&Formula::Falsity, cfg).unwrap().is_empty());
        let p = parse_program("p | q :- r. s. t.").unwrap();
        let models = answer_sets(&fol_representation(&p).unwrap(), cfg).unwrap();
        let shown: Vec<String> = models.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["{s, t}"]);
    }

    #[test]
    fn gl_oracle_examples() {
        let cfg = SearchConfig::default();
        let p = parse_program("p(a). q(b). r(a) :- p(a), not q(a). r(b) :- p(b), not q(b).").unwrap();
        let sets = gl_answer_sets(&p, cfg).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(atoms_to_string(&sets[0]), "{p(a), q(b), r(a)}");
        let loop_ = parse_program("p :- p.").unwrap();
        assert_eq!(gl_answer_sets(&loop_, cfg).unwrap(), [BTreeSet::new()]);
        let disj = parse_program("p | q.").unwrap();
        let shown: Vec<String> = gl_answer_sets(&disj, cfg)
            .unwrap()
            .iter()
            .map(atoms_to_string)
            .collect();
        assert_eq!(shown, ["{p}", "{q}"]);
        let choice = parse_program("{p}.").unwrap();
        assert_eq!(gl_answer_sets(&choice, cfg).unwrap().len(), 2);
        let nn = parse_program("p :- not not p.").unwrap();
        assert_eq!(gl_answer_sets(&nn, cfg).unwrap().len(), 2);
        assert!(matches!(
            gl_answer_sets(&parse_program("p(X) :- q(X).").unwrap(), cfg),
            Err(Error::NonGround(_))
        ));
    }

    #[test]
    fn sm_of_formula_one_matches_its_completion() {
        let f = formula_one();
        let two = parse_formula(
            "forall x ((p(x) -> x = a) & (x = a -> p(x))) & \
             forall x ((q(x) -> x = b) & (x = b -> q(x))) & \
             forall x ((r(x) -> p(x) & ~q(x)) & (p(x) & ~q(x) -> r(x)))",
        )
        .unwrap();
        let cfg = SearchConfig::default();
        let sig = symbols_of(&f);
        let base = PartialInterpretation::herbrand(&sig.objects);
        let preds: Vec<Predicate> = sig.predicates.iter().cloned().collect();
        let all = all_extensions(&base, &preds, cfg).unwrap();
        assert_eq!(all.len(), 64);
        let p = PredicateList::from(sig.predicates.clone());
        let checker = SmChecker::new(&f, &p, &base, cfg).unwrap();
        for i in &all {
            assert_eq!(checker.check(i).unwrap(), i.evaluate(&two).unwrap(), "{i}");
        }
    }

    #[test]
    fn compatibility_and_union() {
        let objects: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let mut i1 = PartialInterpretation::herbrand(&objects);
        i1.add_atom(&Atom::new("e", vec![Term::constant("a"), Term::constant("b")])).unwrap();
        let mut i2 = PartialInterpretation::herbrand(&objects);
        i2.add_atom(&Atom::new("r", vec![Term::constant("a")])).unwrap();
        assert!(i1.compatible(&i2));
        assert!(i1.compatible(&i1));
        let u = i1.union(&i2).unwrap();
        assert_eq!(u.to_string(), "{e(a,b), r(a)}");
        assert_eq!(u.restrict([&Predicate::new("e", 2)]), i1);
        assert_eq!(i1.union(&i1).unwrap(), i1);

        let mut i3 = PartialInterpretation::herbrand(&objects);
        i3.add_atom(&Atom::new("e", vec![Term::constant("b"), Term::constant("a")])).unwrap();
        assert!(!i1.compatible(&i3));
        assert!(matches!(i1.union(&i3), Err(Error::Incompatible(_))));
    }

    #[test]
    fn module_style_search_with_fixed_inputs() {
        // F = ⊤ with output p/0: p is false
        let base = PartialInterpretation::default();
        let models = stable_models(&Formula::top(), &list(&[("p", 0)]), &base, SearchConfig::default()).unwrap();
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].to_string(), "{}");
        assert!(models[0].covers(&Predicate::new("p", 0)));
    }

    #[test]
    fn guard_fails_loudly() {
        let f = parse_formula("forall x forall y (e(x,y) | ~e(x,y)) & k(a) & k(b) & k(c) & k(d) & k(f)").unwrap();
        let err = answer_sets(&f, SearchConfig { max_candidates: 1000 }).unwrap_err();
        assert!(matches!(err, Error::CandidateLimit { .. }));
    }

    #[test]
    fn signatures_without_objects() {
        let cfg = SearchConfig::default();
        assert!(matches!(
            answer_sets(&parse_formula("forall x p(x)").unwrap(), cfg),
            Err(Error::NoObjectConstant)
        ));
        let models = answer_sets(&parse_formula("p & (p -> q)").unwrap(), cfg).unwrap();
        assert_eq!(models[0].to_string(), "{p, q}");
    }

    #[test]
    fn structures_cover_every_assignment() {
        let objects: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let s = structures(&objects, &[Predicate::new("p", 0)], 2, SearchConfig::default()).unwrap();
        assert_eq!(s.len(), 4 * 2);
    }
}
