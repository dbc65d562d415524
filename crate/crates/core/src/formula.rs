//! First-order formulas, terms and signatures.
//!
//! Negation and truth are not primitive: `¬F` is `F → ⊥` and `⊤` is `⊥ → ⊥`.
//! Conjunction and disjunction are binary; [`Formula::conjuncts`] gives the
//! flattened view used for module bookkeeping.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A predicate constant: name plus arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Predicate {
            name: name.into(),
            arity,
        }
    }

    /// `name/arity`, the form used in `#input` and `#output` headers.
    pub fn qualified(&self) -> String {
        format!("{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Variable(String),
    Constant(String),
    Function(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant(name.into())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) => false,
            Term::Constant(_) => true,
            Term::Function(_, args) => args.iter().all(Term::is_ground),
        }
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Variable(v) => {
                out.insert(v.clone());
            }
            Term::Constant(_) => {}
            Term::Function(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Variable(v) if v == var => by.clone(),
            Term::Variable(_) | Term::Constant(_) => self.clone(),
            Term::Function(name, args) => Term::Function(
                name.clone(),
                args.iter().map(|a| a.substitute(var, by)).collect(),
            ),
        }
    }

    fn rename_variable(&self, from: &str, to: &str) -> Term {
        self.substitute(from, &Term::Variable(to.to_string()))
    }
}

/// Step expression of an incrementally parameterized atom: `t`, `t+k`,
/// `t-k` or a fixed `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepExpr {
    Offset(i64),
    Fixed(u64),
}

impl StepExpr {
    pub fn eval(&self, step: u64) -> Option<u64> {
        match *self {
            StepExpr::Fixed(k) => Some(k),
            StepExpr::Offset(k) => {
                let v = step as i128 + k as i128;
                u64::try_from(v).ok()
            }
        }
    }

    pub fn depends_on_counter(&self) -> bool {
        matches!(self, StepExpr::Offset(_))
    }
}

impl fmt::Display for StepExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StepExpr::Fixed(k) => write!(f, "{k}"),
            StepExpr::Offset(0) => f.write_str("t"),
            StepExpr::Offset(k) if k > 0 => write!(f, "t+{k}"),
            StepExpr::Offset(k) => write!(f, "t-{}", k.unsigned_abs()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Predicate,
    /// Present only for incrementally parameterized atoms.
    pub step: Option<StepExpr>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: Predicate::new(name, args.len()),
            step: None,
            args,
        }
    }

    pub fn parameterized(name: impl Into<String>, step: StepExpr, args: Vec<Term>) -> Self {
        Atom {
            predicate: Predicate::new(name, args.len()),
            step: Some(step),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.args.iter().for_each(|t| t.collect_variables(&mut out));
        out
    }

    pub fn substitute(&self, var: &str, by: &Term) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            step: self.step,
            args: self.args.iter().map(|t| t.substitute(var, by)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Equal(Term, Term),
    Falsity,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(name, args))
    }

    /// A 0-ary atom.
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Atom(Atom::new(name, Vec::new()))
    }

    pub fn equal(lhs: Term, rhs: Term) -> Formula {
        Formula::Equal(lhs, rhs)
    }

    pub fn top() -> Formula {
        Formula::Implies(Box::new(Formula::Falsity), Box::new(Formula::Falsity))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Implies(Box::new(f), Box::new(Formula::Falsity))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// Left-nested conjunction; the empty conjunction is `⊤`.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::top(),
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Left-nested disjunction; the empty disjunction is `⊥`.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::Falsity,
            Some(first) => iter.fold(first, Formula::or),
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Implies(a, b) if **a == Formula::Falsity && **b == Formula::Falsity)
    }

    pub fn is_falsity(&self) -> bool {
        matches!(self, Formula::Falsity)
    }

    /// `Some(G)` when the formula is `G → ⊥`.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(a, b) if **b == Formula::Falsity => Some(a),
            _ => None,
        }
    }

    /// Flattens nested conjunctions, left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Equal(..) | Formula::Falsity => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Equal(..) | Formula::Falsity => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
        }
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add_term = |t: &Term, bound: &Vec<String>| {
            for v in t.variables() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Atom(a) => a.args.iter().for_each(|t| add_term(t, bound)),
            Formula::Equal(l, r) => {
                add_term(l, bound);
                add_term(r, bound);
            }
            Formula::Falsity => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// All variable names occurring in the formula, bound or free.
    pub fn all_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_vars(&mut out);
        out
    }

    fn walk_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => a.args.iter().for_each(|t| t.collect_variables(out)),
            Formula::Equal(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
            Formula::Falsity => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk_vars(out);
                b.walk_vars(out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                out.insert(v.clone());
                f.walk_vars(out);
            }
        }
    }

    /// Universally quantifies the free variables, lexicographically
    /// smallest outermost. Sentences come back unchanged.
    pub fn universal_closure(&self) -> Formula {
        self.free_variables()
            .into_iter()
            .rev()
            .fold(self.clone(), |body, v| Formula::forall(v, body))
    }

    /// Capture-avoiding substitution of `by` for the free occurrences of `var`.
    pub fn substitute(&self, var: &str, by: &Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.substitute(var, by)),
            Formula::Equal(l, r) => Formula::Equal(l.substitute(var, by), r.substitute(var, by)),
            Formula::Falsity => Formula::Falsity,
            Formula::And(a, b) => Formula::and(a.substitute(var, by), b.substitute(var, by)),
            Formula::Or(a, b) => Formula::or(a.substitute(var, by), b.substitute(var, by)),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(var, by), b.substitute(var, by))
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                let rebuild = |v: String, body: Formula| match self {
                    Formula::Forall(..) => Formula::forall(v, body),
                    _ => Formula::exists(v, body),
                };
                if v == var || !f.free_variables().contains(var) {
                    return self.clone();
                }
                if by.variables().contains(v) {
                    let mut avoid = f.all_variables();
                    avoid.extend(by.variables());
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(v, &avoid);
                    let renamed = f.rename_free(v, &fresh);
                    rebuild(fresh, renamed.substitute(var, by))
                } else {
                    rebuild(v.clone(), f.substitute(var, by))
                }
            }
        }
    }

    fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom {
                predicate: a.predicate.clone(),
                step: a.step,
                args: a.args.iter().map(|t| t.rename_variable(from, to)).collect(),
            }),
            Formula::Equal(l, r) => {
                Formula::Equal(l.rename_variable(from, to), r.rename_variable(from, to))
            }
            Formula::Falsity => Formula::Falsity,
            Formula::And(a, b) => Formula::and(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_free(from, to), b.rename_free(from, to))
            }
            Formula::Forall(v, _) | Formula::Exists(v, _) if v == from => self.clone(),
            Formula::Forall(v, f) => Formula::forall(v.clone(), f.rename_free(from, to)),
            Formula::Exists(v, f) => Formula::exists(v.clone(), f.rename_free(from, to)),
        }
    }

    /// Renames every bound variable to a name determined by its binding
    /// depth, so alpha-equivalent formulas become structurally equal.
    pub fn canonical(&self) -> Formula {
        fn go(f: &Formula, depth: usize) -> Formula {
            match f {
                Formula::Atom(_) | Formula::Equal(..) | Formula::Falsity => f.clone(),
                Formula::And(a, b) => Formula::and(go(a, depth), go(b, depth)),
                Formula::Or(a, b) => Formula::or(go(a, depth), go(b, depth)),
                Formula::Implies(a, b) => Formula::implies(go(a, depth), go(b, depth)),
                Formula::Forall(v, body) | Formula::Exists(v, body) => {
                    // `#` never occurs in parsed identifiers.
                    let name = format!("#{depth}");
                    let body = go(&body.rename_free(v, &name), depth + 1);
                    match f {
                        Formula::Forall(..) => Formula::forall(name, body),
                        _ => Formula::exists(name, body),
                    }
                }
            }
        }
        go(self, 0)
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || self.canonical() == other.canonical()
    }

    /// Rebuilds the formula with every atom replaced by `f(atom)`.
    pub fn try_map_atoms<E>(
        &self,
        f: &mut impl FnMut(&Atom) -> core::result::Result<Formula, E>,
    ) -> core::result::Result<Formula, E> {
        Ok(match self {
            Formula::Atom(a) => f(a)?,
            Formula::Equal(..) | Formula::Falsity => self.clone(),
            Formula::And(a, b) => Formula::and(a.try_map_atoms(f)?, b.try_map_atoms(f)?),
            Formula::Or(a, b) => Formula::or(a.try_map_atoms(f)?, b.try_map_atoms(f)?),
            Formula::Implies(a, b) => {
                Formula::implies(a.try_map_atoms(f)?, b.try_map_atoms(f)?)
            }
            Formula::Forall(v, body) => Formula::forall(v.clone(), body.try_map_atoms(f)?),
            Formula::Exists(v, body) => Formula::exists(v.clone(), body.try_map_atoms(f)?),
        })
    }

    pub fn map_atoms(&self, mut f: impl FnMut(&Atom) -> Formula) -> Formula {
        let result: core::result::Result<Formula, core::convert::Infallible> =
            self.try_map_atoms(&mut |a| Ok(f(a)));
        match result {
            Ok(f) => f,
            Err(never) => match never {},
        }
    }

    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Equal(..) | Formula::Falsity => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.for_each_atom(f),
        }
    }

    /// The predicate constants occurring in the formula.
    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| {
            out.insert(a.predicate.clone());
        });
        out
    }

    pub fn has_parameterized_atoms(&self) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| found |= a.step.is_some());
        found
    }

    pub fn contains_equality(&self) -> bool {
        match self {
            Formula::Equal(..) => true,
            Formula::Atom(_) | Formula::Falsity => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.contains_equality() || b.contains_equality()
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => f.contains_equality(),
        }
    }
}

/// `base1`, `base2`, … : the first one not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|candidate| !avoid.contains(candidate))
        .expect("unbounded counter")
}

/// Object, function and predicate constants. Used both as a declared
/// signature and as the symbol set of a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub objects: BTreeSet<String>,
    pub functions: BTreeSet<(String, usize)>,
    pub predicates: BTreeSet<Predicate>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Checks that no name is reused across categories or with two arities.
    pub fn validate(&self) -> Result<()> {
        let mut seen: alloc::collections::BTreeMap<&str, (&'static str, usize)> =
            alloc::collections::BTreeMap::new();
        let entries = self
            .objects
            .iter()
            .map(|o| (o.as_str(), "object constant", 0))
            .chain(
                self.functions
                    .iter()
                    .map(|(n, a)| (n.as_str(), "function constant", *a)),
            )
            .chain(
                self.predicates
                    .iter()
                    .map(|p| (p.name.as_str(), "predicate constant", p.arity)),
            );
        for (name, kind, arity) in entries {
            match seen.get(name) {
                None => {
                    seen.insert(name, (kind, arity));
                }
                Some(&(other, _)) if other != kind => {
                    return Err(Error::SymbolClash {
                        name: name.to_string(),
                        first: other,
                        second: kind,
                    })
                }
                Some(&(_, expected)) => {
                    return Err(Error::ArityMismatch {
                        kind,
                        name: name.to_string(),
                        expected,
                        found: arity,
                    })
                }
            }
        }
        Ok(())
    }

    pub fn extend(&mut self, other: &Signature) {
        self.objects.extend(other.objects.iter().cloned());
        self.functions.extend(other.functions.iter().cloned());
        self.predicates.extend(other.predicates.iter().cloned());
    }

    pub fn is_function_free(&self) -> bool {
        self.functions.is_empty()
    }

    /// Every name used by the signature, for fresh-name checks.
    pub fn names(&self) -> BTreeSet<String> {
        self.objects
            .iter()
            .cloned()
            .chain(self.functions.iter().map(|(n, _)| n.clone()))
            .chain(self.predicates.iter().map(|p| p.name.clone()))
            .collect()
    }
}

fn collect_term_symbols(t: &Term, sig: &mut Signature) {
    match t {
        Term::Variable(_) => {}
        Term::Constant(c) => {
            sig.objects.insert(c.clone());
        }
        Term::Function(name, args) => {
            sig.functions.insert((name.clone(), args.len()));
            args.iter().for_each(|a| collect_term_symbols(a, sig));
        }
    }
}

/// The object, function and predicate constants occurring in `f`.
pub fn symbols_of(f: &Formula) -> Signature {
    fn walk(f: &Formula, sig: &mut Signature) {
        match f {
            Formula::Atom(a) => {
                sig.predicates.insert(a.predicate.clone());
                a.args.iter().for_each(|t| collect_term_symbols(t, sig));
            }
            Formula::Equal(l, r) => {
                collect_term_symbols(l, sig);
                collect_term_symbols(r, sig);
            }
            Formula::Falsity => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                walk(a, sig);
                walk(b, sig);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => walk(body, sig),
        }
    }
    let mut sig = Signature::new();
    walk(f, &mut sig);
    sig
}

/// An ordered list of distinct predicate constants.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PredicateList(Vec<Predicate>);

impl PredicateList {
    pub fn new(items: Vec<Predicate>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &items {
            if !seen.insert(p) {
                return Err(Error::DuplicatePredicate(p.qualified()));
            }
        }
        Ok(PredicateList(items))
    }

    pub fn empty() -> Self {
        PredicateList(Vec::new())
    }

    /// Keeps the first occurrence of each predicate.
    pub fn dedup_from<I: IntoIterator<Item = Predicate>>(items: I) -> Self {
        let mut seen = BTreeSet::new();
        PredicateList(
            items
                .into_iter()
                .filter(|p| seen.insert(p.clone()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Predicate> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Predicate] {
        &self.0
    }

    pub fn contains(&self, p: &Predicate) -> bool {
        self.0.contains(p)
    }

    pub fn to_set(&self) -> BTreeSet<Predicate> {
        self.0.iter().cloned().collect()
    }

    /// Members of `self`, then members of `other` not already present.
    pub fn union(&self, other: &PredicateList) -> PredicateList {
        PredicateList::dedup_from(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn difference(&self, other: &PredicateList) -> PredicateList {
        PredicateList(
            self.0
                .iter()
                .filter(|p| !other.contains(p))
                .cloned()
                .collect(),
        )
    }

    pub fn intersection(&self, other: &PredicateList) -> PredicateList {
        PredicateList(self.0.iter().filter(|p| other.contains(p)).cloned().collect())
    }

    pub fn is_disjoint(&self, other: &PredicateList) -> bool {
        self.0.iter().all(|p| !other.contains(p))
    }

    pub fn same_members(&self, other: &PredicateList) -> bool {
        self.to_set() == other.to_set()
    }

    pub fn sorted(&self) -> PredicateList {
        let mut v = self.0.clone();
        v.sort();
        PredicateList(v)
    }
}

impl FromIterator<Predicate> for PredicateList {
    fn from_iter<I: IntoIterator<Item = Predicate>>(iter: I) -> Self {
        PredicateList::dedup_from(iter)
    }
}

impl From<BTreeSet<Predicate>> for PredicateList {
    fn from(set: BTreeSet<Predicate>) -> Self {
        PredicateList(set.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PredicateList {
    type Item = &'a Predicate;
    type IntoIter = core::slice::Iter<'a, Predicate>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for PredicateList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}
