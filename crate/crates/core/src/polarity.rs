//! Occurrence polarity: positive, strictly positive, negative-on, rules.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::formula::{Atom, Formula, Predicate, PredicateList};

/// An atom occurrence together with the number of implications that have
/// it in their antecedent.
#[derive(Clone, Copy, Debug)]
pub struct Occurrence<'a> {
    pub atom: &'a Atom,
    pub antecedents: usize,
}

impl Occurrence<'_> {
    pub fn is_positive(&self) -> bool {
        self.antecedents.is_multiple_of(2)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.antecedents == 0
    }
}

pub fn occurrences(f: &Formula) -> Vec<Occurrence<'_>> {
    fn walk<'a>(f: &'a Formula, depth: usize, out: &mut Vec<Occurrence<'a>>) {
        match f {
            Formula::Atom(atom) => out.push(Occurrence {
                atom,
                antecedents: depth,
            }),
            Formula::Equal(..) | Formula::Falsity => {}
            Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a, depth, out);
                walk(b, depth, out);
            }
            Formula::Implies(a, b) => {
                walk(a, depth + 1, out);
                walk(b, depth, out);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => walk(body, depth, out),
        }
    }
    let mut out = Vec::new();
    walk(f, 0, &mut out);
    out
}

fn any_strictly_positive(f: &Formula, pred: &mut impl FnMut(&Predicate) -> bool) -> bool {
    match f {
        Formula::Atom(a) => pred(&a.predicate),
        Formula::Equal(..) | Formula::Falsity => false,
        Formula::And(a, b) | Formula::Or(a, b) => {
            any_strictly_positive(a, pred) || any_strictly_positive(b, pred)
        }
        Formula::Implies(_, b) => any_strictly_positive(b, pred),
        Formula::Forall(_, body) | Formula::Exists(_, body) => any_strictly_positive(body, pred),
    }
}

/// Predicates with at least one strictly positive occurrence.
pub fn strictly_positive_predicates(f: &Formula) -> BTreeSet<Predicate> {
    let mut out = BTreeSet::new();
    any_strictly_positive(f, &mut |p| {
        out.insert(p.clone());
        false
    });
    out
}

/// True iff no member of `p` occurs strictly positively in `f`.
pub fn is_negative_on(f: &Formula, p: &PredicateList) -> bool {
    !any_strictly_positive(f, &mut |q| p.contains(q))
}

pub fn is_negative_on_set(f: &Formula, p: &BTreeSet<Predicate>) -> bool {
    !any_strictly_positive(f, &mut |q| p.contains(q))
}

/// A member of `p` occurring strictly positively in `f`, if any.
pub fn strictly_positive_witness(f: &Formula, p: &PredicateList) -> Option<Predicate> {
    let mut found = None;
    any_strictly_positive(f, &mut |q| {
        if p.contains(q) {
            found = Some(q.clone());
            true
        } else {
            false
        }
    });
    found
}

/// The predicates occurring strictly positively in `f`, in sorted order.
pub fn head_predicates(f: &Formula) -> PredicateList {
    PredicateList::from(strictly_positive_predicates(f))
}

/// Implications occurring strictly positively, outermost first, left to right.
pub fn rules_of(f: &Formula) -> Vec<&Formula> {
    fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::Atom(_) | Formula::Equal(..) | Formula::Falsity => {}
            Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Formula::Implies(_, b) => {
                out.push(f);
                walk(b, out);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => walk(body, out),
        }
    }
    let mut out = Vec::new();
    walk(f, &mut out);
    out
}
