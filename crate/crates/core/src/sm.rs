//! The SM operator: the star transform and the second-order sentence
//! `F ∧ ¬∃u((u < p) ∧ F*(u))`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::display::Notation;
use crate::error::{Error, Result};
use crate::formula::{symbols_of, Atom, Formula, Predicate, PredicateList, Term};

fn check_lists(p: &PredicateList, u: &[Predicate]) -> Result<()> {
    if p.len() != u.len() {
        return Err(Error::ListMismatch(format!(
            "{} intensional predicates but {} predicate variables",
            p.len(),
            u.len()
        )));
    }
    for (pi, ui) in p.iter().zip(u) {
        if pi.arity != ui.arity {
            return Err(Error::ArityMismatch {
                kind: "predicate variable",
                name: ui.name.clone(),
                expected: pi.arity,
                found: ui.arity,
            });
        }
    }
    Ok(())
}

/// `F*(u)`: members of `p` replaced by the matching `u`, and every
/// implication `F → G` turned into `(F* → G*) ∧ (F → G)`.
pub fn star_transform(f: &Formula, p: &PredicateList, u: &[Predicate]) -> Result<Formula> {
    check_lists(p, u)?;
    for q in f.predicates() {
        if let Some(other) = p.iter().find(|pi| pi.name == q.name && pi.arity != q.arity) {
            return Err(Error::ArityMismatch {
                kind: "predicate constant",
                name: q.name.clone(),
                expected: other.arity,
                found: q.arity,
            });
        }
    }
    Ok(star(f, p, u))
}

fn star(f: &Formula, p: &PredicateList, u: &[Predicate]) -> Formula {
    match f {
        Formula::Atom(a) => match p.iter().position(|pi| *pi == a.predicate) {
            Some(i) => Formula::Atom(Atom {
                predicate: u[i].clone(),
                step: None,
                args: a.args.clone(),
            }),
            None => f.clone(),
        },
        Formula::Equal(..) | Formula::Falsity => f.clone(),
        Formula::And(a, b) => Formula::and(star(a, p, u), star(b, p, u)),
        Formula::Or(a, b) => Formula::or(star(a, p, u), star(b, p, u)),
        Formula::Implies(a, b) => Formula::and(
            Formula::implies(star(a, p, u), star(b, p, u)),
            f.clone(),
        ),
        Formula::Forall(v, body) => Formula::forall(v.clone(), star(body, p, u)),
        Formula::Exists(v, body) => Formula::exists(v.clone(), star(body, p, u)),
    }
}

fn argument_variables(arity: usize) -> Vec<String> {
    match arity {
        0 => Vec::new(),
        1 => alloc::vec![String::from("x")],
        n => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

/// `∀x(a(x) → b(x))`
fn inclusion(a: &Predicate, b: &Predicate) -> Formula {
    let vars = argument_variables(a.arity);
    let args: Vec<Term> = vars.iter().map(|v| Term::var(v.clone())).collect();
    let body = Formula::implies(
        Formula::atom(a.name.clone(), args.clone()),
        Formula::atom(b.name.clone(), args),
    );
    vars.into_iter()
        .rev()
        .fold(body, |f, v| Formula::forall(v, f))
}

/// `(u ≤ p) ∧ ¬(p ≤ u)`
pub fn u_less_than_p(p: &PredicateList, u: &[Predicate]) -> Result<Formula> {
    check_lists(p, u)?;
    let le = Formula::conjunction(u.iter().zip(p).map(|(ui, pi)| inclusion(ui, pi)));
    let ge = Formula::conjunction(p.iter().zip(u).map(|(pi, ui)| inclusion(pi, ui)));
    Ok(Formula::and(le, Formula::not(ge)))
}

/// `SM[F; p]` with its predicate variables spelled out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondOrderSentence {
    pub formula: Formula,
    pub intensional: PredicateList,
    pub variables: Vec<Predicate>,
    /// `(u < p) ∧ F*(u)`
    pub matrix: Formula,
}

/// Predicate variables `u1`, `u2`, … avoiding every name in `f` and `p`.
pub fn fresh_predicate_variables(f: &Formula, p: &PredicateList) -> Vec<Predicate> {
    let mut taken: BTreeSet<String> = symbols_of(f).names();
    taken.extend(f.all_variables());
    taken.extend(p.iter().map(|q| q.name.clone()));
    let mut out = Vec::new();
    let mut i = 1;
    for q in p {
        let name = loop {
            let candidate = format!("u{i}");
            i += 1;
            if !taken.contains(&candidate) {
                break candidate;
            }
        };
        out.push(Predicate::new(name, q.arity));
    }
    out
}

pub fn build_sm(f: &Formula, p: &PredicateList) -> Result<SecondOrderSentence> {
    let u = fresh_predicate_variables(f, p);
    let matrix = Formula::and(u_less_than_p(p, &u)?, star_transform(f, p, &u)?);
    Ok(SecondOrderSentence {
        formula: f.clone(),
        intensional: p.clone(),
        variables: u,
        matrix,
    })
}

/// `⋀ ∀x(p(x) ∨ ¬p(x))` over the list.
pub fn choice_formula(p: &PredicateList) -> Formula {
    Formula::conjunction(p.iter().map(|q| {
        let vars = argument_variables(q.arity);
        let atom = Formula::atom(
            q.name.clone(),
            vars.iter().map(|v| Term::var(v.clone())).collect(),
        );
        let body = Formula::or(atom.clone(), Formula::not(atom));
        vars.into_iter()
            .rev()
            .fold(body, |f, v| Formula::forall(v, f))
    }))
}

pub struct SentenceDisplay<'a> {
    sentence: &'a SecondOrderSentence,
    notation: Notation,
}

impl SecondOrderSentence {
    pub fn display(&self, notation: Notation) -> SentenceDisplay<'_> {
        SentenceDisplay {
            sentence: self,
            notation,
        }
    }
}

impl fmt::Display for SentenceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.sentence;
        let (and, not, exists) = match self.notation {
            Notation::Unicode => (" ∧ ", "¬", "∃"),
            Notation::Ascii => (" & ", "~", "exists "),
        };
        let wrap = matches!(s.formula, Formula::Implies(..) | Formula::Or(..))
            && s.formula.negated().is_none();
        if wrap {
            write!(f, "({})", s.formula.display(self.notation))?;
        } else {
            write!(f, "{}", s.formula.display(self.notation))?;
        }
        f.write_str(and)?;
        f.write_str(not)?;
        if !s.variables.is_empty() {
            f.write_str(exists)?;
            let names: Vec<&str> = s.variables.iter().map(|u| u.name.as_str()).collect();
            f.write_str(&names.join(" "))?;
        }
        write!(f, "({})", s.matrix.display(self.notation))
    }
}

impl fmt::Display for SecondOrderSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(Notation::Unicode).fmt(f)
    }
}
