//! Deterministic pretty-printer with minimal parentheses.
//!
//! Binding strength, loosest first: `→` (right associative), `∨`, `∧`
//! (both left associative), then negation, quantifiers and atoms.

use core::fmt::{self, Write};

use crate::formula::{Atom, Formula, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Notation {
    #[default]
    Unicode,
    Ascii,
}

struct Symbols {
    falsity: &'static str,
    top: &'static str,
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    forall: &'static str,
    exists: &'static str,
    spaced_chain: bool,
}

const UNICODE: Symbols = Symbols {
    falsity: "⊥",
    top: "⊤",
    not: "¬",
    and: " ∧ ",
    or: " ∨ ",
    implies: " → ",
    forall: "∀",
    exists: "∃",
    spaced_chain: false,
};

const ASCII: Symbols = Symbols {
    falsity: "#false",
    top: "#true",
    not: "~",
    and: " & ",
    or: " | ",
    implies: " -> ",
    forall: "forall ",
    exists: "exists ",
    spaced_chain: true,
};

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 5;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) | Term::Constant(v) => f.write_str(v),
            Term::Function(name, args) => {
                f.write_str(name)?;
                write_args(f, args)
            }
        }
    }
}

fn write_args(f: &mut impl Write, args: &[Term]) -> fmt::Result {
    f.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{a}")?;
    }
    f.write_char(')')
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate.name)?;
        if let Some(step) = &self.step {
            write!(f, "@({step})")?;
        }
        if !self.args.is_empty() {
            write_args(f, &self.args)?;
        }
        Ok(())
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    notation: Notation,
}

impl Formula {
    pub fn display(&self, notation: Notation) -> FormulaDisplay<'_> {
        FormulaDisplay {
            formula: self,
            notation,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0, &UNICODE)
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbols = match self.notation {
            Notation::Unicode => &UNICODE,
            Notation::Ascii => &ASCII,
        };
        write_formula(f, self.formula, 0, symbols)
    }
}

fn write_formula(out: &mut impl Write, f: &Formula, ctx: u8, s: &Symbols) -> fmt::Result {
    if f.is_top() {
        return out.write_str(s.top);
    }
    if let Some(inner) = f.negated() {
        out.write_str(s.not)?;
        return write_formula(out, inner, UNARY, s);
    }
    match f {
        Formula::Atom(a) => write!(out, "{a}"),
        Formula::Falsity => out.write_str(s.falsity),
        Formula::Equal(l, r) => {
            if ctx >= UNARY {
                write!(out, "({l} = {r})")
            } else {
                write!(out, "{l} = {r}")
            }
        }
        Formula::And(a, b) => binary(out, a, b, s.and, AND, ctx, s),
        Formula::Or(a, b) => binary(out, a, b, s.or, OR, ctx, s),
        Formula::Implies(a, b) => {
            let paren = ctx > IMPLIES;
            if paren {
                out.write_char('(')?;
            }
            write_formula(out, a, OR, s)?;
            out.write_str(s.implies)?;
            write_formula(out, b, IMPLIES, s)?;
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let q = if matches!(f, Formula::Forall(..)) {
                s.forall
            } else {
                s.exists
            };
            out.write_str(q)?;
            out.write_str(v)?;
            let bare = body.is_top()
                || body.negated().is_some()
                || matches!(**body, Formula::Atom(_) | Formula::Falsity);
            let quantifier = matches!(**body, Formula::Forall(..) | Formula::Exists(..));
            if quantifier {
                if s.spaced_chain {
                    out.write_char(' ')?;
                }
                write_formula(out, body, UNARY, s)
            } else if bare {
                out.write_char(' ')?;
                write_formula(out, body, UNARY, s)
            } else {
                out.write_char('(')?;
                write_formula(out, body, 0, s)?;
                out.write_char(')')
            }
        }
    }
}

fn binary(
    out: &mut impl Write,
    a: &Formula,
    b: &Formula,
    op: &str,
    level: u8,
    ctx: u8,
    s: &Symbols,
) -> fmt::Result {
    let paren = ctx > level;
    if paren {
        out.write_char('(')?;
    }
    write_formula(out, a, level, s)?;
    out.write_str(op)?;
    write_formula(out, b, level + 1, s)?;
    if paren {
        out.write_char(')')?;
    }
    Ok(())
}
