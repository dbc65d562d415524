//! Concrete syntax: programs, formulas, models and predicate lists.
//!
//! Terms follow one naming rule everywhere: an identifier starting with an
//! uppercase letter or `_`, or a lowercase `u`..`z` optionally followed by
//! digits (`x`, `y1`), is a variable; anything else is an object constant.
//! In formulas a name bound by an enclosing quantifier is always a variable.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, Predicate, PredicateList, Signature, StepExpr, Term};
use crate::program::{BodyLiteral, CountAggregate, HeadLiteral, Program, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(u64),
    Directive(String),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const PUNCT: &[(&str, &str)] = &[
    (":-", ":-"),
    ("->", "->"),
    ("!=", "!="),
    ("(", "("),
    (")", ")"),
    ("{", "{"),
    ("}", "}"),
    (",", ","),
    (".", "."),
    (":", ":"),
    (";", ";"),
    ("|", "|"),
    ("=", "="),
    ("@", "@"),
    ("+", "+"),
    ("-", "-"),
    ("/", "/"),
    ("&", "&"),
    ("~", "~"),
    ("←", ":-"),
    ("→", "->"),
    ("≠", "!="),
    ("∧", "&"),
    ("∨", "|"),
    ("¬", "~"),
    ("∀", "forall"),
    ("∃", "exists"),
    ("⊤", "#true"),
    ("⊥", "#false"),
];

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            rest = &rest[1..];
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c == '%' {
            let end = rest.find('\n').unwrap_or(rest.len());
            rest = &rest[end..];
            continue;
        }
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: l,
                column: col,
            })
        };
        if c.is_ascii_digit() {
            let end = rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            let digits = &rest[..end];
            if rest[end..].starts_with(is_ident_start) {
                return Err(Error::Syntax {
                    line: l,
                    column: col,
                    message: format!("malformed number `{}`", &rest[..end + 1]),
                });
            }
            let n = digits.parse().map_err(|_| Error::Syntax {
                line: l,
                column: col,
                message: format!("number `{digits}` is too large"),
            })?;
            push(&mut out, Tok::Number(n));
            column += end;
            rest = &rest[end..];
            continue;
        }
        if is_ident_start(c) || c == '#' {
            let body = if c == '#' { &rest[1..] } else { rest };
            let end = body.find(|ch: char| !is_ident_char(ch)).unwrap_or(body.len());
            if end == 0 {
                return Err(Error::Syntax {
                    line: l,
                    column: col,
                    message: "expected a directive name after `#`".to_string(),
                });
            }
            let word = &body[..end];
            let consumed = end + usize::from(c == '#');
            if c == '#' {
                match word {
                    "true" => push(&mut out, Tok::Punct("#true")),
                    "false" => push(&mut out, Tok::Punct("#false")),
                    _ => push(&mut out, Tok::Directive(word.to_string())),
                }
            } else {
                push(&mut out, Tok::Ident(word.to_string()));
            }
            column += rest[..consumed].chars().count();
            rest = &rest[consumed..];
            continue;
        }
        match PUNCT.iter().find(|(s, _)| rest.starts_with(s)) {
            Some((s, canon)) => {
                push(&mut out, Tok::Punct(canon));
                column += s.chars().count();
                rest = &rest[s.len()..];
            }
            None => {
                return Err(Error::Syntax {
                    line: l,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// Naming convention for terms outside any quantifier scope.
pub fn is_variable_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_uppercase() || c == '_' => true,
        Some('u'..='z') => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
}

/// Where program rules or formulas were placed in a file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub enum Section {
    #[default]
    Base,
    Cumulative,
    Volatile,
}

/// A parsed program file: rules by section plus module headers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProgramFile {
    pub rules: Vec<(Section, Rule)>,
    pub inputs: Option<Vec<PredicateSpec>>,
    pub outputs: Option<Vec<PredicateSpec>>,
    pub has_sections: bool,
}

impl ProgramFile {
    pub fn section(&self, which: Section) -> Vec<Rule> {
        self.rules
            .iter()
            .filter(|(s, _)| *s == which)
            .map(|(_, r)| r.clone())
            .collect()
    }

    /// Every rule in file order.
    pub fn program(&self) -> Result<Program> {
        Program::new(self.rules.iter().map(|(_, r)| r.clone()).collect())
    }
}

/// A parsed formula file: `.`-terminated sentences plus module headers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormulaFile {
    pub formulas: Vec<(Section, Formula)>,
    pub inputs: Option<Vec<PredicateSpec>>,
    pub outputs: Option<Vec<PredicateSpec>>,
    pub has_sections: bool,
}

impl FormulaFile {
    pub fn section(&self, which: Section) -> Formula {
        Formula::conjunction(
            self.formulas
                .iter()
                .filter(|(s, _)| *s == which)
                .map(|(_, f)| f.clone()),
        )
    }

    pub fn conjunction(&self) -> Formula {
        Formula::conjunction(self.formulas.iter().map(|(_, f)| f.clone()))
    }
}

/// `name` or `name/arity` as written in headers and on the command line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PredicateSpec {
    pub name: String,
    pub arity: Option<usize>,
}

/// Resolves specs against the predicates in use. A bare name picks the
/// unique predicate of that name, or arity 0 when the name is unused.
pub fn resolve_predicates(
    specs: &[PredicateSpec],
    known: &BTreeSet<Predicate>,
) -> Result<PredicateList> {
    let mut out = Vec::new();
    for spec in specs {
        let p = match spec.arity {
            Some(a) => Predicate::new(spec.name.clone(), a),
            None => {
                let matches: Vec<&Predicate> =
                    known.iter().filter(|p| p.name == spec.name).collect();
                match matches.as_slice() {
                    [] => Predicate::new(spec.name.clone(), 0),
                    [one] => (*one).clone(),
                    _ => {
                        return Err(Error::ListMismatch(format!(
                            "`{}` is ambiguous, give an arity",
                            spec.name
                        )))
                    }
                }
            }
        };
        out.push(p);
    }
    PredicateList::new(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    counter: String,
    bound: Vec<String>,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            counter: "t".to_string(),
            bound: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Directive(d) => format!("`#{d}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.error(format!("expected `{p}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected an identifier, found {}", self.describe())),
        }
    }

    fn number(&mut self) -> Result<u64> {
        match *self.peek() {
            Tok::Number(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error(format!("expected a number, found {}", self.describe())),
        }
    }

    fn classify(&self, name: String) -> Term {
        if self.bound.contains(&name) || is_variable_name(&name) {
            Term::Variable(name)
        } else {
            Term::Constant(name)
        }
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(Term::Constant(n.to_string()))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat("(") {
                    let args = self.terms()?;
                    Ok(Term::Function(name, args))
                } else {
                    Ok(self.classify(name))
                }
            }
            _ => self.error(format!("expected a term, found {}", self.describe())),
        }
    }

    fn terms(&mut self) -> Result<Vec<Term>> {
        let mut args = alloc::vec![self.term()?];
        while self.eat(",") {
            args.push(self.term()?);
        }
        self.expect(")")?;
        Ok(args)
    }

    fn step(&mut self) -> Result<StepExpr> {
        self.expect("(")?;
        let e = match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                StepExpr::Fixed(n)
            }
            Tok::Ident(name) if name == self.counter => {
                self.bump();
                if self.eat("+") {
                    StepExpr::Offset(self.number()? as i64)
                } else if self.eat("-") {
                    StepExpr::Offset(-(self.number()? as i64))
                } else {
                    StepExpr::Offset(0)
                }
            }
            _ => {
                return self.error(format!(
                    "expected `{}`, `{}+k`, `{}-k` or a number",
                    self.counter, self.counter, self.counter
                ))
            }
        };
        self.expect(")")?;
        Ok(e)
    }

    fn atom_after_name(&mut self, name: String) -> Result<Atom> {
        let step = if self.eat("@") {
            Some(self.step()?)
        } else {
            None
        };
        let args = if self.eat("(") {
            self.terms()?
        } else {
            Vec::new()
        };
        Ok(match step {
            Some(s) => Atom::parameterized(name, s, args),
            None => Atom::new(name, args),
        })
    }

    fn atom(&mut self) -> Result<Atom> {
        let name = self.ident()?;
        self.atom_after_name(name)
    }

    /// Statement-level directives shared by program and formula files.
    fn directive(&mut self, name: &str, state: &mut FileState) -> Result<()> {
        match name {
            "base" => {
                state.section = Section::Base;
                state.has_sections = true;
            }
            "cumulative" | "volatile" => {
                self.counter = self.ident()?;
                state.section = if name == "cumulative" {
                    Section::Cumulative
                } else {
                    Section::Volatile
                };
                state.has_sections = true;
            }
            "input" | "output" => {
                let specs = if self.is(".") {
                    Vec::new()
                } else {
                    self.specs()?
                };
                let slot = if name == "input" {
                    &mut state.inputs
                } else {
                    &mut state.outputs
                };
                slot.get_or_insert_with(Vec::new).extend(specs);
            }
            other => return self.error(format!("unknown directive `#{other}`")),
        }
        self.expect(".")
    }

    fn specs(&mut self) -> Result<Vec<PredicateSpec>> {
        let mut out = Vec::new();
        loop {
            let name = self.ident()?;
            let arity = if self.eat("/") {
                Some(self.number()? as usize)
            } else {
                None
            };
            out.push(PredicateSpec { name, arity });
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    // ---- programs ----

    fn rule(&mut self) -> Result<Rule> {
        let choice = if self.is("{") {
            self.bump();
            let a = self.atom()?;
            self.expect("}")?;
            Some(a)
        } else {
            None
        };
        let mut head = Vec::new();
        if choice.is_none() && !self.is(":-") {
            loop {
                if self.is_word("not") {
                    self.bump();
                    head.push(HeadLiteral::Neg(self.atom()?));
                } else {
                    head.push(HeadLiteral::Pos(self.atom()?));
                }
                if !(self.eat(";") || self.eat("|")) {
                    break;
                }
            }
        }
        let mut body = Vec::new();
        if self.eat(":-") {
            loop {
                body.push(self.body_literal()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(".")?;
        Ok(match choice {
            Some(a) => Rule::choice(a, body),
            None => Rule::new(head, body),
        })
    }

    fn body_literal(&mut self) -> Result<BodyLiteral> {
        if self.is_word("not") && !matches!(self.peek_at(1), Tok::Punct("=" | "!=" | "(" | "@")) {
            self.bump();
            if self.is_word("not")
                && !matches!(self.peek_at(1), Tok::Punct("=" | "!=" | "(" | "@"))
            {
                self.bump();
                return Ok(BodyLiteral::NegNeg(self.atom()?));
            }
            if matches!(self.peek(), Tok::Number(_)) && matches!(self.peek_at(1), Tok::Punct("{")) {
                let mut agg = self.aggregate()?;
                agg.negated = true;
                return Ok(BodyLiteral::Count(agg));
            }
            return Ok(BodyLiteral::Neg(self.atom()?));
        }
        if matches!(self.peek(), Tok::Number(_)) && matches!(self.peek_at(1), Tok::Punct("{")) {
            return Ok(BodyLiteral::Count(self.aggregate()?));
        }
        if matches!(self.peek(), Tok::Number(_)) {
            let l = self.term()?;
            return self.comparison(l);
        }
        let name = self.ident()?;
        if self.is("=") || self.is("!=") {
            let l = self.classify(name);
            return self.comparison(l);
        }
        let atom = self.atom_after_name(name)?;
        if self.is("=") || self.is("!=") {
            if atom.step.is_some() {
                return self.error("a parameterized atom is not a term");
            }
            let l = Term::Function(atom.predicate.name, atom.args);
            return self.comparison(l);
        }
        Ok(BodyLiteral::Pos(atom))
    }

    fn comparison(&mut self, lhs: Term) -> Result<BodyLiteral> {
        if self.eat("=") {
            Ok(BodyLiteral::Equal(lhs, self.term()?))
        } else if self.eat("!=") {
            Ok(BodyLiteral::NotEqual(lhs, self.term()?))
        } else {
            self.error(format!("expected `=` or `!=`, found {}", self.describe()))
        }
    }

    fn aggregate(&mut self) -> Result<CountAggregate> {
        let bound = self.number()?;
        if bound < 1 {
            return Err(Error::AggregateBound);
        }
        self.expect("{")?;
        let mut variables = Vec::new();
        loop {
            let v = self.ident()?;
            if !is_variable_name(&v) {
                return self.error(format!("`{v}` is not a variable"));
            }
            variables.push(v);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(":")?;
        let mut elements = Vec::new();
        loop {
            let l = self.body_literal()?;
            if matches!(l, BodyLiteral::Count(_)) {
                return self.error("nested aggregates are not supported");
            }
            elements.push(l);
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(CountAggregate {
            negated: false,
            bound,
            variables,
            elements,
        })
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat("~") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_word("not") && !matches!(self.peek_at(1), Tok::Punct("=" | "!=" | "(" | "@")) {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        let quantifier = if self.eat("forall") {
            Some(true)
        } else if self.eat("exists") {
            Some(false)
        } else if (self.is_word("forall") || self.is_word("exists"))
            && matches!(self.peek_at(1), Tok::Ident(_))
        {
            let universal = self.is_word("forall");
            self.bump();
            Some(universal)
        } else {
            None
        };
        if let Some(universal) = quantifier {
            let v = self.ident()?;
            self.bound.push(v.clone());
            let body = self.unary();
            self.bound.pop();
            let body = body?;
            return Ok(if universal {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula> {
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("#true") {
            return Ok(Formula::top());
        }
        if self.eat("#false") {
            return Ok(Formula::Falsity);
        }
        let lhs = match self.peek().clone() {
            Tok::Number(_) => self.term()?,
            Tok::Ident(name) => {
                self.bump();
                if self.is("=") || self.is("!=") {
                    self.classify(name)
                } else {
                    let atom = self.atom_after_name(name)?;
                    if !(self.is("=") || self.is("!=")) {
                        return Ok(Formula::Atom(atom));
                    }
                    if atom.step.is_some() {
                        return self.error("a parameterized atom is not a term");
                    }
                    Term::Function(atom.predicate.name, atom.args)
                }
            }
            _ => return self.error(format!("expected a formula, found {}", self.describe())),
        };
        if self.eat("=") {
            Ok(Formula::equal(lhs, self.term()?))
        } else if self.eat("!=") {
            Ok(Formula::not(Formula::equal(lhs, self.term()?)))
        } else {
            self.error(format!("expected `=` or `!=`, found {}", self.describe()))
        }
    }
}

#[derive(Default)]
struct FileState {
    section: Section,
    has_sections: bool,
    inputs: Option<Vec<PredicateSpec>>,
    outputs: Option<Vec<PredicateSpec>>,
}

/// Rejects `p_3` next to a parameterized `p`, and inconsistent arities.
fn check_names(atoms: &[&Atom], extra: &Signature) -> Result<()> {
    let mut sig = extra.clone();
    let mut stepped: BTreeSet<&str> = BTreeSet::new();
    let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
    for a in atoms {
        if let Some(&prev) = arities.get(a.predicate.name.as_str()) {
            if prev != a.predicate.arity {
                return Err(Error::ArityMismatch {
                    kind: "predicate constant",
                    name: a.predicate.name.clone(),
                    expected: prev,
                    found: a.predicate.arity,
                });
            }
        }
        arities.insert(&a.predicate.name, a.predicate.arity);
        if a.step.is_some() {
            stepped.insert(&a.predicate.name);
        }
        sig.predicates.insert(a.predicate.clone());
    }
    for a in atoms.iter().filter(|a| a.step.is_none()) {
        if let Some((base, index)) = a.predicate.name.rsplit_once('_') {
            if !index.is_empty()
                && index.chars().all(|c| c.is_ascii_digit())
                && stepped.contains(base)
            {
                return Err(Error::StepNameCollision(a.predicate.name.clone()));
            }
        }
    }
    sig.validate()
}

pub fn parse_program_file(text: &str) -> Result<ProgramFile> {
    let mut p = Parser::new(text)?;
    let mut state = FileState::default();
    let mut rules = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Directive(d) => {
                p.bump();
                p.directive(&d, &mut state)?;
            }
            _ => rules.push((state.section, p.rule()?)),
        }
    }
    let all: Vec<Rule> = rules.iter().map(|(_, r)| r.clone()).collect();
    let atoms: Vec<&Atom> = all.iter().flat_map(Rule::atoms).collect();
    check_names(&atoms, &Program::new(all.clone())?.signature)?;
    Ok(ProgramFile {
        rules,
        inputs: state.inputs,
        outputs: state.outputs,
        has_sections: state.has_sections,
    })
}

/// All rules of a program text; section markers and headers are accepted
/// and ignored.
pub fn parse_program(text: &str) -> Result<Program> {
    parse_program_file(text)?.program()
}

pub fn parse_formula_file(text: &str) -> Result<FormulaFile> {
    let mut p = Parser::new(text)?;
    let mut state = FileState::default();
    let mut formulas = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Directive(d) => {
                p.bump();
                p.directive(&d, &mut state)?;
            }
            _ => {
                let f = p.formula()?;
                p.expect(".")?;
                formulas.push((state.section, f));
            }
        }
    }
    let mut sig = Signature::new();
    let mut atoms: Vec<&Atom> = Vec::new();
    for (_, f) in &formulas {
        f.for_each_atom(&mut |a| atoms.push(a));
        sig.extend(&crate::formula::symbols_of(f));
    }
    check_names(&atoms, &sig)?;
    Ok(FormulaFile {
        formulas,
        inputs: state.inputs,
        outputs: state.outputs,
        has_sections: state.has_sections,
    })
}

/// A single formula; a trailing `.` is optional.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.eat(".");
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after formula", p.describe()));
    }
    let mut atoms: Vec<&Atom> = Vec::new();
    f.for_each_atom(&mut |a| atoms.push(a));
    check_names(&atoms, &crate::formula::symbols_of(&f))?;
    Ok(f)
}

/// Ground atoms written as `{p(a), q(b)}`, as facts `p(a). q(b).`, or
/// separated by whitespace. Every argument is an object constant.
pub fn parse_atoms(text: &str) -> Result<BTreeSet<Atom>> {
    let mut p = Parser::new(text)?;
    let mut out = BTreeSet::new();
    loop {
        match p.peek() {
            Tok::Eof => break,
            Tok::Punct("{" | "}" | "," | ".") => {
                p.bump();
            }
            _ => {
                let name = p.ident()?;
                let args = if p.eat("(") {
                    let mut args = Vec::new();
                    loop {
                        let t = match p.bump() {
                            Tok::Ident(s) => s,
                            Tok::Number(n) => n.to_string(),
                            _ => return p.error("expected an object constant"),
                        };
                        args.push(Term::Constant(t));
                        if !p.eat(",") {
                            break;
                        }
                    }
                    p.expect(")")?;
                    args
                } else {
                    Vec::new()
                };
                out.insert(Atom::new(name, args));
            }
        }
    }
    let atoms: Vec<&Atom> = out.iter().collect();
    check_names(&atoms, &Signature::new())?;
    Ok(out)
}

/// `p/1, q, r/0` as used by `--input` and friends.
pub fn parse_predicate_specs(text: &str) -> Result<Vec<PredicateSpec>> {
    let mut p = Parser::new(text)?;
    if *p.peek() == Tok::Eof {
        return Ok(Vec::new());
    }
    let specs = p.specs()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.describe()));
    }
    Ok(specs)
}

/// The canonical text of a predicate spec list.
pub fn specs_to_string(specs: &[PredicateSpec]) -> String {
    specs
        .iter()
        .map(|s| match s.arity {
            Some(a) => format!("{}/{a}", s.name),
            None => s.name.to_owned(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::fol_representation;
    use alloc::vec;

    #[test]
    fn variable_convention() {
        for v in ["X", "_", "Node", "x", "y1", "z"] {
            assert!(is_variable_name(v), "{v}");
        }
        for c in ["a", "b", "t", "xa", "alice"] {
            assert!(!is_variable_name(c), "{c}");
        }
    }

    #[test]
    fn parses_the_running_example() {
        let p = parse_program("p(a). q(b).\nr(x) :- p(x), not q(x).").unwrap();
        assert_eq!(p.rules.len(), 3);
        assert_eq!(p.rules[2].to_string(), "r(x) :- p(x), not q(x).");
        assert_eq!(
            fol_representation(&p).unwrap().to_string(),
            "p(a) ∧ q(b) ∧ ∀x(p(x) ∧ ¬q(x) → r(x))"
        );
    }

    #[test]
    fn parses_choice_constraint_and_aggregate() {
        let text = "{in_clique(X)} :- reachable(X).\n\
                    :- in_clique(X), in_clique(Y), not edge(X,Y), X != Y.\n\
                    :- not 2 {X : in_clique(X)}.";
        let p = parse_program(text).unwrap();
        assert!(p.rules[0].is_choice());
        let agg: Vec<_> = p.rules[2].aggregates().collect();
        assert_eq!(agg.len(), 1);
        assert!(agg[0].negated);
        assert_eq!(agg[0].bound, 2);
        assert_eq!(p.rules[2].to_string(), ":- not 2 { X : in_clique(X) }.");
        let f = fol_representation(&p).unwrap();
        let third = f.conjuncts()[2].to_string();
        assert_eq!(third, "¬¬∃X1∃X2(in_clique(X1) ∧ in_clique(X2) ∧ ¬(X1 = X2))");
    }

    #[test]
    fn parses_heads_and_double_negation() {
        let p = parse_program("p ; q :- r.\nt | u.\nv ← not not w.").unwrap();
        assert_eq!(p.rules[0].to_string(), "p ; q :- r.");
        assert_eq!(p.rules[1].to_string(), "t ; u.");
        assert_eq!(p.rules[2].to_string(), "v :- not not w.");
        assert!(parse_program("s :- .").is_err());
    }

    #[test]
    fn reports_positions() {
        let err = parse_program("p(a).\nq(b) :- r(.").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, column: 11, .. }), "{err:?}");
        let err = parse_program("p(a). p(a,b).").unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { .. }));
        let err = parse_program("p(p).").unwrap_err();
        assert!(matches!(err, Error::SymbolClash { .. }));
        assert_eq!(parse_program(":- not 0 {X : p(X)}.").unwrap_err(), Error::AggregateBound);
    }

    #[test]
    fn parameterized_atoms_and_sections() {
        let text = "#base.\np@(0).\n#cumulative t.\np@(t+1)(x) :- p@(t)(x), not q(x).\n#volatile t.\n:- not p@(t).";
        let err = parse_program_file(text).unwrap_err();
        // p@(0) is 0-ary while p@(t)(x) is unary
        assert!(matches!(err, Error::ArityMismatch { .. }));

        let text = "#base.\nb.\n#cumulative t.\np@(t+1)(x) :- p@(t)(x), not q(x).\n#volatile t.\n:- q(a).";
        let file = parse_program_file(text).unwrap();
        assert!(file.has_sections);
        assert_eq!(file.section(Section::Cumulative)[0].to_string(), "p@(t+1)(x) :- p@(t)(x), not q(x).");
        assert_eq!(file.section(Section::Volatile).len(), 1);

        let err = parse_program("p@(t). p_1.").unwrap_err();
        assert_eq!(err, Error::StepNameCollision("p_1".into()));
    }

    #[test]
    fn module_headers() {
        let file = parse_program_file("#input q/0, r.\n#output p/0, s.\np | q :- r.\ns.").unwrap();
        let known = file.program().unwrap().signature.predicates;
        let inputs = resolve_predicates(file.inputs.as_ref().unwrap(), &known).unwrap();
        assert_eq!(inputs.to_string(), "{q, r}");
    }

    #[test]
    fn formulas_in_both_notations() {
        let f = parse_formula("forall x (p(x) & ~q(x) -> r(x))").unwrap();
        let g = parse_formula("∀x(p(x) ∧ ¬q(x) → r(x))").unwrap();
        assert_eq!(f, g);
        assert_eq!(f.to_string(), "∀x(p(x) ∧ ¬q(x) → r(x))");
        let h = parse_formula("(p -> q) & (q -> r) & (t & not r -> s)").unwrap();
        assert_eq!(h.to_string(), "(p → q) ∧ (q → r) ∧ (t ∧ ¬r → s)");
        let e = parse_formula("forall A (A != b | #false -> #true)").unwrap();
        assert_eq!(e.to_string(), "∀A(¬(A = b) ∨ ⊥ → ⊤)");
        let r = parse_formula("p -> q -> r").unwrap();
        assert_eq!(r, parse_formula("p -> (q -> r)").unwrap());
    }

    #[test]
    fn bound_names_are_variables() {
        let f = parse_formula("exists a p(a)").unwrap();
        assert!(f.is_sentence());
        assert_eq!(f, Formula::exists("a", Formula::atom("p", vec![Term::var("a")])));
        let g = parse_formula("p(a) & exists a q(a)").unwrap();
        assert_eq!(g.conjuncts()[0], &Formula::atom("p", vec![Term::constant("a")]));
    }

    #[test]
    fn printed_formulas_reparse() {
        for text in [
            "p(a) ∧ q(b) ∧ ∀x(p(x) ∧ ¬q(x) → r(x))",
            "∀X∀Y edge(X,Y)",
            "(p → q) → r",
            "u ∧ (¬v ∧ ¬q)",
            "¬¬∃X1∃X2(c(X1) ∧ c(X2) ∧ ¬(X1 = X2))",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(f.to_string(), text);
            let ascii = f.display(crate::Notation::Ascii).to_string();
            assert_eq!(parse_formula(&ascii).unwrap(), f, "{ascii}");
        }
    }

    #[test]
    fn models_and_specs() {
        let m = parse_atoms("{p(a), q(b), r(a)}").unwrap();
        assert_eq!(m.len(), 3);
        assert!(parse_atoms("{}").unwrap().is_empty());
        assert_eq!(parse_atoms("edge(a,b). at(a).").unwrap().len(), 2);
        let specs = parse_predicate_specs("t, m/0, edge/2").unwrap();
        assert_eq!(specs_to_string(&specs), "t, m/0, edge/2");
    }

    #[test]
    fn formula_file_sections() {
        let file = parse_formula_file(
            "#input t/0.\n(p -> q).\n#cumulative t.\np@(t-1) -> p@(t).",
        )
        .unwrap();
        assert_eq!(file.formulas.len(), 2);
        assert_eq!(file.section(Section::Cumulative).to_string(), "p@(t-1) → p@(t)");
    }
}
