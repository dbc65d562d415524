//! Reading program, formula and module files; canonical text output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use modsm_core::formula::symbols_of;
use modsm_core::herbrand::{atoms_to_string, PartialInterpretation};
use modsm_core::module::FoModule;
use modsm_core::program::{fol_representation, HeadLiteral, Rule};
use modsm_core::syntax::{
    parse_atoms, parse_formula_file, parse_predicate_specs, parse_program_file, resolve_predicates,
    FormulaFile, PredicateSpec, ProgramFile,
};
use modsm_core::{Atom, Formula, Notation, Predicate, PredicateList};

use crate::error::{CliError, Result};

/// A file read either as a logic program or as a list of sentences.
#[derive(Clone, Debug)]
pub enum Source {
    Program(ProgramFile),
    Formula(FormulaFile),
}

impl Source {
    /// The FOL-representation of a program, or the conjunction of the
    /// sentences.
    pub fn formula(&self) -> Result<Formula> {
        Ok(match self {
            Source::Program(p) => fol_representation(&p.program()?)?,
            Source::Formula(f) => f.conjunction(),
        })
    }

    /// One formula per rule, or the top-level conjuncts of each sentence.
    pub fn conjuncts(&self) -> Result<Vec<Formula>> {
        Ok(match self {
            Source::Program(p) => p
                .rules
                .iter()
                .map(|(_, r)| r.to_formula())
                .collect::<Result<_, _>>()?,
            Source::Formula(f) => f
                .formulas
                .iter()
                .flat_map(|(_, g)| g.conjuncts().into_iter().cloned())
                .collect(),
        })
    }

    pub fn rules(&self) -> Option<Vec<Rule>> {
        match self {
            Source::Program(p) => Some(p.rules.iter().map(|(_, r)| r.clone()).collect()),
            Source::Formula(_) => None,
        }
    }

    fn headers(&self) -> (Option<&Vec<PredicateSpec>>, Option<&Vec<PredicateSpec>>) {
        match self {
            Source::Program(p) => (p.inputs.as_ref(), p.outputs.as_ref()),
            Source::Formula(f) => (f.inputs.as_ref(), f.outputs.as_ref()),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses `text` by extension: `.lp` is a program, `.fo` a formula file;
/// anything else is tried as a program first.
pub fn parse_source(path: &Path, text: &str) -> Result<Source> {
    let parse_err = |source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    };
    match path.extension().and_then(|e| e.to_str()) {
        Some("lp") => parse_program_file(text).map(Source::Program).map_err(parse_err),
        Some("fo") => parse_formula_file(text).map(Source::Formula).map_err(parse_err),
        _ => match parse_program_file(text) {
            Ok(p) => Ok(Source::Program(p)),
            Err(as_program) => match parse_formula_file(text) {
                Ok(f) => Ok(Source::Formula(f)),
                Err(as_formula) => Err(CliError::Usage(format!(
                    "{}: not a program ({as_program}) nor a formula file ({as_formula})",
                    path.display()
                ))),
            },
        },
    }
}

pub fn load_source(path: &Path) -> Result<Source> {
    parse_source(path, &read_text(path)?)
}

/// A predicate list from the command line, resolved against the
/// predicates in use.
pub fn predicate_list(text: &str, known: &BTreeSet<Predicate>) -> Result<PredicateList> {
    let specs = parse_predicate_specs(text).map_err(|e| CliError::Usage(format!("`{text}`: {e}")))?;
    Ok(resolve_predicates(&specs, known)?)
}

/// A module read from a file, with the rules it came from when the file is
/// a program.
#[derive(Clone, Debug)]
pub struct LoadedModule {
    pub path: PathBuf,
    pub module: FoModule,
    pub rules: Option<Vec<Rule>>,
    pub warnings: Vec<String>,
}

/// `#input` and `#output` headers declare the lists. A predicate of the
/// formula declared in neither becomes an output, with a warning.
pub fn module_from_source(path: &Path, source: &Source) -> Result<LoadedModule> {
    let conjuncts = source.conjuncts()?;
    let formula = Formula::conjunction(conjuncts.iter().cloned());
    let known = formula.predicates();
    let (inputs, outputs) = source.headers();
    let resolve = |specs: Option<&Vec<PredicateSpec>>| -> Result<PredicateList> {
        Ok(resolve_predicates(specs.map_or(&[][..], |s| s.as_slice()), &known)?)
    };
    let inputs = resolve(inputs)?;
    let outputs = resolve(outputs)?;
    let mut warnings = Vec::new();
    let mut extra = Vec::new();
    for p in &known {
        if !inputs.contains(p) && !outputs.contains(p) {
            warnings.push(format!(
                "{}: {} is declared neither input nor output, treating it as an output",
                path.display(),
                p.qualified()
            ));
            extra.push(p.clone());
        }
    }
    let outputs = outputs.union(&PredicateList::dedup_from(extra));
    let module = FoModule::new(conjuncts, inputs, outputs).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(LoadedModule {
        path: path.to_path_buf(),
        module,
        rules: source.rules(),
        warnings,
    })
}

pub fn load_module(path: &Path) -> Result<LoadedModule> {
    module_from_source(path, &load_source(path)?)
}

fn header(name: &str, list: &PredicateList) -> String {
    let items: Vec<String> = list.iter().map(Predicate::qualified).collect();
    if items.is_empty() {
        format!("#{name}.\n")
    } else {
        format!("#{name} {}.\n", items.join(", "))
    }
}

/// The module as a file that `load_module` reads back. Conjuncts that came
/// from rules are printed as those rules.
pub fn render_module(module: &FoModule, rules: &[Rule], notation: Notation) -> String {
    let mut out = header("input", module.inputs());
    out.push_str(&header("output", module.outputs()));
    for c in module.conjuncts() {
        let rule = rules
            .iter()
            .find(|r| r.to_formula().is_ok_and(|g| g.alpha_eq(c)));
        match rule {
            Some(r) => writeln!(out, "{r}"),
            None => writeln!(out, "{}.", c.display(notation)),
        }
        .expect("write to string");
    }
    out
}

/// Ground atoms given inline (`{p(a), q}`) or as the path of a file
/// holding a model line or facts; headers in a file of facts are ignored.
pub fn load_atoms(arg: &str) -> Result<BTreeSet<Atom>> {
    let path = Path::new(arg);
    if !path.is_file() {
        return parse_atoms(arg).map_err(|e| CliError::Usage(format!("`{arg}`: {e}")));
    }
    let text = read_text(path)?;
    if let Ok(atoms) = parse_atoms(&text) {
        return Ok(atoms);
    }
    let file = parse_program_file(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BTreeSet::new();
    for (_, r) in &file.rules {
        match r.head_literals().as_slice() {
            [HeadLiteral::Pos(a)] if r.body.is_empty() && !r.is_choice() && a.is_ground() => {
                out.insert(a.clone());
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "{}: `{r}` is not a ground fact",
                    path.display()
                )))
            }
        }
    }
    Ok(out)
}

/// A Herbrand interpretation of the module's inputs in which exactly the
/// input atoms among `atoms` hold. Object constants are those of the
/// formula and the atoms. Also returns the predicates of the atoms that
/// were left out.
pub fn input_interpretation(
    module: &FoModule,
    atoms: &BTreeSet<Atom>,
) -> Result<(PartialInterpretation, BTreeSet<Predicate>)> {
    let sig = symbols_of(&module.formula());
    if let Some((name, _)) = sig.functions.iter().next() {
        return Err(modsm_core::Error::FunctionSymbols(name.clone()).into());
    }
    let (used, ignored): (Vec<&Atom>, Vec<&Atom>) =
        atoms.iter().partition(|a| module.inputs().contains(&a.predicate));
    let mut objects = sig.objects;
    for a in &used {
        objects.extend(a.args.iter().map(|t| t.to_string()));
    }
    let i = PartialInterpretation::from_atoms(&objects, module.inputs().iter().cloned(), used)?;
    Ok((i, ignored.into_iter().map(|a| a.predicate.clone()).collect()))
}

/// One model per line in canonical atom order.
pub fn render_models(models: &[PartialInterpretation]) -> String {
    let mut out = String::new();
    for m in models {
        out.push_str(&atoms_to_string(&m.atoms()));
        out.push('\n');
    }
    out
}
