//! Command-line surface. Every command writes its result to a string so
//! tests can run it without a process.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use modsm_core::deps::{check_split, dependency_graph, split_counterexample};
use modsm_core::herbrand::{
    all_extensions, herbrand_base, PartialInterpretation, SearchConfig, DEFAULT_MAX_CANDIDATES,
};
use modsm_core::incremental::{
    acyclic_check, assemble, dm_instantiate, fm_instantiate, incremental_solve, k_expansion, IncrementalTheory,
};
use modsm_core::module::{join_with_shared, joinable, joinable_with_shared, FoModule};
use modsm_core::program::fol_representation;
use modsm_core::sm::build_sm;
use modsm_core::formula::symbols_of;
use modsm_core::{Formula, Notation, PredicateList};

use crate::error::{CliError, Result};
use crate::io::{self, LoadedModule, Source};
use crate::parallel::{run_search, stable_models_over};
use crate::suites::Suite;

#[derive(Debug, Parser)]
#[command(name = "modsm", version, about = "Stable models, splitting and modules of first-order formulas")]
pub struct Cli {
    /// Print formulas with logical symbols instead of ASCII.
    #[arg(long, global = true)]
    pub unicode: bool,

    /// Refuse searches with more candidates than this.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CANDIDATES)]
    pub max_candidates: u64,

    /// Worker threads for model search.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the FOL-representation of a program.
    Fol { file: PathBuf },

    /// Print SM[F; p].
    Sm {
        file: PathBuf,
        /// Intensional predicates; all predicates of the formula by default.
        #[arg(long)]
        intensional: Option<String>,
    },

    /// Print the stable models, one per line.
    Solve {
        file: PathBuf,
        /// Intensional predicates; the others range over every extent.
        #[arg(long)]
        intensional: Option<String>,
        /// Print only the number of models.
        #[arg(long)]
        count: bool,
    },

    /// Print the predicate dependency graph in DOT.
    Deps {
        file: PathBuf,
        #[arg(long)]
        intensional: Option<String>,
    },

    /// Check whether SM[F ∧ G ∧ H; pq] splits into SM[F ∧ H; p] ∧ SM[G ∧ H; q].
    Split {
        first: PathBuf,
        second: PathBuf,
        /// File holding the shared part H.
        #[arg(long)]
        shared: Option<PathBuf>,
        /// Defaults to the head predicates of F ∧ H outside q.
        #[arg(long)]
        p: Option<String>,
        /// Defaults to the head predicates of G.
        #[arg(long)]
        q: Option<String>,
        /// Also compare both sides on every structure of up to this many elements.
        #[arg(long)]
        bound: Option<usize>,
    },

    /// Stable models of a module for one interpretation of its inputs.
    Modsolve {
        module: PathBuf,
        /// Input atoms, inline as `{p(a), q}` or a file of facts.
        #[arg(long, default_value = "")]
        input: String,
    },

    /// Join two modules and print the result as a module file.
    Join {
        first: PathBuf,
        second: PathBuf,
        /// File whose sentences or rules are the shared part, instead of
        /// the common conjuncts.
        #[arg(long)]
        shared: Option<PathBuf>,
    },

    /// Module instantiation with its iteration trace.
    Instantiate {
        file: PathBuf,
        /// Input predicates (or atoms, with --dm).
        #[arg(long, default_value = "")]
        input: String,
        /// Ground program instantiation instead of the formula one.
        #[arg(long)]
        dm: bool,
    },

    /// Assemble an incremental theory up to step k and print its models.
    Incr {
        file: PathBuf,
        #[arg(long)]
        step: u64,
        /// Compare with the answer sets of the k-expansion.
        #[arg(long)]
        check: bool,
    },

    /// Run a randomized property suite.
    Verify {
        /// One of oracle, module-theorem, join-laws, dlp-modules,
        /// incremental, projection, splitting, instantiation, dm-fm, all.
        suite: String,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest universe for first-order checks.
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
}

/// Output of a command: stdout text, warnings for stderr, and the error
/// that decides the exit status.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub error: Option<CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, CliError::exit_code)
    }
}

struct Ctx {
    notation: Notation,
    config: SearchConfig,
    jobs: usize,
    out: String,
    err: String,
}

impl Ctx {
    fn formula(&self, f: &Formula) -> String {
        f.display(self.notation).to_string()
    }

    fn module(&self, m: &FoModule) -> String {
        format!("({}, {}, {})", self.formula(&m.formula()), m.inputs(), m.outputs())
    }

    fn warn(&mut self, module: &LoadedModule) {
        for w in &module.warnings {
            writeln!(self.err, "warning: {w}").expect("write to string");
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    let mut ctx = Ctx {
        notation: if cli.unicode {
            Notation::Unicode
        } else {
            Notation::Ascii
        },
        config: SearchConfig {
            max_candidates: cli.max_candidates,
        },
        jobs: cli.jobs.max(1),
        out: String::new(),
        err: String::new(),
    };
    let result = dispatch(&mut ctx, cli.command);
    Outcome {
        stdout: ctx.out,
        stderr: ctx.err,
        error: result.err(),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let text = e.render().to_string();
            let usage = !matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            Outcome {
                stdout: if usage { String::new() } else { text.clone() },
                stderr: if usage { text.clone() } else { String::new() },
                error: usage.then(|| CliError::Usage(text.trim_end().to_owned())),
            }
        }
    }
}

fn formula_of(path: &Path) -> Result<Formula> {
    io::load_source(path)?.formula()
}

fn intensional(f: &Formula, arg: Option<&str>) -> Result<PredicateList> {
    match arg {
        Some(text) => io::predicate_list(text, &f.predicates()),
        None => Ok(PredicateList::from(f.predicates())),
    }
}

fn dispatch(ctx: &mut Ctx, command: Command) -> Result<()> {
    match command {
        Command::Fol { file } => {
            let f = match io::load_source(&file)? {
                Source::Program(p) => fol_representation(&p.program()?)?,
                Source::Formula(_) => {
                    return Err(CliError::Usage(format!("{}: not a program", file.display())))
                }
            };
            let line = ctx.formula(&f);
            writeln!(ctx.out, "{line}").expect("write to string");
        }
        Command::Sm { file, intensional: p } => {
            let f = formula_of(&file)?;
            let p = intensional(&f, p.as_deref())?;
            let sentence = build_sm(&f, &p)?;
            writeln!(ctx.out, "{}", sentence.display(ctx.notation)).expect("write to string");
        }
        Command::Solve {
            file,
            intensional: p,
            count,
        } => {
            let f = formula_of(&file)?;
            let p = intensional(&f, p.as_deref())?;
            let base = herbrand_base(&symbols_of(&f))?;
            let inputs: Vec<_> = f.predicates().into_iter().filter(|q| !p.contains(q)).collect();
            let bases = all_extensions(&base, &inputs, ctx.config)?;
            let models = stable_models_over(&f, &p, &bases, ctx.config, ctx.jobs)?;
            if count {
                writeln!(ctx.out, "{}", models.len()).expect("write to string");
            } else {
                ctx.out.push_str(&io::render_models(&models));
            }
        }
        Command::Deps { file, intensional: p } => {
            let f = formula_of(&file)?;
            let p = intensional(&f, p.as_deref())?;
            ctx.out.push_str(&dependency_graph(&f, &p).to_dot());
        }
        Command::Split {
            first,
            second,
            shared,
            p,
            q,
            bound,
        } => split(ctx, &first, &second, shared.as_deref(), p, q, bound)?,
        Command::Modsolve { module, input } => {
            let m = io::load_module(&module)?;
            ctx.warn(&m);
            let atoms = io::load_atoms(&input)?;
            let (fixed, ignored) = io::input_interpretation(&m.module, &atoms)?;
            for p in ignored {
                writeln!(ctx.err, "warning: ignoring atoms of {}, not an input", p.qualified())
                    .expect("write to string");
            }
            let search = modsm_core::herbrand::StableModelSearch::new(
                &m.module.formula(),
                m.module.outputs(),
                &fixed,
                ctx.config,
            )?;
            let models = run_search(&search, ctx.jobs)?;
            ctx.out.push_str(&io::render_models(&models));
        }
        Command::Join {
            first,
            second,
            shared,
        } => join(ctx, &first, &second, shared.as_deref())?,
        Command::Instantiate { file, input, dm } => {
            let source = io::load_source(&file)?;
            if dm {
                let Source::Program(p) = &source else {
                    return Err(CliError::Usage("--dm needs a ground program".into()));
                };
                let inputs = io::load_atoms(&input)?;
                let module = dm_instantiate(&p.program()?, &inputs)?;
                writeln!(ctx.out, "DM = {module}").expect("write to string");
            } else {
                let f = source.formula()?;
                let inputs = io::predicate_list(&input, &f.predicates())?;
                let inst = fm_instantiate(&f, &inputs)?;
                ctx.out.push_str(&inst.render(ctx.notation));
            }
        }
        Command::Incr { file, step, check } => incr(ctx, &file, step, check)?,
        Command::Verify {
            suite,
            count,
            seed,
            bound,
        } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![Suite::from_name(&suite).ok_or_else(|| {
                    let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                    CliError::Usage(format!("unknown suite `{suite}`, expected one of {} or all", names.join(", ")))
                })?]
            };
            let mut failed = Vec::new();
            for s in suites {
                let wanted = count.unwrap_or(s.default_count());
                let report = s.run(wanted, seed, bound, ctx.config);
                writeln!(ctx.out, "{report}").expect("write to string");
                if !report.passed(wanted) {
                    failed.push(s.name());
                }
            }
            if !failed.is_empty() {
                return Err(CliError::Failed(format!("suites failed: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn split(
    ctx: &mut Ctx,
    first: &Path,
    second: &Path,
    shared: Option<&Path>,
    p: Option<String>,
    q: Option<String>,
    bound: Option<usize>,
) -> Result<()> {
    let f = formula_of(first)?;
    let g = formula_of(second)?;
    let h = match shared {
        Some(path) => formula_of(path)?,
        None => Formula::top(),
    };
    let known: BTreeSet<_> = [&f, &g, &h].iter().flat_map(|x| x.predicates()).collect();
    let q = match q {
        Some(text) => io::predicate_list(&text, &known)?,
        None => modsm_core::polarity::head_predicates(&g),
    };
    let p = match p {
        Some(text) => io::predicate_list(&text, &known)?,
        None => modsm_core::polarity::head_predicates(&Formula::and(f.clone(), h.clone())).difference(&q),
    };
    let report = check_split(&f, &g, &h, &p, &q);
    writeln!(ctx.out, "{report}").expect("write to string");
    if let Some(bound) = bound {
        match split_counterexample(&f, &g, &h, &p, &q, bound, ctx.config)? {
            None => writeln!(ctx.out, "equivalent on every structure of size at most {bound}"),
            Some(i) => writeln!(ctx.out, "sides differ on {i}"),
        }
        .expect("write to string");
    }
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(CliError::Failed(format!("condition {c} fails"))),
    }
}

fn join(ctx: &mut Ctx, first: &Path, second: &Path, shared: Option<&Path>) -> Result<()> {
    let m1 = io::load_module(first)?;
    let m2 = io::load_module(second)?;
    ctx.warn(&m1);
    ctx.warn(&m2);
    let h = match shared {
        Some(path) => Some(io::load_source(path)?.conjuncts()?),
        None => None,
    };
    let report = match &h {
        Some(h) => joinable_with_shared(&m1.module, &m2.module, h)?,
        None => joinable(&m1.module, &m2.module),
    };
    if let Some(failure) = &report.failure {
        writeln!(ctx.out, "{report}").expect("write to string");
        return Err(CliError::Failed(format!("not joinable: {failure}")));
    }
    let joined = join_with_shared(&m1.module, &m2.module, &report.shared)?;
    let rules: Vec<_> = m1.rules.iter().chain(&m2.rules).flatten().cloned().collect();
    ctx.out.push_str(&io::render_module(&joined, &rules, ctx.notation));
    Ok(())
}

fn incr(ctx: &mut Ctx, file: &Path, k: u64, check: bool) -> Result<()> {
    let theory = match io::load_source(file)? {
        Source::Program(p) => IncrementalTheory::from_program_file(&p)?,
        Source::Formula(f) => IncrementalTheory::from_formula_file(&f)?,
    };
    let violations = acyclic_check(&theory, k)?;
    if let Some(v) = violations.first() {
        for v in &violations {
            writeln!(ctx.out, "{v}").expect("write to string");
        }
        return Err(CliError::Failed(format!("theory is not acyclic: {v}")));
    }
    let assembly = assemble(&theory, k)?;
    for s in &assembly.steps {
        let fm = ctx.module(&s.instantiation.module);
        writeln!(ctx.out, "{}: {fm}", s.component).expect("write to string");
    }
    let models = incremental_solve(&theory, k, ctx.config)?;
    ctx.out.push_str(&io::render_models(&models));
    if check {
        let expansion = k_expansion(&theory, k)?;
        let direct = modsm_core::herbrand::answer_sets(&expansion, ctx.config)?;
        let same = direct.iter().map(PartialInterpretation::atoms).eq(models.iter().map(PartialInterpretation::atoms));
        if !same {
            return Err(CliError::Failed(format!(
                "the {k}-expansion has different answer sets:\n{}",
                io::render_models(&direct)
            )));
        }
        writeln!(ctx.out, "agrees with the {k}-expansion").expect("write to string");
    }
    Ok(())
}
