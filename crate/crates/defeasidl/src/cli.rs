//! Command-line front end.
//!
//! Exit codes: 0 success or agreement, 1 domain failure (validation,
//! disagreement, unstratified program), 2 environment failure (I/O, flags).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use defeasidl_core::compile::{compile, Tag};
use defeasidl_core::datalog::{compute_signing, is_call_consistent, is_safe, stratify, Sign};
use defeasidl_core::eval::{
    eval_fitting, eval_hybrid, eval_stratified, eval_wellfounded, EvalError, ThreeValuedInterpretation, Truth,
};
use defeasidl_core::theory::GroundingError;
use defeasidl_core::{
    compiled_size, conclusions, ground_theory, is_hierarchical, is_locally_hierarchical, is_range_restricted,
    theory_size, validate_theory, CompilationOutput, DatalogProgram, DefeasibleTheory, DefeatMode, Literal,
};
use serde_json::json;

use crate::check::{run_all, CheckOutcome};
use crate::random::{self, TheoryParams};
use crate::report::{Format, InputDigest, Output, RunReport};
use crate::syntax::{emit_datalog_text, format_theory, parse_datalog_bytes, parse_theory_bytes, ParseError};

#[derive(Debug, Parser)]
#[command(name = "defeasidl", version, about = "Compile and run defeasible theories as Datalog with negation")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Leave timings out of json-lines reports.
    #[arg(long, global = true)]
    pub no_timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a theory for structural errors.
    Validate { path: PathBuf },
    /// Report structural properties of a theory and its compiled programs.
    Analyze { path: PathBuf },
    /// Write the compiled Datalog¬ program.
    Compile {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Team)]
        mode: Mode,
        /// Output file (default: standard output).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the conclusions of a theory.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Logic::Dpar)]
        logic: Logic,
        #[arg(long, value_enum, default_value_t = Backend::Wf)]
        backend: Backend,
        /// Also list failed (-) and undecided (?) defeasible conclusions.
        #[arg(long)]
        three_valued: bool,
        /// Also list +lambda conclusions.
        #[arg(long)]
        show_lambda: bool,
    },
    /// Evaluate a Datalog¬ program.
    Eval {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Semantics::Wf)]
        semantics: Semantics,
    },
    /// Compare the oracle with every backend on given or random theories.
    Check {
        paths: Vec<PathBuf>,
        /// Number of random propositional theories.
        #[arg(long, alias = "count")]
        random: Option<usize>,
        /// Number of random range-restricted theories with variables.
        #[arg(long)]
        variable: Option<usize>,
        /// Seed for the generators (default: DEFEASIDL_SEED, else a fixed seed).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        atoms: usize,
        #[arg(long, default_value_t = 12)]
        rules: usize,
        #[arg(long, default_value_t = 6)]
        pairs: usize,
        #[arg(long, default_value_t = 3)]
        constants: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Team,
    Individual,
}

impl From<Mode> for DefeatMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Team => DefeatMode::Team,
            Mode::Individual => DefeatMode::Individual,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Logic {
    Dpar,
    #[value(alias = "dpar_star")]
    DparStar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Wf,
    Stratified,
    Hybrid,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Semantics {
    Wf,
    Fitting,
    Stratified,
}

#[derive(Debug)]
enum Failure {
    /// exit 1
    Domain(String),
    /// exit 2
    Environment(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Environment(_) => 2,
        }
    }
}

#[derive(Default)]
struct Run {
    out: Output,
    inputs: Vec<InputDigest>,
    summary: BTreeMap<String, serde_json::Value>,
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = std::fs::read(path)
            .map_err(|e| Failure::Environment(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest::of(&path.display().to_string(), &bytes));
        Ok(bytes)
    }

    fn theory(&mut self, path: &Path) -> Result<DefeasibleTheory, Failure> {
        let bytes = self.read(path)?;
        parse_theory_bytes(&bytes).map_err(|errs| parse_failure(path, &errs))
    }

    /// Parses and validates; diagnostics go to the output.
    fn valid_theory(&mut self, path: &Path) -> Result<DefeasibleTheory, Failure> {
        let theory = self.theory(path)?;
        let report = validate_theory(&theory);
        if report.is_ok() {
            Ok(theory)
        } else {
            let lines: Vec<String> = report.errors.iter().map(|d| format!("error{d}")).collect();
            Err(Failure::Domain(lines.join("\n")))
        }
    }

    fn summary(&mut self, key: &str, value: serde_json::Value) {
        self.summary.insert(key.to_string(), value);
    }
}

fn parse_failure(path: &Path, errs: &[ParseError]) -> Failure {
    let lines: Vec<String> = errs.iter().map(|e| format!("{}:{e}", path.display())).collect();
    Failure::Domain(lines.join("\n"))
}

/// Parses `args` and runs the command, writing to the given streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let started = Instant::now();
    let mut r = Run::default();
    let result = dispatch(&cli.command, &mut r);
    let code = result.as_ref().err().map_or(0, Failure::code);
    let report = RunReport {
        command: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
        inputs: r.inputs.clone(),
        timings_ms: (!cli.no_timings)
            .then(|| [("total".to_string(), started.elapsed().as_secs_f64() * 1000.0)].into()),
        exit_code: code,
        summary: r.summary.clone(),
    };
    let _ = stdout.write_all(r.out.render(cli.format, &report).as_bytes());
    if let Err(Failure::Domain(msg) | Failure::Environment(msg)) = &result {
        let _ = writeln!(stderr, "{msg}");
    }
    code
}

fn dispatch(command: &Command, r: &mut Run) -> Result<(), Failure> {
    match command {
        Command::Validate { path } => validate(r, path),
        Command::Analyze { path } => analyze(r, path),
        Command::Compile { path, mode, output } => compile_cmd(r, path, *mode, output.as_deref()),
        Command::Solve {
            path,
            logic,
            backend,
            three_valued,
            show_lambda,
        } => solve(r, path, *logic, *backend, *three_valued, *show_lambda),
        Command::Eval { path, semantics } => eval(r, path, *semantics),
        Command::Check {
            paths,
            random,
            variable,
            seed,
            atoms,
            rules,
            pairs,
            constants,
        } => {
            let params = TheoryParams {
                atoms: *atoms,
                rules: *rules,
                pairs: *pairs,
                constants: *constants,
                ..TheoryParams::default()
            };
            check(r, paths, *random, *variable, *seed, &params)
        }
    }
}

fn validate(r: &mut Run, path: &Path) -> Result<(), Failure> {
    let theory = r.theory(path)?;
    let report = validate_theory(&theory);
    for d in &report.errors {
        r.out.line(format!("error{d}"));
        r.out.record(json!({"severity": "error", "code": d.code.as_str(), "location": d.location.to_string(), "message": d.message}));
    }
    for d in &report.warnings {
        r.out.line(format!("warning{d}"));
        r.out.record(json!({"severity": "warning", "code": d.code.as_str(), "location": d.location.to_string(), "message": d.message}));
    }
    r.summary("errors", json!(report.errors.len()));
    r.summary("warnings", json!(report.warnings.len()));
    if report.is_ok() {
        r.out.line(format!(
            "ok: {} facts, {} rules, {} superiority pairs",
            theory.facts.len(),
            theory.rules.len(),
            theory.superiority.len()
        ));
        Ok(())
    } else {
        Err(Failure::Domain(format!("{} validation error(s)", report.errors.len())))
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Signing over the compiled predicates outside the floor with every
/// defeasibly predicate at +1.
pub fn above_floor_signing(out: &CompilationOutput) -> bool {
    let Some(signing) = compute_signing(&out.program, &out.above_floor()) else {
        return false;
    };
    out.above_floor().iter().all(|p| {
        let tag = out.predicates.get(p).and_then(|m| m.tag());
        tag != Some(Tag::Defeasibly) || signing.sign(p) == Some(Sign::Positive)
    })
}

fn analyze(r: &mut Run, path: &Path) -> Result<(), Failure> {
    let theory = r.valid_theory(path)?;
    let team = compile(&theory, DefeatMode::Team).map_err(|e| Failure::Domain(e.to_string()))?;
    let indiv = compile(&theory, DefeatMode::Individual).map_err(|e| Failure::Domain(e.to_string()))?;
    let size = theory_size(&theory);
    let ratio = |n: usize| if size == 0 { 1.0 } else { n as f64 / size as f64 };
    let local = match is_locally_hierarchical(&theory) {
        Ok(b) => yes(b).to_string(),
        Err(GroundingError::EmptyUniverse) => "n/a (no constants)".to_string(),
        Err(e) => return Err(Failure::Domain(e.to_string())),
    };
    let rows: Vec<(&str, serde_json::Value)> = vec![
        ("hierarchical", json!(yes(is_hierarchical(&theory).is_some()))),
        ("locally hierarchical", json!(local)),
        ("range-restricted", json!(yes(is_range_restricted(&theory)))),
        ("team stratified", json!(yes(stratify(&team.program).is_some()))),
        ("individual stratified", json!(yes(stratify(&indiv.program).is_some()))),
        ("call-consistent", json!(yes(is_call_consistent(&team.program)))),
        ("floor stratified", json!(yes(stratify(&team.floor_program()).is_some()))),
        ("signing found", json!(yes(above_floor_signing(&team)))),
        ("team safe", json!(yes(is_safe(&team.program)))),
        ("individual safe", json!(yes(is_safe(&indiv.program)))),
        ("theory size", json!(size)),
        ("team size", json!(compiled_size(&team))),
        ("individual size", json!(compiled_size(&indiv))),
        ("team ratio", json!(format!("{:.3}", ratio(compiled_size(&team))))),
        ("individual ratio", json!(format!("{:.3}", ratio(compiled_size(&indiv))))),
    ];
    let mut record = serde_json::Map::new();
    for (k, v) in rows {
        let shown = v.as_str().map_or_else(|| v.to_string(), str::to_string);
        r.out.line(format!("{k}: {shown}"));
        record.insert(k.to_string(), v);
    }
    r.out.record(record);
    Ok(())
}

fn compile_cmd(r: &mut Run, path: &Path, mode: Mode, output: Option<&Path>) -> Result<(), Failure> {
    let theory = r.valid_theory(path)?;
    let out = compile(&theory, mode.into()).map_err(|e| Failure::Domain(e.to_string()))?;
    let text = emit_datalog_text(&out);
    r.summary("clauses", json!(out.program.len()));
    r.summary("size", json!(compiled_size(&out)));
    match output {
        Some(file) => std::fs::write(file, &text)
            .map_err(|e| Failure::Environment(format!("cannot write {}: {e}", file.display())))?,
        None => {
            for line in text.lines() {
                r.out.line(line);
            }
        }
    }
    for (clause, p) in out.iter() {
        r.out.record(json!({"schema": p.schema.as_str(), "source": p.source.to_string(), "clause": clause.to_string()}));
    }
    Ok(())
}

struct Listing {
    delta: Vec<Literal>,
    lambda: Vec<Literal>,
    positive: Vec<Literal>,
    negative: Vec<Literal>,
    unknown: Vec<Literal>,
}

fn listing_from_model(out: &CompilationOutput, model: &ThreeValuedInterpretation) -> Listing {
    let mut l = Listing {
        delta: Vec::new(),
        lambda: Vec::new(),
        positive: Vec::new(),
        negative: Vec::new(),
        unknown: Vec::new(),
    };
    for (truth, atom) in model.listing() {
        let Some((tag, lit)) = out.decode(atom) else {
            continue;
        };
        match (tag, truth) {
            (Tag::Definitely, Truth::True) => l.delta.push(lit),
            (Tag::Lambda, Truth::True) => l.lambda.push(lit),
            (Tag::Defeasibly, Truth::True) => l.positive.push(lit),
            (Tag::Defeasibly, Truth::False) => l.negative.push(lit),
            (Tag::Defeasibly, Truth::Unknown) => l.unknown.push(lit),
            _ => {}
        }
    }
    l
}

fn solve(
    r: &mut Run,
    path: &Path,
    logic: Logic,
    backend: Backend,
    three_valued: bool,
    show_lambda: bool,
) -> Result<(), Failure> {
    if three_valued && backend == Backend::Oracle {
        return Err(Failure::Environment(
            "--three-valued needs a compiled backend (wf, stratified or hybrid)".into(),
        ));
    }
    let theory = r.valid_theory(path)?;
    if let Err(e) = ground_theory(&theory) {
        return Err(Failure::Domain(e.to_string()));
    }
    let mode = match logic {
        Logic::Dpar => DefeatMode::Team,
        Logic::DparStar => DefeatMode::Individual,
    };
    let mut listing = match backend {
        Backend::Oracle => {
            let c = conclusions(&theory).map_err(|e| Failure::Domain(e.to_string()))?;
            let positive = match mode {
                DefeatMode::Team => c.dpar,
                DefeatMode::Individual => c.dpar_star,
            };
            Listing {
                delta: c.delta.into_iter().collect(),
                lambda: c.lambda.into_iter().collect(),
                positive: positive.into_iter().collect(),
                negative: Vec::new(),
                unknown: Vec::new(),
            }
        }
        _ => {
            let out = compile(&theory, mode).map_err(|e| Failure::Domain(e.to_string()))?;
            let model = match backend {
                Backend::Wf => eval_wellfounded(&out.program),
                Backend::Stratified => eval_stratified(&out.program),
                Backend::Hybrid => eval_hybrid(&out),
                Backend::Oracle => unreachable!(),
            }
            .map_err(|e| match e {
                EvalError::NotStratified => Failure::Domain(
                    "the compiled program is not stratified; use --backend wf or --backend hybrid".into(),
                ),
                other => Failure::Domain(other.to_string()),
            })?;
            listing_from_model(&out, &model)
        }
    };
    for v in [
        &mut listing.delta,
        &mut listing.lambda,
        &mut listing.positive,
        &mut listing.negative,
        &mut listing.unknown,
    ] {
        v.sort();
    }
    let tag = match mode {
        DefeatMode::Team => "dpar",
        DefeatMode::Individual => "dpar*",
    };
    let emit = |r: &mut Run, prefix: String, lits: &[Literal]| {
        for l in lits {
            r.out.line(format!("{prefix} {l}"));
            r.out.record(json!({"tag": prefix, "literal": l.to_string()}));
        }
    };
    emit(r, "+Delta".into(), &listing.delta);
    if show_lambda {
        emit(r, "+lambda".into(), &listing.lambda);
    }
    emit(r, format!("+{tag}"), &listing.positive);
    if three_valued {
        emit(r, format!("-{tag}"), &listing.negative);
        emit(r, format!("?{tag}"), &listing.unknown);
    }
    r.summary("delta", json!(listing.delta.len()));
    r.summary(tag, json!(listing.positive.len()));
    Ok(())
}

fn eval(r: &mut Run, path: &Path, semantics: Semantics) -> Result<(), Failure> {
    let bytes = r.read(path)?;
    let program: DatalogProgram = parse_datalog_bytes(&bytes).map_err(|errs| parse_failure(path, &errs))?;
    let model = match semantics {
        Semantics::Wf => eval_wellfounded(&program),
        Semantics::Fitting => eval_fitting(&program, None),
        Semantics::Stratified => eval_stratified(&program),
    }
    .map_err(|e| Failure::Domain(e.to_string()))?;
    for (truth, atom) in model.listing() {
        r.out.line(format!("{truth} {atom}"));
        r.out.record(json!({"value": truth.as_str(), "atom": atom.to_string()}));
    }
    r.summary("true", json!(model.true_set.len()));
    r.summary("false", json!(model.false_set.len()));
    r.summary("unknown", json!(model.unknown_set.len()));
    Ok(())
}

fn check(
    r: &mut Run,
    paths: &[PathBuf],
    random_count: Option<usize>,
    variable_count: Option<usize>,
    seed: Option<u64>,
    params: &TheoryParams,
) -> Result<(), Failure> {
    let mut items = Vec::new();
    for path in paths {
        let theory = r.theory(path)?;
        items.push((path.display().to_string(), theory));
    }
    let seed = seed.unwrap_or_else(|| random::seed_from_env(random::DEFAULT_SEED));
    let mut rng = random::rng(seed);
    for i in 0..random_count.unwrap_or(0) {
        items.push((format!("random-{i}"), random::ground_theory(&mut rng, params)));
    }
    for i in 0..variable_count.unwrap_or(0) {
        items.push((format!("variable-{i}"), random::variable_theory(&mut rng, params, true)));
    }
    if items.is_empty() {
        return Err(Failure::Environment("nothing to check: give files, --random N or --variable N".into()));
    }
    if random_count.is_some() || variable_count.is_some() {
        r.summary("seed", json!(seed));
    }
    let outcomes = run_all(items);
    let mut disagreeing = 0;
    let mut errors = 0;
    for o in &outcomes {
        report_outcome(r, o);
        match &o.result {
            Ok(d) if d.is_empty() => {}
            Ok(_) => disagreeing += 1,
            Err(_) => errors += 1,
        }
    }
    r.out.line(format!(
        "checked {} theories: {} disagreements, {} errors",
        outcomes.len(),
        disagreeing,
        errors
    ));
    r.summary("checked", json!(outcomes.len()));
    r.summary("disagreements", json!(disagreeing));
    r.summary("errors", json!(errors));
    if disagreeing + errors == 0 {
        Ok(())
    } else {
        Err(Failure::Domain(format!("{disagreeing} disagreement(s), {errors} error(s)")))
    }
}

fn report_outcome(r: &mut Run, o: &CheckOutcome) {
    match &o.result {
        Ok(d) if d.is_empty() => {
            r.out.line(format!("agree {}", o.name));
            r.out.record(json!({"theory": o.name, "status": "agree"}));
        }
        Ok(diffs) => {
            r.out.line(format!("disagree {}", o.name));
            for d in diffs {
                r.out.line(format!(
                    "  {} {} vs {}: only left {:?}, only right {:?}",
                    d.tag, d.left, d.right, d.left_only, d.right_only
                ));
            }
            let minimized = o.minimized.as_ref().map(format_theory).unwrap_or_default();
            r.out.line("  minimized theory:");
            for line in minimized.lines() {
                r.out.line(format!("    {line}"));
            }
            r.out.record(json!({"theory": o.name, "status": "disagree", "diffs": diffs, "minimized": minimized}));
        }
        Err(e) => {
            r.out.line(format!("error {}: {e}", o.name));
            r.out.record(json!({"theory": o.name, "status": "error", "message": e.to_string()}));
        }
    }
}
