//! Differential checking: oracle closures against the compiled programs
//! under every applicable backend.

use std::collections::BTreeSet;

use defeasidl_core::compile::{compile, CompileError, Tag};
use defeasidl_core::eval::{eval_hybrid, eval_stratified, eval_wellfounded, EvalError, ThreeValuedInterpretation};
use defeasidl_core::datalog::stratify;
use defeasidl_core::theory::GroundingError;
use defeasidl_core::{conclusions, CompilationOutput, DefeasibleTheory, DefeatMode, Literal};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}

/// One pair of backends that disagreed on one conclusion tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub tag: String,
    pub left: String,
    pub right: String,
    /// in `left` only
    pub left_only: Vec<String>,
    /// in `right` only
    pub right_only: Vec<String>,
}

/// Conclusions read off a compiled model, by tag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decoded {
    pub definitely: BTreeSet<Literal>,
    pub lambda: BTreeSet<Literal>,
    pub defeasibly: BTreeSet<Literal>,
}

pub fn decode(out: &CompilationOutput, model: &ThreeValuedInterpretation) -> Decoded {
    let mut d = Decoded::default();
    for atom in &model.true_set {
        if let Some((tag, lit)) = out.decode(atom) {
            match tag {
                Tag::Definitely => d.definitely.insert(lit),
                Tag::Lambda => d.lambda.insert(lit),
                Tag::Defeasibly => d.defeasibly.insert(lit),
                _ => false,
            };
        }
    }
    d
}

fn compare(
    found: &mut Vec<Disagreement>,
    tag: &str,
    left: &str,
    right: &str,
    a: &BTreeSet<Literal>,
    b: &BTreeSet<Literal>,
) {
    if a != b {
        found.push(Disagreement {
            tag: tag.to_string(),
            left: left.to_string(),
            right: right.to_string(),
            left_only: a.difference(b).map(ToString::to_string).collect(),
            right_only: b.difference(a).map(ToString::to_string).collect(),
        });
    }
}

/// Runs every comparison on one theory. Theories with variables but no
/// constants have no ground instance and are reported as errors.
pub fn check_theory(theory: &DefeasibleTheory) -> Result<Vec<Disagreement>, CheckError> {
    let compiled = [compile(theory, DefeatMode::Team)?, compile(theory, DefeatMode::Individual)?];
    let oracle = conclusions(theory)?;
    let mut found = Vec::new();
    for out in &compiled {
        let (name, dpar) = match out.mode {
            DefeatMode::Team => ("team", &oracle.dpar),
            DefeatMode::Individual => ("individual", &oracle.dpar_star),
        };
        let wf_model = eval_wellfounded(&out.program)?;
        let wf = decode(out, &wf_model);
        let wf_name = format!("{name} wf");
        compare(&mut found, "Delta", "oracle", &wf_name, &oracle.delta, &wf.definitely);
        compare(&mut found, "lambda", "oracle", &wf_name, &oracle.lambda, &wf.lambda);
        compare(&mut found, "dpar", "oracle", &wf_name, dpar, &wf.defeasibly);

        let hybrid = decode(out, &eval_hybrid(out)?);
        compare(&mut found, "dpar", &wf_name, &format!("{name} hybrid"), &wf.defeasibly, &hybrid.defeasibly);

        if stratify(&out.program).is_some() {
            let strat_model = eval_stratified(&out.program)?;
            let strat = decode(out, &strat_model);
            let strat_name = format!("{name} stratified");
            compare(&mut found, "dpar", &wf_name, &strat_name, &wf.defeasibly, &strat.defeasibly);
            compare(&mut found, "Delta", &wf_name, &strat_name, &wf.definitely, &strat.definitely);
            compare(&mut found, "lambda", &wf_name, &strat_name, &wf.lambda, &strat.lambda);
        }
    }
    Ok(found)
}

fn disagrees(theory: &DefeasibleTheory) -> bool {
    matches!(check_theory(theory), Ok(d) if !d.is_empty())
}

/// Greedily drops facts, rules, superiority pairs and body literals while
/// the theory still produces a disagreement.
pub fn minimize(theory: &DefeasibleTheory) -> DefeasibleTheory {
    let mut current = theory.clone();
    loop {
        let mut shrunk = false;
        for candidate in shrink_candidates(&current) {
            if disagrees(&candidate) {
                current = candidate;
                shrunk = true;
                break;
            }
        }
        if !shrunk {
            return current;
        }
    }
}

fn shrink_candidates(t: &DefeasibleTheory) -> Vec<DefeasibleTheory> {
    let mut out = Vec::new();
    for i in 0..t.rules.len() {
        let mut c = t.clone();
        let removed = c.rules.remove(i);
        c.superiority.retain(|(a, b)| *a != removed.label && *b != removed.label);
        out.push(c);
    }
    for fact in &t.facts {
        let mut c = t.clone();
        c.facts.remove(fact);
        out.push(c);
    }
    for pair in &t.superiority {
        let mut c = t.clone();
        c.superiority.remove(pair);
        out.push(c);
    }
    for (i, rule) in t.rules.iter().enumerate() {
        for j in 0..rule.body.len() {
            let mut c = t.clone();
            c.rules[i].body.remove(j);
            out.push(c);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub theory: DefeasibleTheory,
    pub result: Result<Vec<Disagreement>, CheckError>,
    /// Present when there were disagreements.
    pub minimized: Option<DefeasibleTheory>,
}

impl CheckOutcome {
    pub fn agrees(&self) -> bool {
        matches!(&self.result, Ok(d) if d.is_empty())
    }
}

pub fn run_one(name: String, theory: DefeasibleTheory) -> CheckOutcome {
    let result = check_theory(&theory);
    let minimized = match &result {
        Ok(d) if !d.is_empty() => Some(minimize(&theory)),
        _ => None,
    };
    CheckOutcome {
        name,
        theory,
        result,
        minimized,
    }
}

/// Checks every theory, spreading the work over the available cores.
/// Results come back in input order.
pub fn run_all(items: Vec<(String, DefeasibleTheory)>) -> Vec<CheckOutcome> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    let mut chunks: Vec<Vec<(String, DefeasibleTheory)>> = Vec::new();
    let mut items = items.into_iter().peekable();
    while items.peek().is_some() {
        chunks.push(items.by_ref().take(chunk).collect());
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| scope.spawn(move || chunk.into_iter().map(|(n, t)| run_one(n, t)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("checker thread panicked"))
            .collect()
    })
}
