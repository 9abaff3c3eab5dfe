//! Defeasible theories: facts, labelled rules of three kinds, and a
//! superiority relation over rule labels.
//!
//! Everything here is function-free. Terms are variables or constants,
//! literals are possibly negated atoms, and a theory is a triple of facts,
//! rules and superiority pairs. The module also carries the structural
//! checks that downstream stages rely on: validation, range restriction,
//! grounding over the Herbrand universe, and (local) hierarchy.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph;

/// Separator reserved for generated names (mangled predicates, ground labels).
pub const RESERVED_SEPARATOR: &str = "__";

/// Keywords that cannot be used as predicate names.
const RESERVED_WORDS: [&str; 2] = ["neg", "not"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A predicate applied to a list of terms.
///
/// The same type serves as the atom of the Datalog¬ programs produced by the
/// compiler, since both languages are function-free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn propositional(predicate: impl Into<String>) -> Self {
        Atom::new(predicate, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter(|t| t.is_var()).map(Term::name)
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter(|t| !t.is_var()).map(Term::name)
    }

    /// Replaces bound variables; unbound variables are kept.
    pub fn substitute(&self, binding: &BTreeMap<String, String>) -> Atom {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => match binding.get(v) {
                    Some(c) => Term::Const(c.clone()),
                    None => t.clone(),
                },
                Term::Const(_) => t.clone(),
            })
            .collect();
        Atom::new(self.predicate.clone(), args)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A possibly classically negated atom. Displayed with the `neg` keyword.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub polarity: Polarity,
}

impl Literal {
    pub fn positive(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal {
            atom: Atom::new(predicate, args),
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal {
            atom: Atom::new(predicate, args),
            polarity: Polarity::Negative,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            polarity: self.polarity.flip(),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.polarity == Polarity::Negative
    }

    pub fn predicate(&self) -> &str {
        &self.atom.predicate
    }

    /// Predicate together with polarity; the unit the compiler mangles.
    pub fn key(&self) -> (&str, Polarity) {
        (&self.atom.predicate, self.polarity)
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    pub fn substitute(&self, binding: &BTreeMap<String, String>) -> Literal {
        Literal {
            atom: self.atom.substitute(binding),
            polarity: self.polarity,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negative() {
            f.write_str("neg ")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// Flips the polarity of a literal. `complement(complement(l)) == l`.
pub fn complement(lit: &Literal) -> Literal {
    lit.complement()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Strict,
    Defeasible,
    Defeater,
}

impl RuleKind {
    pub fn arrow(self) -> &'static str {
        match self {
            RuleKind::Strict => "->",
            RuleKind::Defeasible => "=>",
            RuleKind::Defeater => "~>",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub label: String,
    pub body: Vec<Literal>,
    pub head: Literal,
    pub kind: RuleKind,
}

impl Rule {
    pub fn new(label: impl Into<String>, body: Vec<Literal>, head: Literal, kind: RuleKind) -> Self {
        Rule {
            label: label.into(),
            body,
            head,
            kind,
        }
    }

    pub fn is_strict(&self) -> bool {
        self.kind == RuleKind::Strict
    }

    /// Strict or defeasible: the rules that can support a conclusion.
    pub fn is_supportive(&self) -> bool {
        self.kind != RuleKind::Defeater
    }

    /// Distinct variables of the rule, sorted.
    pub fn variables(&self) -> BTreeSet<&str> {
        self.body
            .iter()
            .chain(core::iter::once(&self.head))
            .flat_map(|l| l.atom.variables())
            .collect()
    }

    fn body_variables(&self) -> BTreeSet<&str> {
        self.body.iter().flat_map(|l| l.atom.variables()).collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.label)?;
        for (i, l) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{l}")?;
        }
        write!(f, " {} {}", self.kind.arrow(), self.head)
    }
}

/// The triple (facts, rules, superiority). `(t, s)` in `superiority` means t > s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefeasibleTheory {
    pub facts: BTreeSet<Literal>,
    pub rules: Vec<Rule>,
    pub superiority: BTreeSet<(String, String)>,
}

impl DefeasibleTheory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fact(mut self, fact: Literal) -> Self {
        self.facts.insert(fact);
        self
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rules.push(rule);
        self
    }

    pub fn with_superiority(mut self, superior: impl Into<String>, inferior: impl Into<String>) -> Self {
        self.superiority.insert((superior.into(), inferior.into()));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty() && self.rules.is_empty() && self.superiority.is_empty()
    }

    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label == label)
    }

    /// Every literal occurring in a fact, rule body or rule head.
    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.facts.iter().chain(
            self.rules
                .iter()
                .flat_map(|r| r.body.iter().chain(core::iter::once(&r.head))),
        )
    }

    /// The Herbrand universe: constants occurring anywhere in the theory.
    pub fn constants(&self) -> BTreeSet<String> {
        self.literals()
            .flat_map(|l| l.atom.constants())
            .map(ToString::to_string)
            .collect()
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        self.literals().map(|l| l.atom.predicate.clone()).collect()
    }

    pub fn is_ground(&self) -> bool {
        self.literals().all(Literal::is_ground)
    }
}

// ---------------------------------------------------------------------------
// identifiers

fn lexical_class(name: &str) -> Option<char> {
    let first = name.chars().next()?;
    if name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        Some(first)
    } else {
        None
    }
}

/// Lowercase-initial (or digit-initial) alphanumerics plus underscore.
pub fn is_constant_name(name: &str) -> bool {
    matches!(lexical_class(name), Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit())
}

pub fn is_variable_name(name: &str) -> bool {
    matches!(lexical_class(name), Some(c) if c.is_ascii_uppercase())
}

/// Predicates and rule labels share the constant lexical class; labels
/// end up as constants of the compiled program.
pub fn is_symbol_name(name: &str) -> bool {
    is_constant_name(name) && !RESERVED_WORDS.contains(&name)
}

// ---------------------------------------------------------------------------
// validation

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticCode {
    DuplicateLabel,
    UndefinedLabel,
    SuperiorityCycle,
    NonGroundFact,
    ArityMismatch,
    ManglingCollision,
    InvalidIdentifier,
    /// Warning: the two rules of a superiority pair do not have complementary heads.
    InertSuperiority,
    /// Warning: a defeater is the superior rule of a pair.
    DefeaterSuperior,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::DuplicateLabel => "duplicate-label",
            DiagnosticCode::UndefinedLabel => "undefined-label",
            DiagnosticCode::SuperiorityCycle => "superiority-cycle",
            DiagnosticCode::NonGroundFact => "non-ground-fact",
            DiagnosticCode::ArityMismatch => "arity-mismatch",
            DiagnosticCode::ManglingCollision => "mangling-collision",
            DiagnosticCode::InvalidIdentifier => "invalid-identifier",
            DiagnosticCode::InertSuperiority => "inert-superiority",
            DiagnosticCode::DefeaterSuperior => "defeater-superior",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where in a theory a diagnostic applies.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Theory,
    Fact(Literal),
    Rule(String),
    Superiority(String, String),
    Predicate(String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Theory => f.write_str("theory"),
            Location::Fact(l) => write!(f, "fact {l}"),
            Location::Rule(label) => write!(f, "rule {label}"),
            Location::Superiority(t, s) => write!(f, "superiority {t} > {s}"),
            Location::Predicate(p) => write!(f, "predicate {p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    pub location: Location,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.code, self.location, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has_error(&self, code: DiagnosticCode) -> bool {
        self.errors.iter().any(|d| d.code == code)
    }

    pub fn has_warning(&self, code: DiagnosticCode) -> bool {
        self.warnings.iter().any(|d| d.code == code)
    }

    fn error(&mut self, code: DiagnosticCode, location: Location, message: String) {
        self.errors.push(Diagnostic {
            code,
            message,
            location,
        });
    }

    fn warning(&mut self, code: DiagnosticCode, location: Location, message: String) {
        self.warnings.push(Diagnostic {
            code,
            message,
            location,
        });
    }
}

/// Runs every structural check on a theory. Never fails; the report carries
/// the findings, and any error makes the theory unusable downstream.
pub fn validate_theory(theory: &DefeasibleTheory) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_identifiers(theory, &mut report);

    for fact in &theory.facts {
        if !fact.is_ground() {
            report.error(
                DiagnosticCode::NonGroundFact,
                Location::Fact(fact.clone()),
                format!("fact `{fact}` contains variables"),
            );
        }
    }

    let mut labels = BTreeSet::new();
    for rule in &theory.rules {
        if !labels.insert(rule.label.as_str()) {
            report.error(
                DiagnosticCode::DuplicateLabel,
                Location::Rule(rule.label.clone()),
                format!("label `{}` is used by more than one rule", rule.label),
            );
        }
    }

    check_arities(theory, &mut report);
    check_superiority(theory, &labels, &mut report);

    for (name, first, second) in crate::compile::mangling_collisions(theory) {
        report.error(
            DiagnosticCode::ManglingCollision,
            Location::Theory,
            format!("`{first}` and `{second}` both compile to predicate `{name}`"),
        );
    }
    report
}

fn check_identifiers(theory: &DefeasibleTheory, report: &mut ValidationReport) {
    let mut bad = BTreeSet::new();
    for lit in theory.literals() {
        if !is_symbol_name(&lit.atom.predicate) {
            bad.insert(format!("predicate `{}`", lit.atom.predicate));
        }
        for term in &lit.atom.args {
            let ok = match term {
                Term::Var(v) => is_variable_name(v),
                Term::Const(c) => is_constant_name(c),
            };
            if !ok {
                bad.insert(format!("term `{}`", term.name()));
            }
        }
    }
    for rule in &theory.rules {
        if !is_symbol_name(&rule.label) {
            bad.insert(format!("label `{}`", rule.label));
        }
    }
    for what in bad {
        report.error(
            DiagnosticCode::InvalidIdentifier,
            Location::Theory,
            format!("{what} is not a valid identifier"),
        );
    }
}

fn check_arities(theory: &DefeasibleTheory, report: &mut ValidationReport) {
    let mut arity: BTreeMap<&str, usize> = BTreeMap::new();
    let mut reported = BTreeSet::new();
    for lit in theory.literals() {
        let p = lit.atom.predicate.as_str();
        match arity.get(p) {
            None => {
                arity.insert(p, lit.atom.arity());
            }
            Some(&a) if a != lit.atom.arity() && reported.insert(p) => {
                report.error(
                    DiagnosticCode::ArityMismatch,
                    Location::Predicate(p.to_string()),
                    format!("`{p}` is used with arity {a} and {}", lit.atom.arity()),
                );
            }
            Some(_) => {}
        }
    }
}

fn check_superiority(theory: &DefeasibleTheory, labels: &BTreeSet<&str>, report: &mut ValidationReport) {
    for (t, s) in &theory.superiority {
        for label in [t, s] {
            if !labels.contains(label.as_str()) {
                report.error(
                    DiagnosticCode::UndefinedLabel,
                    Location::Superiority(t.clone(), s.clone()),
                    format!("no rule is labelled `{label}`"),
                );
            }
        }
        if let (Some(tr), Some(sr)) = (theory.rule(t), theory.rule(s)) {
            if tr.head.key() != sr.head.complement().key() {
                report.warning(
                    DiagnosticCode::InertSuperiority,
                    Location::Superiority(t.clone(), s.clone()),
                    format!("heads `{}` and `{}` are not complementary; the pair has no effect", tr.head, sr.head),
                );
            }
            if tr.kind == RuleKind::Defeater {
                report.warning(
                    DiagnosticCode::DefeaterSuperior,
                    Location::Superiority(t.clone(), s.clone()),
                    format!("`{t}` is a defeater and cannot defeat `{s}`"),
                );
            }
        }
    }

    let nodes: Vec<&str> = theory
        .superiority
        .iter()
        .flat_map(|(t, s)| [t.as_str(), s.as_str()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut adjacency = vec![Vec::new(); nodes.len()];
    for (t, s) in &theory.superiority {
        adjacency[index[t.as_str()]].push(index[s.as_str()]);
    }
    let components = graph::tarjan(&adjacency);
    for members in &components.members {
        let cyclic = members.len() > 1 || adjacency[members[0]].contains(&members[0]);
        if cyclic {
            let names: Vec<&str> = members.iter().map(|&i| nodes[i]).collect();
            report.error(
                DiagnosticCode::SuperiorityCycle,
                Location::Theory,
                format!("superiority relation is cyclic through {}", names.join(", ")),
            );
        }
    }
}

// ---------------------------------------------------------------------------
// structural properties

/// Every rule's head variables occur in its body and every fact is ground.
pub fn is_range_restricted(theory: &DefeasibleTheory) -> bool {
    theory.facts.iter().all(Literal::is_ground)
        && theory.rules.iter().all(|r| {
            let body = r.body_variables();
            r.head.atom.variables().all(|v| body.contains(v))
        })
}

/// Number of symbols in a theory: predicate, constant, variable and label
/// occurrences, plus one per rule arrow, fact and superiority pair.
pub fn theory_size(theory: &DefeasibleTheory) -> usize {
    let atom = |a: &Atom| 1 + a.arity();
    let facts: usize = theory.facts.iter().map(|f| atom(&f.atom) + 1).sum();
    let rules: usize = theory
        .rules
        .iter()
        .map(|r| 2 + atom(&r.head.atom) + r.body.iter().map(|l| atom(&l.atom)).sum::<usize>())
        .sum();
    facts + rules + 3 * theory.superiority.len()
}

/// Level mapping witnessing that no predicate depends on itself (polarity
/// ignored), or `None` when the predicate dependency graph has a cycle.
pub fn is_hierarchical(theory: &DefeasibleTheory) -> Option<BTreeMap<String, usize>> {
    let predicates: Vec<String> = theory.predicates().into_iter().collect();
    let index: BTreeMap<&str, usize> = predicates
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i))
        .collect();
    let mut adjacency = vec![Vec::new(); predicates.len()];
    for rule in &theory.rules {
        let head = index[rule.head.predicate()];
        for lit in &rule.body {
            adjacency[head].push(index[lit.predicate()]);
        }
    }
    let components = graph::tarjan(&adjacency);
    let mut level = vec![0usize; predicates.len()];
    for members in &components.members {
        if members.len() > 1 || adjacency[members[0]].contains(&members[0]) {
            return None;
        }
        let p = members[0];
        level[p] = adjacency[p].iter().map(|&q| level[q] + 1).max().unwrap_or(0);
    }
    Some(predicates.into_iter().zip(level).collect())
}

/// Hierarchy at the level of ground atoms of `ground_theory(theory)`.
pub fn is_locally_hierarchical(theory: &DefeasibleTheory) -> Result<bool, GroundingError> {
    let ground = ground_theory(theory)?;
    let mut index: BTreeMap<&Atom, usize> = BTreeMap::new();
    let mut adjacency: Vec<Vec<usize>> = Vec::new();
    for rule in &ground.theory.rules {
        for a in core::iter::once(&rule.head.atom).chain(rule.body.iter().map(|l| &l.atom)) {
            if !index.contains_key(a) {
                index.insert(a, adjacency.len());
                adjacency.push(Vec::new());
            }
        }
        let head = index[&rule.head.atom];
        for lit in &rule.body {
            let body = index[&lit.atom];
            adjacency[head].push(body);
        }
    }
    Ok(!graph::has_cycle(&adjacency))
}

// ---------------------------------------------------------------------------
// grounding

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GroundingError {
    #[error("theory has variables but no constants to instantiate them with")]
    EmptyUniverse,
    #[error("fact `{0}` is not ground")]
    NonGroundFact(String),
}

/// Source of one ground rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundProvenance {
    pub source: String,
    pub substitution: BTreeMap<String, String>,
}

/// A variable-free theory together with the origin of each ground rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTheory {
    theory: DefeasibleTheory,
    provenance: BTreeMap<String, GroundProvenance>,
}

impl GroundTheory {
    pub fn theory(&self) -> &DefeasibleTheory {
        &self.theory
    }

    pub fn into_theory(self) -> DefeasibleTheory {
        self.theory
    }

    /// Keyed by ground rule label.
    pub fn provenance(&self) -> &BTreeMap<String, GroundProvenance> {
        &self.provenance
    }
}

/// Instantiates every rule over the constants of the theory.
///
/// Rules without variables keep their label; the instances of a rule with
/// variables are labelled `label__0`, `label__1`, ... in enumeration order.
/// A superiority pair `t > s` relates every instance of `t` to every
/// instance of `s`.
pub fn ground_theory(theory: &DefeasibleTheory) -> Result<GroundTheory, GroundingError> {
    if let Some(fact) = theory.facts.iter().find(|f| !f.is_ground()) {
        return Err(GroundingError::NonGroundFact(fact.to_string()));
    }
    let universe: Vec<String> = theory.constants().into_iter().collect();
    let has_variables = theory.rules.iter().any(|r| !r.variables().is_empty());
    if has_variables && universe.is_empty() {
        return Err(GroundingError::EmptyUniverse);
    }

    let mut taken: BTreeSet<String> = theory.rules.iter().map(|r| r.label.clone()).collect();
    let mut rules = Vec::new();
    let mut provenance = BTreeMap::new();
    let mut instances: BTreeMap<&str, Vec<String>> = BTreeMap::new();

    for rule in &theory.rules {
        let vars: Vec<&str> = rule.variables().into_iter().collect();
        let labels = instances.entry(rule.label.as_str()).or_default();
        if vars.is_empty() {
            rules.push(rule.clone());
            labels.push(rule.label.clone());
            provenance.insert(
                rule.label.clone(),
                GroundProvenance {
                    source: rule.label.clone(),
                    substitution: BTreeMap::new(),
                },
            );
            continue;
        }
        let mut odometer = vec![0usize; vars.len()];
        let mut ordinal = 0usize;
        loop {
            let binding: BTreeMap<String, String> = vars
                .iter()
                .zip(&odometer)
                .map(|(v, &i)| (v.to_string(), universe[i].clone()))
                .collect();
            let label = fresh_label(&rule.label, ordinal, &mut taken);
            ordinal += 1;
            rules.push(Rule {
                label: label.clone(),
                body: rule.body.iter().map(|l| l.substitute(&binding)).collect(),
                head: rule.head.substitute(&binding),
                kind: rule.kind,
            });
            labels.push(label.clone());
            provenance.insert(
                label,
                GroundProvenance {
                    source: rule.label.clone(),
                    substitution: binding,
                },
            );
            if !advance(&mut odometer, universe.len()) {
                break;
            }
        }
    }

    let mut superiority = BTreeSet::new();
    for (t, s) in &theory.superiority {
        let (Some(ts), Some(ss)) = (instances.get(t.as_str()), instances.get(s.as_str())) else {
            continue;
        };
        for gt in ts {
            for gs in ss {
                superiority.insert((gt.clone(), gs.clone()));
            }
        }
    }

    Ok(GroundTheory {
        theory: DefeasibleTheory {
            facts: theory.facts.clone(),
            rules,
            superiority,
        },
        provenance,
    })
}

fn fresh_label(base: &str, ordinal: usize, taken: &mut BTreeSet<String>) -> String {
    let mut label = format!("{base}{RESERVED_SEPARATOR}{ordinal}");
    let mut bump = 0usize;
    while taken.contains(&label) {
        bump += 1;
        label = format!("{base}{RESERVED_SEPARATOR}{ordinal}{RESERVED_SEPARATOR}{bump}");
    }
    taken.insert(label.clone());
    label
}

/// Counts in mixed radix; false once every position has wrapped.
fn advance(odometer: &mut [usize], radix: usize) -> bool {
    for digit in odometer.iter_mut().rev() {
        *digit += 1;
        if *digit < radix {
            return true;
        }
        *digit = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn tweety_validates_cleanly() {
        let report = validate_theory(&tweety());
        assert!(report.errors.is_empty(), "{:?}", report.errors);
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    }

    #[test]
    fn self_superiority_is_a_cycle() {
        let theory = DefeasibleTheory::new()
            .with_rule(Rule::new("r1", vec![], lit("p"), RuleKind::Defeasible))
            .with_superiority("r1", "r1");
        assert!(validate_theory(&theory).has_error(DiagnosticCode::SuperiorityCycle));
    }

    #[test]
    fn longer_superiority_cycle() {
        let theory = DefeasibleTheory::new()
            .with_rule(Rule::new("a", vec![], lit("p"), RuleKind::Defeasible))
            .with_rule(Rule::new("b", vec![], lit("neg p"), RuleKind::Defeasible))
            .with_rule(Rule::new("c", vec![], lit("p"), RuleKind::Defeasible))
            .with_superiority("a", "b")
            .with_superiority("b", "c")
            .with_superiority("c", "a");
        let report = validate_theory(&theory);
        assert_eq!(
            report
                .errors
                .iter()
                .filter(|d| d.code == DiagnosticCode::SuperiorityCycle)
                .count(),
            1
        );
    }

    #[test]
    fn non_ground_fact_is_rejected() {
        let theory = DefeasibleTheory::new().with_fact(lit("fly(X)"));
        assert!(validate_theory(&theory).has_error(DiagnosticCode::NonGroundFact));
    }

    #[test]
    fn other_validation_errors() {
        let theory = DefeasibleTheory::new()
            .with_fact(lit("p(a)"))
            .with_rule(Rule::new("r", vec![lit("p(a, b)")], lit("q"), RuleKind::Strict))
            .with_rule(Rule::new("r", vec![], lit("q"), RuleKind::Strict))
            .with_superiority("r", "missing");
        let report = validate_theory(&theory);
        assert!(report.has_error(DiagnosticCode::ArityMismatch));
        assert!(report.has_error(DiagnosticCode::DuplicateLabel));
        assert!(report.has_error(DiagnosticCode::UndefinedLabel));
    }

    #[test]
    fn inert_pairs_are_warnings() {
        let theory = DefeasibleTheory::new()
            .with_rule(Rule::new("t", vec![], lit("p"), RuleKind::Defeater))
            .with_rule(Rule::new("s", vec![], lit("q"), RuleKind::Defeasible))
            .with_superiority("t", "s");
        let report = validate_theory(&theory);
        assert!(report.is_ok());
        assert!(report.has_warning(DiagnosticCode::InertSuperiority));
        assert!(report.has_warning(DiagnosticCode::DefeaterSuperior));
    }

    #[test]
    fn mangling_collision_is_an_error() {
        // `not__p` positive and `p` negative both become `definitely__not__p`
        let theory = DefeasibleTheory::new()
            .with_fact(lit("not__p"))
            .with_fact(lit("neg p"));
        assert!(validate_theory(&theory).has_error(DiagnosticCode::ManglingCollision));
        let fine = DefeasibleTheory::new().with_fact(lit("has_fur(x)"));
        assert!(validate_theory(&fine).is_ok());
    }

    #[test]
    fn reserved_words_are_not_predicates() {
        let theory = DefeasibleTheory::new().with_fact(lit("neg not"));
        assert!(validate_theory(&theory).has_error(DiagnosticCode::InvalidIdentifier));
    }

    #[test]
    fn range_restriction() {
        assert!(is_range_restricted(&tweety()));
        let open = DefeasibleTheory::new().with_rule(Rule::new("r", vec![], lit("p(X)"), RuleKind::Defeasible));
        assert!(!is_range_restricted(&open));
        let propositional = DefeasibleTheory::new()
            .with_fact(lit("a"))
            .with_rule(Rule::new("r", vec![lit("a")], lit("b"), RuleKind::Strict));
        assert!(is_range_restricted(&propositional));
    }

    #[test]
    fn tweety_grounds_to_two_instances_per_rule() {
        let ground = ground_theory(&tweety()).unwrap();
        for source in ["r1", "r2", "r3", "r4"] {
            let count = ground
                .provenance()
                .values()
                .filter(|p| p.source == source)
                .count();
            assert_eq!(count, 2, "{source}");
        }
        assert_eq!(ground.theory().rules.len(), 8);
        // r2 > r1 lifts to all 2 x 2 instance pairs
        assert_eq!(ground.theory().superiority.len(), 4);
        assert!(ground.theory().is_ground());
        let r2_tweety = ground
            .theory()
            .rules
            .iter()
            .find(|r| ground.provenance()[&r.label].source == "r2" && r.head == lit("neg fly(tweety)"))
            .unwrap();
        assert_eq!(r2_tweety.body, vec![lit("penguin(tweety)")]);
    }

    #[test]
    fn grounding_is_identity_on_ground_theories() {
        let theory = DefeasibleTheory::new()
            .with_fact(lit("a"))
            .with_rule(Rule::new("r", vec![lit("a")], lit("b(c)"), RuleKind::Defeasible))
            .with_rule(Rule::new("s", vec![], lit("neg b(c)"), RuleKind::Defeasible))
            .with_superiority("r", "s");
        let ground = ground_theory(&theory).unwrap();
        assert_eq!(ground.theory(), &theory);
        let again = ground_theory(ground.theory()).unwrap();
        assert_eq!(again.theory(), ground.theory());
    }

    #[test]
    fn empty_universe() {
        let theory = DefeasibleTheory::new().with_rule(Rule::new("r", vec![lit("p(X)")], lit("q(X)"), RuleKind::Defeasible));
        assert_eq!(ground_theory(&theory), Err(GroundingError::EmptyUniverse));
        assert_eq!(ground_theory(&DefeasibleTheory::new()).unwrap().theory(), &DefeasibleTheory::new());
    }

    #[test]
    fn ground_labels_avoid_existing_labels() {
        let theory = DefeasibleTheory::new()
            .with_fact(lit("p(a)"))
            .with_rule(Rule::new("r", vec![lit("p(X)")], lit("q(X)"), RuleKind::Defeasible))
            .with_rule(Rule::new("r__0", vec![], lit("q(a)"), RuleKind::Defeasible));
        let ground = ground_theory(&theory).unwrap();
        let labels: BTreeSet<_> = ground.theory().rules.iter().map(|r| r.label.clone()).collect();
        assert_eq!(labels.len(), 2);
        assert!(labels.contains("r__0"));
    }

    #[test]
    fn tweety_hierarchy_witness() {
        let levels = is_hierarchical(&tweety()).unwrap();
        let expected: BTreeMap<String, usize> = [("injured", 0), ("penguin", 0), ("bird", 1), ("fly", 2)]
            .into_iter()
            .map(|(p, l)| (p.to_string(), l))
            .collect();
        assert_eq!(levels, expected);
    }

    #[test]
    fn recursion_breaks_hierarchy() {
        let theory = DefeasibleTheory::new()
            .with_rule(Rule::new("t", vec![lit("q")], lit("q"), RuleKind::Defeasible))
            .with_rule(Rule::new("s", vec![], lit("neg q"), RuleKind::Defeasible))
            .with_superiority("t", "s");
        assert_eq!(is_hierarchical(&theory), None);
        assert_eq!(is_hierarchical(&DefeasibleTheory::new()), Some(BTreeMap::new()));
    }

    #[test]
    fn local_hierarchy() {
        assert_eq!(is_locally_hierarchical(&tweety()), Ok(true));
        let self_loop = DefeasibleTheory::new().with_rule(Rule::new("r", vec![lit("p")], lit("p"), RuleKind::Defeasible));
        assert_eq!(is_locally_hierarchical(&self_loop), Ok(false));
        let edges = DefeasibleTheory::new()
            .with_fact(lit("e(a, b)"))
            .with_fact(lit("e(b, a)"))
            .with_rule(Rule::new("r", vec![lit("e(X, Y)"), lit("p(X)")], lit("p(Y)"), RuleKind::Defeasible));
        assert_eq!(is_locally_hierarchical(&edges), Ok(false));
        // predicate-level recursion that is acyclic on ground atoms
        let chain = DefeasibleTheory::new()
            .with_fact(lit("e(a, b)"))
            .with_rule(Rule::new("r", vec![lit("e(X, Y)"), lit("p(X)")], lit("p(Y)"), RuleKind::Defeasible));
        assert_eq!(is_hierarchical(&chain), None);
        // p(a) -> p(b) only exists through the instance X=a,Y=b; but every
        // instance is generated, including X=Y=a, so the ground graph loops
        assert_eq!(is_locally_hierarchical(&chain), Ok(false));
    }

    #[test]
    fn sizes() {
        assert_eq!(theory_size(&DefeasibleTheory::new()), 0);
        assert_eq!(theory_size(&DefeasibleTheory::new().with_fact(lit("p(a)"))), 3);
        // facts: 3 x 3; rules: 4 x (label + arrow + 2 + 2); superiority: 3
        assert_eq!(theory_size(&tweety()), 9 + 24 + 3);
        assert_eq!(theory_size(&tweety()), theory_size(&tweety()));
    }

    #[test]
    fn display_forms() {
        assert_eq!(lit("neg fly(tweety)").to_string(), "neg fly(tweety)");
        assert_eq!(
            Rule::new("r4", vec![lit("injured(X)")], lit("neg fly(X)"), RuleKind::Defeater).to_string(),
            "r4: injured(X) ~> neg fly(X)"
        );
        assert_eq!(Rule::new("r", vec![], lit("p"), RuleKind::Strict).to_string(), "r: -> p");
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(&lit("fly(tweety)")), lit("neg fly(tweety)"));
        assert_eq!(complement(&lit("neg fly(tweety)")), lit("fly(tweety)"));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn complement_is_an_involution(pred in "[a-z][a-z0-9]{0,4}", args in proptest::collection::vec("[a-zA-Z][a-z0-9]{0,3}", 0..3), neg in any::<bool>()) {
                let args = args.into_iter().map(|a| if a.starts_with(|c: char| c.is_ascii_uppercase()) { Term::Var(a) } else { Term::Const(a) }).collect();
                let l = Literal { atom: Atom::new(pred, args), polarity: if neg { Polarity::Negative } else { Polarity::Positive } };
                prop_assert_eq!(complement(&complement(&l)), l.clone());
                prop_assert_ne!(complement(&l), l);
            }

            #[test]
            fn ground_rule_count_matches_formula(theory in arb_variable_theory()) {
                let universe = theory.constants().len();
                match ground_theory(&theory) {
                    Ok(ground) => {
                        let expected: usize = theory.rules.iter().map(|r| universe.pow(r.variables().len() as u32)).sum();
                        prop_assert_eq!(ground.theory().rules.len(), expected);
                        prop_assert_eq!(ground.provenance().len(), expected);
                        prop_assert!(ground.theory().is_ground());
                        let again = ground_theory(ground.theory()).unwrap();
                        prop_assert_eq!(again.theory(), ground.theory());
                    }
                    Err(GroundingError::EmptyUniverse) => prop_assert_eq!(universe, 0),
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }

            #[test]
            fn hierarchical_implies_locally_hierarchical(theory in arb_variable_theory()) {
                if is_hierarchical(&theory).is_some() {
                    if let Ok(local) = is_locally_hierarchical(&theory) {
                        prop_assert!(local);
                    }
                }
            }
        }
    }
}
