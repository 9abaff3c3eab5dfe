//! Direct emission of the compiled Datalog¬ programs for team defeat and
//! individual defeat.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::datalog::{DClause, DatalogProgram};
use crate::theory::{
    validate_theory, Atom, DefeasibleTheory, Literal, Polarity, Rule, RuleKind, Term, ValidationReport,
    RESERVED_SEPARATOR,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Definitely,
    Lambda,
    Defeasibly,
    Overruled,
    Defeated,
    Defeats,
}

impl Tag {
    pub const ALL: [Tag; 6] = [
        Tag::Definitely,
        Tag::Lambda,
        Tag::Defeasibly,
        Tag::Overruled,
        Tag::Defeated,
        Tag::Defeats,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Definitely => "definitely",
            Tag::Lambda => "lambda",
            Tag::Defeasibly => "defeasibly",
            Tag::Overruled => "overruled",
            Tag::Defeated => "defeated",
            Tag::Defeats => "defeats",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyFlavor {
    Delta,
    Lam,
    D,
}

impl BodyFlavor {
    pub fn as_str(self) -> &'static str {
        match self {
            BodyFlavor::Delta => "delta",
            BodyFlavor::Lam => "lam",
            BodyFlavor::D => "d",
        }
    }

    fn tag(self) -> Tag {
        match self {
            BodyFlavor::Delta => Tag::Definitely,
            BodyFlavor::Lam => Tag::Lambda,
            BodyFlavor::D => Tag::Defeasibly,
        }
    }
}

/// What a compiled predicate name stands for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MangledPredicate {
    Literal {
        tag: Tag,
        predicate: String,
        polarity: Polarity,
    },
    Body {
        label: String,
        flavor: BodyFlavor,
    },
}

impl MangledPredicate {
    pub fn literal(tag: Tag, lit: &Literal) -> Self {
        MangledPredicate::Literal {
            tag,
            predicate: lit.atom.predicate.clone(),
            polarity: lit.polarity,
        }
    }

    pub fn body(label: &str, flavor: BodyFlavor) -> Self {
        MangledPredicate::Body {
            label: label.to_string(),
            flavor,
        }
    }

    pub fn name(&self) -> String {
        let sep = RESERVED_SEPARATOR;
        match self {
            MangledPredicate::Literal {
                tag,
                predicate,
                polarity: Polarity::Positive,
            } => format!("{}{sep}{predicate}", tag.as_str()),
            MangledPredicate::Literal {
                tag,
                predicate,
                polarity: Polarity::Negative,
            } => format!("{}{sep}not{sep}{predicate}", tag.as_str()),
            MangledPredicate::Body { label, flavor } => format!("body{sep}{label}{sep}{}", flavor.as_str()),
        }
    }

    /// Members of the floor: definitely, lambda, and the delta and lam bodies.
    pub fn is_floor(&self) -> bool {
        match self {
            MangledPredicate::Literal { tag, .. } => matches!(tag, Tag::Definitely | Tag::Lambda),
            MangledPredicate::Body { flavor, .. } => matches!(flavor, BodyFlavor::Delta | BodyFlavor::Lam),
        }
    }

    pub fn tag(&self) -> Option<Tag> {
        match self {
            MangledPredicate::Literal { tag, .. } => Some(*tag),
            MangledPredicate::Body { .. } => None,
        }
    }
}

impl fmt::Display for MangledPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Clause schema identifiers. `Fact` covers the three unit clauses per fact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Schema {
    Fact,
    /// definitely ← body delta
    C15,
    /// lambda ← body delta
    C16,
    /// defeasibly ← body delta
    C17,
    /// body delta ← definitely...
    C18,
    /// lambda ← not definitely~, body lam
    C19,
    /// defeasibly ← not definitely~, body d, not overruled (team)
    C20,
    /// body lam ← lambda...
    C21,
    /// body d ← defeasibly...
    C22,
    /// overruled ← body lam, not defeated (team)
    C23,
    /// defeated ← body d of the superior rule (team)
    C24,
    /// defeasibly ← not definitely~, body d, not overruled(r) (individual)
    C25,
    /// overruled(r) ← body lam, not defeats(r, s) (individual)
    C26,
    /// defeats(r, s) units (individual)
    C27,
}

impl Schema {
    pub fn as_str(self) -> &'static str {
        match self {
            Schema::Fact => "fact",
            Schema::C15 => "C15",
            Schema::C16 => "C16",
            Schema::C17 => "C17",
            Schema::C18 => "C18",
            Schema::C19 => "C19",
            Schema::C20 => "C20",
            Schema::C21 => "C21",
            Schema::C22 => "C22",
            Schema::C23 => "C23",
            Schema::C24 => "C24",
            Schema::C25 => "C25",
            Schema::C26 => "C26",
            Schema::C27 => "C27",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    Fact(Literal),
    Rule(String),
    /// `(superior, inferior)`
    Superiority(String, String),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Fact(l) => write!(f, "{l}"),
            Source::Rule(label) => f.write_str(label),
            Source::Superiority(t, s) => write!(f, "{t} > {s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseProvenance {
    pub source: Source,
    pub schema: Schema,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DefeatMode {
    Team,
    Individual,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilationOutput {
    pub program: DatalogProgram,
    /// Floor predicates present in the program.
    pub floor: BTreeSet<String>,
    /// One entry per clause of `program`, in the same order.
    pub provenance: Vec<ClauseProvenance>,
    pub mode: DefeatMode,
    /// Decoding table for every compiled predicate name.
    pub predicates: BTreeMap<String, MangledPredicate>,
}

impl CompilationOutput {
    /// Reads a ground compiled atom back as a tagged literal of the source
    /// theory. Only definitely, lambda and defeasibly atoms decode.
    pub fn decode(&self, atom: &Atom) -> Option<(Tag, Literal)> {
        match self.predicates.get(&atom.predicate)? {
            MangledPredicate::Literal {
                tag,
                predicate,
                polarity,
            } if matches!(tag, Tag::Definitely | Tag::Lambda | Tag::Defeasibly) => Some((
                *tag,
                Literal {
                    atom: Atom::new(predicate.clone(), atom.args.clone()),
                    polarity: *polarity,
                },
            )),
            _ => None,
        }
    }

    pub fn is_floor_predicate(&self, predicate: &str) -> bool {
        self.floor.contains(predicate)
    }

    /// Clauses defining floor predicates.
    pub fn floor_program(&self) -> DatalogProgram {
        self.program.restrict(|p| self.floor.contains(p))
    }

    /// The compiled predicates outside the floor.
    pub fn above_floor(&self) -> BTreeSet<String> {
        self.program
            .predicates()
            .filter(|p| !self.floor.contains(*p))
            .map(ToString::to_string)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DClause, &ClauseProvenance)> {
        self.program.clauses().iter().zip(&self.provenance)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("theory failed validation with {} error(s)", .0.errors.len())]
    ValidationFailed(ValidationReport),
}

pub fn compile_team(theory: &DefeasibleTheory) -> Result<CompilationOutput, CompileError> {
    compile(theory, DefeatMode::Team)
}

pub fn compile_individual(theory: &DefeasibleTheory) -> Result<CompilationOutput, CompileError> {
    compile(theory, DefeatMode::Individual)
}

pub fn compile(theory: &DefeasibleTheory, mode: DefeatMode) -> Result<CompilationOutput, CompileError> {
    let report = validate_theory(theory);
    if !report.is_ok() {
        return Err(CompileError::ValidationFailed(report));
    }
    let mut e = Emitter::default();

    for fact in &theory.facts {
        let source = Source::Fact(fact.clone());
        for tag in [Tag::Definitely, Tag::Lambda, Tag::Defeasibly] {
            let head = e.literal(tag, fact, fact.atom.args.clone());
            e.push(Schema::Fact, &source, DClause::fact(head));
        }
    }

    for r in &theory.rules {
        let source = Source::Rule(r.label.clone());
        let args = r.head.atom.args.clone();
        let neg_head = r.head.complement();

        if r.kind == RuleKind::Strict {
            let body = e.body(r, BodyFlavor::Delta);
            for (schema, tag) in [
                (Schema::C15, Tag::Definitely),
                (Schema::C16, Tag::Lambda),
                (Schema::C17, Tag::Defeasibly),
            ] {
                let head = e.literal(tag, &r.head, args.clone());
                e.push(schema, &source, DClause::new(head, vec![body.clone()], vec![]));
            }
            let positive = e.body_literals(r, BodyFlavor::Delta);
            e.push(Schema::C18, &source, DClause::new(body, positive, vec![]));
        }

        if r.is_supportive() {
            let blocker = e.literal(Tag::Definitely, &neg_head, args.clone());
            let head = e.literal(Tag::Lambda, &r.head, args.clone());
            let body = e.body(r, BodyFlavor::Lam);
            e.push(Schema::C19, &source, DClause::new(head, vec![body], vec![blocker.clone()]));

            let head = e.literal(Tag::Defeasibly, &r.head, args.clone());
            let body = e.body(r, BodyFlavor::D);
            let (schema, overruled) = match mode {
                DefeatMode::Team => (Schema::C20, e.literal(Tag::Overruled, &r.head, args.clone())),
                DefeatMode::Individual => {
                    let mut with_label = vec![Term::constant(r.label.clone())];
                    with_label.extend(args.iter().cloned());
                    (Schema::C25, e.literal(Tag::Overruled, &r.head, with_label))
                }
            };
            e.push(schema, &source, DClause::new(head, vec![body], vec![blocker, overruled]));
        }

        let head = e.body(r, BodyFlavor::Lam);
        let positive = e.body_literals(r, BodyFlavor::Lam);
        e.push(Schema::C21, &source, DClause::new(head, positive, vec![]));

        if r.is_supportive() {
            let head = e.body(r, BodyFlavor::D);
            let positive = e.body_literals(r, BodyFlavor::D);
            e.push(Schema::C22, &source, DClause::new(head, positive, vec![]));
        }

        let attack = e.body(r, BodyFlavor::Lam);
        match mode {
            DefeatMode::Team => {
                let head = e.literal(Tag::Overruled, &neg_head, args.clone());
                let mut key = vec![Term::constant(r.label.clone())];
                key.extend(args.iter().cloned());
                let defeated = e.literal(Tag::Defeated, &r.head, key);
                e.push(Schema::C23, &source, DClause::new(head, vec![attack], vec![defeated]));
            }
            DefeatMode::Individual => {
                // one clause per defender with the complementary head
                for defender in theory.rules.iter().filter(|d| d.is_supportive() && d.head.key() == neg_head.key()) {
                    let mut head_args = vec![Term::constant(defender.label.clone())];
                    head_args.extend(args.iter().cloned());
                    let head = e.literal(Tag::Overruled, &neg_head, head_args);
                    let key = vec![Term::constant(defender.label.clone()), Term::constant(r.label.clone())];
                    let defeats = e.literal(Tag::Defeats, &r.head, key);
                    e.push(Schema::C26, &source, DClause::new(head, vec![attack.clone()], vec![defeats]));
                }
            }
        }
    }

    for (t_label, s_label) in &theory.superiority {
        let (Some(t), Some(s)) = (theory.rule(t_label), theory.rule(s_label)) else {
            continue;
        };
        if !t.is_supportive() || s.head.key() != t.head.complement().key() {
            continue;
        }
        let source = Source::Superiority(t_label.clone(), s_label.clone());
        match mode {
            DefeatMode::Team => {
                let mut key = vec![Term::constant(s_label.clone())];
                key.extend(t.head.atom.args.iter().cloned());
                let head = e.literal(Tag::Defeated, &s.head, key);
                let body = e.body(t, BodyFlavor::D);
                e.push(Schema::C24, &source, DClause::new(head, vec![body], vec![]));
            }
            DefeatMode::Individual => {
                let key = vec![Term::constant(t_label.clone()), Term::constant(s_label.clone())];
                let head = e.literal(Tag::Defeats, &s.head, key);
                e.push(Schema::C27, &source, DClause::fact(head));
            }
        }
    }

    Ok(e.finish(mode))
}

#[derive(Default)]
struct Emitter {
    clauses: Vec<(Schema, usize, DClause, ClauseProvenance)>,
    predicates: BTreeMap<String, MangledPredicate>,
}

impl Emitter {
    fn name(&mut self, m: MangledPredicate) -> String {
        let name = m.name();
        self.predicates.entry(name.clone()).or_insert(m);
        name
    }

    fn literal(&mut self, tag: Tag, lit: &Literal, args: Vec<Term>) -> Atom {
        let name = self.name(MangledPredicate::literal(tag, lit));
        Atom::new(name, args)
    }

    fn body(&mut self, r: &Rule, flavor: BodyFlavor) -> Atom {
        let name = self.name(MangledPredicate::body(&r.label, flavor));
        Atom::new(name, r.head.atom.args.clone())
    }

    fn body_literals(&mut self, r: &Rule, flavor: BodyFlavor) -> Vec<Atom> {
        r.body
            .iter()
            .map(|b| self.literal(flavor.tag(), b, b.atom.args.clone()))
            .collect()
    }

    fn push(&mut self, schema: Schema, source: &Source, clause: DClause) {
        let order = self.clauses.len();
        let provenance = ClauseProvenance {
            source: source.clone(),
            schema,
        };
        self.clauses.push((schema, order, clause, provenance));
    }

    fn finish(mut self, mode: DefeatMode) -> CompilationOutput {
        self.clauses.sort_by_key(|(schema, order, _, _)| (*schema, *order));
        let (clauses, provenance): (Vec<_>, Vec<_>) = self.clauses.into_iter().map(|(_, _, c, p)| (c, p)).unzip();
        let program = DatalogProgram::new(clauses).expect("validated theories compile with consistent arities");
        let used: BTreeSet<&str> = program.predicates().collect();
        self.predicates.retain(|name, _| used.contains(name.as_str()));
        let floor = self
            .predicates
            .iter()
            .filter(|(_, m)| m.is_floor())
            .map(|(name, _)| name.clone())
            .collect();
        CompilationOutput {
            program,
            floor,
            provenance,
            mode,
            predicates: self.predicates,
        }
    }
}

pub fn compiled_size(out: &CompilationOutput) -> usize {
    out.program.size()
}

/// Pairs of distinct sources whose compiled names coincide, as
/// `(name, first source, second source)`.
pub fn mangling_collisions(theory: &DefeasibleTheory) -> Vec<(String, String, String)> {
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    let mut collisions = Vec::new();
    let mut record = |name: String, what: String| match seen.get(&name) {
        Some(first) if *first != what => collisions.push((name, first.clone(), what)),
        Some(_) => {}
        None => {
            seen.insert(name, what);
        }
    };
    // every tag prefixes the same qualifier, so one tag suffices
    for predicate in theory.predicates() {
        for polarity in [Polarity::Positive, Polarity::Negative] {
            let m = MangledPredicate::Literal {
                tag: Tag::Definitely,
                predicate: predicate.clone(),
                polarity,
            };
            let what = match polarity {
                Polarity::Positive => predicate.clone(),
                Polarity::Negative => format!("neg {predicate}"),
            };
            record(m.name(), what);
        }
    }
    for r in &theory.rules {
        for flavor in [BodyFlavor::Delta, BodyFlavor::Lam, BodyFlavor::D] {
            let m = MangledPredicate::body(&r.label, flavor);
            record(m.name(), format!("rule {} ({})", r.label, flavor.as_str()));
        }
    }
    collisions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datalog::{compute_signing, dependency_graph, is_call_consistent, is_downward_closed, stratify, Sign};
    use crate::fixtures::*;
    use crate::theory::{is_hierarchical, is_range_restricted, theory_size};
    use alloc::string::ToString;

    fn lines(out: &CompilationOutput) -> Vec<String> {
        out.program.clauses().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn worked_example_team() {
        let out = compile_team(&worked_example()).unwrap();
        let got: BTreeSet<String> = lines(&out).into_iter().collect();
        let want: BTreeSet<String> = [
            // from t
            "lambda__q(X, Y) :- body__t__lam(X, Y), not definitely__not__q(X, Y).",
            "defeasibly__q(X, Y) :- body__t__d(X, Y), not definitely__not__q(X, Y), not overruled__q(X, Y).",
            "body__t__lam(X, Y) :- lambda__p(X, Z), lambda__not__p(Z, Y).",
            "body__t__d(X, Y) :- defeasibly__p(X, Z), defeasibly__not__p(Z, Y).",
            "overruled__not__q(X, Y) :- body__t__lam(X, Y), not defeated__q(t, X, Y).",
            "defeated__not__q(s, X, Y) :- body__t__d(X, Y).",
            // from s
            "lambda__not__q(X, Y) :- body__s__lam(X, Y), not definitely__q(X, Y).",
            "defeasibly__not__q(X, Y) :- body__s__d(X, Y), not definitely__q(X, Y), not overruled__not__q(X, Y).",
            "body__s__lam(X, Y) :- lambda__p(X, Y), lambda__q(Y, X).",
            "body__s__d(X, Y) :- defeasibly__p(X, Y), defeasibly__q(Y, X).",
            "overruled__q(X, Y) :- body__s__lam(X, Y), not defeated__not__q(s, X, Y).",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(got, want);
        assert_eq!(out.program.len(), 11);
    }

    #[test]
    fn strict_rule_clauses() {
        let theory = DefeasibleTheory::new().with_rule(rule("r3", &["penguin(X)"], "bird(X)", RuleKind::Strict));
        let out = compile_team(&theory).unwrap();
        let strict: Vec<String> = out
            .iter()
            .filter(|(_, p)| (Schema::C15..=Schema::C18).contains(&p.schema))
            .map(|(c, _)| c.to_string())
            .collect();
        assert_eq!(
            strict,
            [
                "definitely__bird(X) :- body__r3__delta(X).",
                "lambda__bird(X) :- body__r3__delta(X).",
                "defeasibly__bird(X) :- body__r3__delta(X).",
                "body__r3__delta(X) :- definitely__penguin(X).",
            ]
        );
    }

    #[test]
    fn empty_theory() {
        for out in [compile_team(&DefeasibleTheory::new()), compile_individual(&DefeasibleTheory::new())] {
            let out = out.unwrap();
            assert!(out.program.is_empty());
            assert_eq!(compiled_size(&out), 0);
            assert!(out.floor.is_empty());
        }
    }

    #[test]
    fn single_fact_size() {
        let theory = DefeasibleTheory::new().with_fact(lit("p(a)"));
        let out = compile_team(&theory).unwrap();
        assert_eq!(out.program.len(), 3);
        assert_eq!(compiled_size(&out), 9);
    }

    #[test]
    fn provenance_is_ordered_by_schema() {
        let out = compile_team(&tweety()).unwrap();
        assert_eq!(out.provenance.len(), out.program.len());
        assert!(out.provenance.windows(2).all(|w| w[0].schema <= w[1].schema));
        assert_eq!(out.provenance.iter().filter(|p| p.schema == Schema::Fact).count(), 9);
        assert_eq!(out.provenance.iter().filter(|p| p.schema == Schema::C24).count(), 1);
    }

    #[test]
    fn individual_mode_units() {
        let out = compile_individual(&tweety()).unwrap();
        let text = lines(&out);
        assert!(text.contains(&"defeats__fly(r2, r1).".to_string()));
        assert!(text.contains(&"overruled__not__fly(r2, X) :- body__r1__lam(X), not defeats__fly(r2, r1).".to_string()));
        let no_sup = DefeasibleTheory {
            superiority: BTreeSet::new(),
            ..tweety()
        };
        let out = compile_individual(&no_sup).unwrap();
        assert!(out.program.clauses().iter().all(|c| !c.head.predicate.starts_with("defeats__")));
    }

    #[test]
    fn invalid_theories_are_rejected() {
        let cyclic = tweety().with_superiority("r1", "r2");
        assert!(matches!(compile_team(&cyclic), Err(CompileError::ValidationFailed(_))));
    }

    #[test]
    fn collisions() {
        let theory = DefeasibleTheory::new().with_fact(lit("not__p")).with_fact(lit("neg p"));
        let c = mangling_collisions(&theory);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].0, "definitely__not__p");
        assert!(mangling_collisions(&tweety()).is_empty());
    }

    #[test]
    fn decoding() {
        let out = compile_team(&tweety()).unwrap();
        let atom = Atom::new("defeasibly__not__fly", vec![Term::constant("tweety")]);
        assert_eq!(out.decode(&atom), Some((Tag::Defeasibly, lit("neg fly(tweety)"))));
        let atom = Atom::new("body__r1__d", vec![Term::constant("tweety")]);
        assert_eq!(out.decode(&atom), None);
    }

    #[test]
    fn self_support_cycle() {
        let out = compile_team(&self_support()).unwrap();
        let g = dependency_graph(&out.program);
        assert!(g.has_edge("defeasibly__q", "overruled__q", Sign::Negative));
        assert!(g.has_edge("overruled__q", "defeated__not__q", Sign::Negative));
        assert!(g.has_edge("defeated__not__q", "body__t__d", Sign::Positive));
        assert!(g.has_edge("body__t__d", "defeasibly__q", Sign::Positive));
        assert!(stratify(&out.program).is_none());
        assert!(is_call_consistent(&out.program));
        assert!(stratify(&compile_individual(&self_support()).unwrap().program).is_some());
    }

    #[test]
    fn tweety_team_is_stratified() {
        let out = compile_team(&tweety()).unwrap();
        assert!(stratify(&out.program).is_some());
    }

    fn check_structure(theory: &DefeasibleTheory) -> Result<(), proptest::test_runner::TestCaseError> {
        use proptest::prelude::*;
        let team = compile_team(theory).unwrap();
        let indiv = compile_individual(theory).unwrap();
        prop_assert!(stratify(&indiv.program).is_some());
        prop_assert!(is_call_consistent(&team.program));
        if is_hierarchical(theory).is_some() {
            prop_assert!(stratify(&team.program).is_some());
        }
        let rr = is_range_restricted(theory);
        prop_assert_eq!(crate::datalog::is_safe(&team.program), rr);
        prop_assert_eq!(crate::datalog::is_safe(&indiv.program), rr);
        for out in [&team, &indiv] {
            prop_assert!(is_downward_closed(&out.program, &out.floor));
            prop_assert!(stratify(&out.floor_program()).is_some());
            let signing = compute_signing(&out.program, &out.above_floor());
            prop_assert!(signing.is_some());
            let signing = signing.unwrap();
            for (p, s) in &signing.mapping {
                if p.starts_with("defeasibly__") {
                    prop_assert_eq!(*s, Sign::Positive, "{}", p);
                }
                if p.starts_with("overruled__") {
                    prop_assert_eq!(*s, Sign::Negative, "{}", p);
                }
            }
        }
        let _ = theory_size(theory);
        Ok(())
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn structural_properties_ground(theory in arb_ground_theory(6)) {
                check_structure(&theory)?;
            }

            #[test]
            fn structural_properties_variables(theory in arb_variable_theory()) {
                check_structure(&theory)?;
            }

            #[test]
            fn size_is_linear(theory in arb_ground_theory(6)) {
                let team = compile_team(&theory).unwrap();
                let indiv = compile_individual(&theory).unwrap();
                let n = theory_size(&theory);
                prop_assert!(compiled_size(&team) <= 12 * n);
                // individual defeat emits one overruled clause per
                // (attacker, defender) pair
                let rules = theory.rules.len().max(1);
                prop_assert!(compiled_size(&indiv) <= 12 * n * rules);
            }
        }
    }
}
