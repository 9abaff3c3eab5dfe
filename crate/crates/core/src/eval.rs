//! Grounding and the stratified, Fitting and well-founded semantics.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::compile::CompilationOutput;
use crate::datalog::{stratify, DClause, DatalogProgram};
use crate::theory::{Atom, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("program is not safe: `{clause}`")]
    UnsafeProgram { clause: String },
    #[error("program is not stratified")]
    NotStratified,
    #[error("program carries no compiler provenance")]
    MissingProvenance,
    #[error("evaluation exceeded {0} iterations")]
    IterationLimit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn as_str(self) -> &'static str {
        match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// True, false and unknown ground atoms over a program's atom base. Atoms
/// outside the base are false.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThreeValuedInterpretation {
    pub true_set: BTreeSet<Atom>,
    pub false_set: BTreeSet<Atom>,
    pub unknown_set: BTreeSet<Atom>,
}

impl ThreeValuedInterpretation {
    pub fn value(&self, atom: &Atom) -> Truth {
        if self.true_set.contains(atom) {
            Truth::True
        } else if self.unknown_set.contains(atom) {
            Truth::Unknown
        } else {
            Truth::False
        }
    }

    pub fn is_total(&self) -> bool {
        self.unknown_set.is_empty()
    }

    /// Information ordering: every decided atom of `self` has the same value in `other`.
    pub fn is_below(&self, other: &ThreeValuedInterpretation) -> bool {
        self.true_set.iter().all(|a| other.value(a) == Truth::True)
            && self.false_set.iter().all(|a| other.value(a) == Truth::False)
    }

    /// All atoms with their values, sorted.
    pub fn listing(&self) -> Vec<(Truth, &Atom)> {
        let mut all: Vec<(Truth, &Atom)> = self
            .true_set
            .iter()
            .map(|a| (Truth::True, a))
            .chain(self.false_set.iter().map(|a| (Truth::False, a)))
            .chain(self.unknown_set.iter().map(|a| (Truth::Unknown, a)))
            .collect();
        all.sort_by(|x, y| x.1.cmp(y.1));
        all
    }

    pub fn true_with_predicate<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Atom> + 'a {
        self.true_set.iter().filter(move |a| a.predicate == predicate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    /// Upper bound on alternating-fixpoint rounds.
    pub max_iterations: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            max_iterations: 1_000_000,
        }
    }
}

// ---------------------------------------------------------------------------
// grounding

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundClause {
    pub head: usize,
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
    /// index of the source clause
    pub source: usize,
}

/// Ground instances over the program's constants, with atoms interned.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, usize>,
    clauses: Vec<GroundClause>,
}

impl GroundProgram {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, id: usize) -> &Atom {
        &self.atoms[id]
    }

    pub fn atom_id(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn clauses(&self) -> &[GroundClause] {
        &self.clauses
    }

    pub fn to_clause(&self, c: &GroundClause) -> DClause {
        DClause::new(
            self.atoms[c.head].clone(),
            c.positive.iter().map(|&a| self.atoms[a].clone()).collect(),
            c.negative.iter().map(|&a| self.atoms[a].clone()).collect(),
        )
    }

    pub fn to_program(&self) -> DatalogProgram {
        DatalogProgram::new(self.clauses.iter().map(|c| self.to_clause(c)).collect())
            .expect("instances keep the source arities")
    }

    fn intern(&mut self, atom: Atom) -> usize {
        if let Some(&id) = self.index.get(&atom) {
            return id;
        }
        let id = self.atoms.len();
        self.index.insert(atom.clone(), id);
        self.atoms.push(atom);
        id
    }

    fn interpretation(&self, value: impl Fn(usize) -> Truth) -> ThreeValuedInterpretation {
        let mut out = ThreeValuedInterpretation::default();
        for (id, atom) in self.atoms.iter().enumerate() {
            let set = match value(id) {
                Truth::True => &mut out.true_set,
                Truth::False => &mut out.false_set,
                Truth::Unknown => &mut out.unknown_set,
            };
            set.insert(atom.clone());
        }
        out
    }

    /// No clause has a true body and a head that is not true.
    pub fn is_model(&self, interp: &ThreeValuedInterpretation) -> bool {
        self.clauses.iter().all(|c| {
            let body_true = c.positive.iter().all(|&a| interp.value(&self.atoms[a]) == Truth::True)
                && c.negative.iter().all(|&a| interp.value(&self.atoms[a]) == Truth::False);
            !body_true || interp.value(&self.atoms[c.head]) == Truth::True
        })
    }
}

/// How far instantiation prunes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Grounding {
    /// Argument domains are the constants that some derivation can carry
    /// into each position. Exact for well-founded and stratified models;
    /// Fitting may decide atoms it would leave unknown over the full
    /// instantiation.
    #[default]
    Supported,
    /// Argument domains keep every constant that survives the cyclic
    /// support check. Exact for Fitting as well.
    Complete,
}

/// Instantiates a safe program with [`Grounding::Supported`].
pub fn ground_program(program: &DatalogProgram) -> Result<GroundProgram, EvalError> {
    ground_program_with(program, Grounding::Supported)
}

/// Instantiates a safe program over its constants.
///
/// Each argument position of each predicate gets a domain of constants,
/// and instances that put a constant outside the domain of a positive body
/// position are left out. The dropped body atoms are false under the
/// semantics the chosen [`Grounding`] is exact for.
pub fn ground_program_with(program: &DatalogProgram, mode: Grounding) -> Result<GroundProgram, EvalError> {
    if let Some(bad) = program.clauses().iter().find(|c| !c.is_safe()) {
        return Err(EvalError::UnsafeProgram {
            clause: bad.to_string(),
        });
    }
    let domains = position_domains(program, mode);
    let empty = BTreeSet::new();
    let domain = |p: &str, i: usize| domains.get(p).map_or(&empty, |d| &d[i]);

    let mut ground = GroundProgram::default();
    for (source, clause) in program.clauses().iter().enumerate() {
        // candidates per variable: intersection over its positive positions
        let mut candidates: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        let mut feasible = true;
        for atom in &clause.positive {
            for (i, term) in atom.args.iter().enumerate() {
                let dom = domain(&atom.predicate, i);
                match term {
                    Term::Const(c) => feasible &= dom.contains(c.as_str()),
                    Term::Var(v) => {
                        let here: BTreeSet<&str> = dom.iter().map(String::as_str).collect();
                        let entry = candidates.entry(v.as_str()).or_insert_with(|| here.clone());
                        entry.retain(|c| here.contains(c));
                    }
                }
            }
        }
        if !feasible || candidates.values().any(BTreeSet::is_empty) {
            continue;
        }
        let vars: Vec<&str> = candidates.keys().copied().collect();
        let choices: Vec<Vec<&str>> = vars.iter().map(|v| candidates[v].iter().copied().collect()).collect();
        let mut odometer = vec![0usize; vars.len()];
        loop {
            let binding: BTreeMap<String, String> = vars
                .iter()
                .zip(&odometer)
                .zip(&choices)
                .map(|((v, &i), c)| (v.to_string(), c[i].to_string()))
                .collect();
            let head = ground.intern(clause.head.substitute(&binding));
            let positive = clause.positive.iter().map(|a| ground.intern(a.substitute(&binding))).collect();
            let negative = clause.negative.iter().map(|a| ground.intern(a.substitute(&binding))).collect();
            ground.clauses.push(GroundClause {
                head,
                positive,
                negative,
                source,
            });
            let mut k = 0;
            while k < odometer.len() {
                odometer[k] += 1;
                if odometer[k] < choices[k].len() {
                    break;
                }
                odometer[k] = 0;
                k += 1;
            }
            if k == odometer.len() {
                break;
            }
        }
    }
    Ok(ground)
}

type Domains = BTreeMap<String, Vec<BTreeSet<String>>>;

/// Least (supported) or greatest (complete) fixpoint of the domain equations.
fn position_domains(program: &DatalogProgram, mode: Grounding) -> Domains {
    let universe: BTreeSet<String> = match mode {
        Grounding::Supported => BTreeSet::new(),
        Grounding::Complete => program
            .clauses()
            .iter()
            .flat_map(|c| c.atoms().flat_map(|a| a.constants().map(ToString::to_string)).collect::<Vec<_>>())
            .collect(),
    };
    let mut domains: Domains = program
        .arities()
        .iter()
        .map(|(p, &n)| (p.clone(), vec![universe.clone(); n]))
        .collect();
    loop {
        let mut next: Domains = program
            .arities()
            .iter()
            .map(|(p, &n)| (p.clone(), vec![BTreeSet::new(); n]))
            .collect();
        for clause in program.clauses() {
            for (i, term) in clause.head.args.iter().enumerate() {
                let values: BTreeSet<String> = match term {
                    Term::Const(c) => [c.clone()].into(),
                    Term::Var(v) => {
                        let mut acc: Option<BTreeSet<String>> = None;
                        for atom in &clause.positive {
                            for (j, t) in atom.args.iter().enumerate() {
                                if matches!(t, Term::Var(w) if w == v) {
                                    let d = &domains[&atom.predicate][j];
                                    acc = Some(match acc {
                                        None => d.clone(),
                                        Some(a) => a.intersection(d).cloned().collect(),
                                    });
                                }
                            }
                        }
                        acc.unwrap_or_default()
                    }
                };
                next.get_mut(&clause.head.predicate).expect("head predicate is known")[i].extend(values);
            }
        }
        if next == domains {
            return domains;
        }
        domains = next;
    }
}

// ---------------------------------------------------------------------------
// evaluation

/// Occurrence lists of a ground program.
struct Occurrences {
    positive: Vec<Vec<usize>>,
    negative: Vec<Vec<usize>>,
    defining: Vec<Vec<usize>>,
}

impl Occurrences {
    fn new(g: &GroundProgram) -> Self {
        let n = g.atoms.len();
        let mut occ = Occurrences {
            positive: vec![Vec::new(); n],
            negative: vec![Vec::new(); n],
            defining: vec![Vec::new(); n],
        };
        for (ci, c) in g.clauses.iter().enumerate() {
            occ.defining[c.head].push(ci);
            for &a in &c.positive {
                occ.positive[a].push(ci);
            }
            for &a in &c.negative {
                occ.negative[a].push(ci);
            }
        }
        occ
    }
}

/// Least model of the clauses in `active` whose negative atoms all satisfy
/// `neg_ok`, on top of the atoms already set in `truth`.
fn least_model(
    g: &GroundProgram,
    occ: &Occurrences,
    active: &[bool],
    truth: &mut [bool],
    neg_ok: impl Fn(usize) -> bool,
) {
    let mut remaining: Vec<usize> = vec![usize::MAX; g.clauses.len()];
    let mut queue = VecDeque::new();
    for (ci, c) in g.clauses.iter().enumerate() {
        if !active[ci] || !c.negative.iter().all(|&a| neg_ok(a)) {
            continue;
        }
        remaining[ci] = c.positive.iter().filter(|&&a| !truth[a]).count();
    }
    // counts are taken before anything fires so each atom is counted once
    for (ci, c) in g.clauses.iter().enumerate() {
        if remaining[ci] == 0 && !truth[c.head] {
            truth[c.head] = true;
            queue.push_back(c.head);
        }
    }
    while let Some(a) = queue.pop_front() {
        for &ci in &occ.positive[a] {
            if remaining[ci] == usize::MAX || remaining[ci] == 0 {
                continue;
            }
            remaining[ci] -= 1;
            let head = g.clauses[ci].head;
            if remaining[ci] == 0 && !truth[head] {
                truth[head] = true;
                queue.push_back(head);
            }
        }
    }
}

/// One round of the alternating fixpoint: `(true atoms, possibly true atoms)`.
pub type AlternatingStep = (BTreeSet<Atom>, BTreeSet<Atom>);

fn alternating(
    g: &GroundProgram,
    options: &EvalOptions,
    mut trace: Option<&mut Vec<AlternatingStep>>,
) -> Result<ThreeValuedInterpretation, EvalError> {
    let occ = Occurrences::new(g);
    let n = g.atoms.len();
    let active = vec![true; g.clauses.len()];
    let gamma = |assumed: &[bool]| {
        let mut out = vec![false; n];
        least_model(g, &occ, &active, &mut out, |a| !assumed[a]);
        out
    };
    let mut known = vec![false; n];
    let mut possible = gamma(&known);
    let mut rounds = 0;
    loop {
        if let Some(t) = trace.as_deref_mut() {
            t.push((collect(g, &known), collect(g, &possible)));
        }
        rounds += 1;
        if rounds > options.max_iterations {
            return Err(EvalError::IterationLimit(options.max_iterations));
        }
        let next_known = gamma(&possible);
        let next_possible = gamma(&next_known);
        if next_known == known && next_possible == possible {
            break;
        }
        known = next_known;
        possible = next_possible;
    }
    Ok(g.interpretation(|a| {
        if known[a] {
            Truth::True
        } else if possible[a] {
            Truth::Unknown
        } else {
            Truth::False
        }
    }))
}

fn collect(g: &GroundProgram, set: &[bool]) -> BTreeSet<Atom> {
    set.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| g.atoms[i].clone())
        .collect()
}

pub fn eval_wellfounded(program: &DatalogProgram) -> Result<ThreeValuedInterpretation, EvalError> {
    eval_wellfounded_with(program, &EvalOptions::default())
}

pub fn eval_wellfounded_with(
    program: &DatalogProgram,
    options: &EvalOptions,
) -> Result<ThreeValuedInterpretation, EvalError> {
    alternating(&ground_program(program)?, options, None)
}

/// The well-founded model together with every alternating-fixpoint round.
pub fn eval_wellfounded_traced(
    program: &DatalogProgram,
) -> Result<(ThreeValuedInterpretation, Vec<AlternatingStep>), EvalError> {
    let mut trace = Vec::new();
    let model = alternating(&ground_program(program)?, &EvalOptions::default(), Some(&mut trace))?;
    Ok((model, trace))
}

pub fn eval_wellfounded_ground(g: &GroundProgram) -> Result<ThreeValuedInterpretation, EvalError> {
    alternating(g, &EvalOptions::default(), None)
}

pub fn eval_stratified(program: &DatalogProgram) -> Result<ThreeValuedInterpretation, EvalError> {
    let strata = stratify(program).ok_or(EvalError::NotStratified)?;
    let g = ground_program(program)?;
    let truth = stratified_truth(&g, program, &strata, |_| true);
    Ok(g.interpretation(|a| if truth[a] { Truth::True } else { Truth::False }))
}

/// Per-stratum least models over the ground clauses selected by `keep`.
fn stratified_truth(
    g: &GroundProgram,
    program: &DatalogProgram,
    strata: &BTreeMap<String, usize>,
    keep: impl Fn(&GroundClause) -> bool,
) -> Vec<bool> {
    let occ = Occurrences::new(g);
    let level_of = |c: &GroundClause| strata[&program.clauses()[c.source].head.predicate];
    let levels: BTreeSet<usize> = g.clauses.iter().filter(|c| keep(c)).map(level_of).collect();
    let mut truth = vec![false; g.atoms.len()];
    for level in levels {
        let active: Vec<bool> = g.clauses.iter().map(|c| keep(c) && level_of(c) == level).collect();
        // negated atoms sit in lower strata and are already final
        let snapshot = truth.clone();
        least_model(g, &occ, &active, &mut truth, |a| !snapshot[a]);
    }
    truth
}

/// Atoms whose values are fixed in advance for Fitting evaluation.
#[derive(Clone, Debug, Default)]
pub struct FixedFloor {
    pub predicates: BTreeSet<String>,
    pub model: ThreeValuedInterpretation,
}

pub fn eval_fitting(
    program: &DatalogProgram,
    fixed: Option<&FixedFloor>,
) -> Result<ThreeValuedInterpretation, EvalError> {
    let g = ground_program_with(program, Grounding::Complete)?;
    let preset: Vec<Option<Truth>> = g
        .atoms
        .iter()
        .map(|a| match fixed {
            Some(f) if f.predicates.contains(&a.predicate) => Some(f.model.value(a)),
            _ => None,
        })
        .collect();
    Ok(fitting(&g, &preset))
}

pub fn eval_fitting_ground(g: &GroundProgram) -> ThreeValuedInterpretation {
    fitting(g, &vec![None; g.atoms.len()])
}

/// Kleene iteration of the three-valued consequence operator, driven by
/// atom assignments. Clauses of preset atoms are ignored.
fn fitting(g: &GroundProgram, preset: &[Option<Truth>]) -> ThreeValuedInterpretation {
    let occ = Occurrences::new(g);
    let n = g.atoms.len();
    let mut value = vec![Truth::Unknown; n];
    // body literals not yet satisfied, per clause
    let mut pending: Vec<usize> = g.clauses.iter().map(|c| c.positive.len() + c.negative.len()).collect();
    let mut dead = vec![false; g.clauses.len()];
    // clauses per head whose bodies are not yet false
    let mut live: Vec<usize> = occ.defining.iter().map(Vec::len).collect();
    let mut queue = VecDeque::new();

    let assign = |value: &mut Vec<Truth>, queue: &mut VecDeque<usize>, a: usize, t: Truth| {
        if value[a] == Truth::Unknown {
            value[a] = t;
            queue.push_back(a);
        }
    };

    for a in 0..n {
        match preset[a] {
            Some(t) if t != Truth::Unknown => assign(&mut value, &mut queue, a, t),
            Some(_) => {}
            None if live[a] == 0 => assign(&mut value, &mut queue, a, Truth::False),
            None => {}
        }
    }
    for (ci, c) in g.clauses.iter().enumerate() {
        if pending[ci] == 0 && preset[c.head].is_none() {
            assign(&mut value, &mut queue, c.head, Truth::True);
        }
    }

    while let Some(a) = queue.pop_front() {
        let (satisfying, falsifying) = match value[a] {
            Truth::True => (&occ.positive[a], &occ.negative[a]),
            Truth::False => (&occ.negative[a], &occ.positive[a]),
            Truth::Unknown => continue,
        };
        for &ci in satisfying {
            pending[ci] -= 1;
            let head = g.clauses[ci].head;
            if pending[ci] == 0 && !dead[ci] && preset[head].is_none() {
                assign(&mut value, &mut queue, head, Truth::True);
            }
        }
        for &ci in falsifying {
            if dead[ci] {
                continue;
            }
            dead[ci] = true;
            let head = g.clauses[ci].head;
            live[head] -= 1;
            if live[head] == 0 && preset[head].is_none() {
                assign(&mut value, &mut queue, head, Truth::False);
            }
        }
    }
    g.interpretation(|a| value[a])
}

/// Stratified evaluation of the floor, then Fitting on the remaining
/// clauses with the floor held fixed.
pub fn eval_hybrid(compiled: &CompilationOutput) -> Result<ThreeValuedInterpretation, EvalError> {
    let program = &compiled.program;
    if compiled.provenance.len() != program.len() {
        return Err(EvalError::MissingProvenance);
    }
    let g = ground_program_with(program, Grounding::Complete)?;
    let floor_strata = stratify(&compiled.floor_program()).ok_or(EvalError::NotStratified)?;
    let is_floor = |c: &GroundClause| compiled.floor.contains(&program.clauses()[c.source].head.predicate);
    let floor_truth = stratified_truth(&g, program, &floor_strata, is_floor);
    let preset: Vec<Option<Truth>> = g
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            compiled.floor.contains(&a.predicate).then(|| {
                if floor_truth[i] {
                    Truth::True
                } else {
                    Truth::False
                }
            })
        })
        .collect();
    Ok(fitting(&g, &preset))
}
