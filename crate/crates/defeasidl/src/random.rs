//! Seeded generators for theories and Datalog¬ programs.

use std::collections::BTreeSet;

use defeasidl_core::{Atom, DClause, DatalogProgram, DefeasibleTheory, Literal, Rule, RuleKind, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED_VAR: &str = "DEFEASIDL_SEED";
pub const DEFAULT_SEED: u64 = 0x5eed_defe;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The seed from `DEFEASIDL_SEED`, else `fallback`.
pub fn seed_from_env(fallback: u64) -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(fallback)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryParams {
    pub atoms: usize,
    pub rules: usize,
    pub pairs: usize,
    pub facts: usize,
    pub max_body: usize,
    pub defeater_ratio: f64,
    pub strict_ratio: f64,
    /// For variable theories: constants available to facts and rules.
    pub constants: usize,
    /// For variable theories: highest predicate arity.
    pub max_arity: usize,
}

impl Default for TheoryParams {
    fn default() -> Self {
        TheoryParams {
            atoms: 8,
            rules: 12,
            pairs: 6,
            facts: 4,
            max_body: 3,
            defeater_ratio: 0.15,
            strict_ratio: 0.2,
            constants: 3,
            max_arity: 2,
        }
    }
}

fn kind(rng: &mut impl Rng, p: &TheoryParams) -> RuleKind {
    let x: f64 = rng.gen();
    if x < p.defeater_ratio {
        RuleKind::Defeater
    } else if x < p.defeater_ratio + p.strict_ratio {
        RuleKind::Strict
    } else {
        RuleKind::Defeasible
    }
}

fn maybe_negate(rng: &mut impl Rng, l: Literal) -> Literal {
    if rng.gen_bool(0.4) {
        l.complement()
    } else {
        l
    }
}

/// Acyclic superiority pairs, preferring pairs with complementary heads.
fn superiority(rng: &mut impl Rng, rules: &[Rule], wanted: usize) -> BTreeSet<(String, String)> {
    let mut order: Vec<usize> = (0..rules.len()).collect();
    order.shuffle(rng);
    let rank = |i: usize| order.iter().position(|&o| o == i).expect("permutation");
    let mut conflicting = Vec::new();
    let mut other = Vec::new();
    for a in 0..rules.len() {
        for b in 0..rules.len() {
            if a != b && rank(a) < rank(b) {
                if rules[a].head.key() == rules[b].head.complement().key() {
                    conflicting.push((a, b));
                } else {
                    other.push((a, b));
                }
            }
        }
    }
    let mut pairs = BTreeSet::new();
    let target = rng.gen_range(0..=wanted);
    for _ in 0..target {
        let pool = if !conflicting.is_empty() && (other.is_empty() || rng.gen_bool(0.85)) {
            &conflicting
        } else if !other.is_empty() {
            &other
        } else {
            break;
        };
        let &(a, b) = pool.choose(rng).expect("non-empty pool");
        pairs.insert((rules[a].label.clone(), rules[b].label.clone()));
    }
    pairs
}

/// Propositional theories with at most `atoms` atoms, `rules` rules and
/// `pairs` superiority pairs.
pub fn ground_theory(rng: &mut SeededRng, p: &TheoryParams) -> DefeasibleTheory {
    let atoms = rng.gen_range(1..=p.atoms.max(1));
    let lit = |rng: &mut SeededRng| {
        let l = Literal::positive(format!("p{}", rng.gen_range(0..atoms)), Vec::new());
        maybe_negate(rng, l)
    };
    let rules: Vec<Rule> = (0..rng.gen_range(0..=p.rules))
        .map(|i| {
            let body = (0..rng.gen_range(0..=p.max_body)).map(|_| lit(rng)).collect();
            let head = lit(rng);
            Rule::new(format!("r{i}"), body, head, kind(rng, p))
        })
        .collect();
    let facts = (0..rng.gen_range(0..=p.facts)).map(|_| lit(rng)).collect();
    let superiority = superiority(rng, &rules, p.pairs);
    DefeasibleTheory {
        facts,
        rules,
        superiority,
    }
}

struct Signature {
    arities: Vec<usize>,
    constants: Vec<String>,
}

impl Signature {
    fn new(rng: &mut impl Rng, p: &TheoryParams) -> Self {
        let predicates = rng.gen_range(1..=p.atoms.clamp(1, 4));
        Signature {
            arities: (0..predicates).map(|_| rng.gen_range(0..=p.max_arity)).collect(),
            constants: (0..rng.gen_range(1..=p.constants.max(1))).map(|i| format!("c{i}")).collect(),
        }
    }

    fn literal(&self, rng: &mut SeededRng, term: &mut dyn FnMut(&mut SeededRng) -> Term) -> Literal {
        let q = rng.gen_range(0..self.arities.len());
        let mut args = Vec::new();
        for _ in 0..self.arities[q] {
            args.push(term(rng));
        }
        maybe_negate(rng, Literal::positive(format!("q{q}"), args))
    }

    fn constant(&self, rng: &mut SeededRng) -> Term {
        Term::constant(self.constants.choose(rng).expect("at least one constant").clone())
    }
}

/// Theories over predicates of arity up to `max_arity` and up to
/// `constants` constants. Range-restricted unless `range_restricted` is
/// false, in which case some head variables may be missing from bodies.
pub fn variable_theory(rng: &mut SeededRng, p: &TheoryParams, range_restricted: bool) -> DefeasibleTheory {
    let sig = Signature::new(rng, p);
    const VARS: [&str; 3] = ["X", "Y", "Z"];
    let mut rules = Vec::new();
    for i in 0..rng.gen_range(0..=p.rules.min(8)) {
        let body: Vec<Literal> = (0..rng.gen_range(0..=p.max_body))
            .map(|_| {
                sig.literal(rng, &mut |r| {
                    if r.gen_bool(0.8) {
                        Term::var(VARS[r.gen_range(0..VARS.len())])
                    } else {
                        sig.constant(r)
                    }
                })
            })
            .collect();
        let bound: Vec<String> = body
            .iter()
            .flat_map(|l| l.atom.variables().map(str::to_string))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let head = sig.literal(rng, &mut |r| {
            if !range_restricted && r.gen_bool(0.3) {
                Term::var(VARS[r.gen_range(0..VARS.len())])
            } else if !bound.is_empty() && r.gen_bool(0.85) {
                Term::var(bound[r.gen_range(0..bound.len())].clone())
            } else {
                sig.constant(r)
            }
        });
        rules.push(Rule::new(format!("r{i}"), body, head, kind(rng, p)));
    }
    let mut facts: BTreeSet<Literal> = (0..rng.gen_range(1..=p.facts.max(1)))
        .map(|_| sig.literal(rng, &mut |r| sig.constant(r)))
        .collect();
    // a constant somewhere keeps the Herbrand universe non-empty
    if theory_constants(&facts, &rules).is_empty() {
        if let Some(q) = sig.arities.iter().position(|&a| a > 0) {
            let args = (0..sig.arities[q]).map(|_| sig.constant(rng)).collect();
            facts.insert(Literal::positive(format!("q{q}"), args));
        }
    }
    let superiority = superiority(rng, &rules, p.pairs);
    DefeasibleTheory {
        facts,
        rules,
        superiority,
    }
}

fn theory_constants(facts: &BTreeSet<Literal>, rules: &[Rule]) -> BTreeSet<String> {
    let rule_lits = rules.iter().flat_map(|r| r.body.iter().chain(core::iter::once(&r.head)));
    facts
        .iter()
        .chain(rule_lits)
        .flat_map(|l| l.atom.constants().map(str::to_string))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProgramParams {
    pub predicates: usize,
    pub clauses: usize,
    pub max_body: usize,
    pub max_arity: usize,
    pub constants: usize,
    pub negation_ratio: f64,
}

impl Default for ProgramParams {
    fn default() -> Self {
        ProgramParams {
            predicates: 10,
            clauses: 20,
            max_body: 3,
            max_arity: 2,
            constants: 3,
            negation_ratio: 0.35,
        }
    }
}

/// Safe Datalog¬ programs: every head and negated variable also occurs in
/// a positive body atom.
pub fn safe_program(rng: &mut SeededRng, p: &ProgramParams) -> DatalogProgram {
    let predicates = rng.gen_range(1..=p.predicates.max(1));
    let arities: Vec<usize> = (0..predicates).map(|_| rng.gen_range(0..=p.max_arity)).collect();
    let constants: Vec<String> = (0..p.constants.max(1)).map(|i| format!("c{i}")).collect();
    const VARS: [&str; 3] = ["X", "Y", "Z"];
    let atom_with = |rng: &mut SeededRng, q: usize, term: &mut dyn FnMut(&mut SeededRng) -> Term| {
        let args = (0..arities[q]).map(|_| term(rng)).collect();
        Atom::new(format!("p{q}"), args)
    };
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(1..=p.clauses.max(1)) {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        let n_pos = rng.gen_range(0..=p.max_body);
        for _ in 0..n_pos {
            let q = rng.gen_range(0..predicates);
            positive.push(atom_with(rng, q, &mut |r| {
                if r.gen_bool(0.75) {
                    Term::var(VARS[r.gen_range(0..VARS.len())])
                } else {
                    Term::constant(constants.choose(r).expect("constants").clone())
                }
            }));
        }
        let bound: Vec<String> = positive
            .iter()
            .flat_map(|a| a.variables().map(str::to_string))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut safe_term = |r: &mut SeededRng| {
            if !bound.is_empty() && r.gen_bool(0.8) {
                Term::var(bound[r.gen_range(0..bound.len())].clone())
            } else {
                Term::constant(constants.choose(r).expect("constants").clone())
            }
        };
        for _ in 0..rng.gen_range(0..=p.max_body) {
            if rng.gen_bool(p.negation_ratio) {
                let q = rng.gen_range(0..predicates);
                negative.push(atom_with(rng, q, &mut safe_term));
            }
        }
        let q = rng.gen_range(0..predicates);
        let head = atom_with(rng, q, &mut safe_term);
        clauses.push(DClause::new(head, positive, negative));
    }
    DatalogProgram::new(clauses).expect("each predicate has one arity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use defeasidl_core::datalog::is_safe;
    use defeasidl_core::{is_range_restricted, validate_theory};

    #[test]
    fn generators_are_deterministic() {
        let p = TheoryParams::default();
        assert_eq!(ground_theory(&mut rng(7), &p), ground_theory(&mut rng(7), &p));
        assert_eq!(variable_theory(&mut rng(7), &p, true), variable_theory(&mut rng(7), &p, true));
        let q = ProgramParams::default();
        assert_eq!(safe_program(&mut rng(7), &q), safe_program(&mut rng(7), &q));
    }

    #[test]
    fn generated_theories_are_valid_and_bounded() {
        let p = TheoryParams::default();
        let mut r = rng(1);
        for _ in 0..200 {
            let t = ground_theory(&mut r, &p);
            assert!(validate_theory(&t).is_ok(), "{t:?}");
            assert!(t.rules.len() <= 12 && t.superiority.len() <= 6 && t.predicates().len() <= 8);
            let v = variable_theory(&mut r, &p, true);
            assert!(validate_theory(&v).is_ok(), "{v:?}");
            assert!(is_range_restricted(&v));
            assert!(v.constants().len() <= 3);
            assert!(defeasidl_core::conclusions(&v).is_ok(), "{v:?}");
            assert!(defeasidl_core::conclusions(&variable_theory(&mut r, &p, false)).is_ok());
        }
    }

    #[test]
    fn non_range_restricted_theories_occur() {
        let p = TheoryParams::default();
        let mut r = rng(2);
        assert!((0..100).any(|_| !is_range_restricted(&variable_theory(&mut r, &p, false))));
    }

    #[test]
    fn generated_programs_are_safe() {
        let p = ProgramParams::default();
        let mut r = rng(3);
        for _ in 0..200 {
            let prog = safe_program(&mut r, &p);
            assert!(is_safe(&prog));
            assert!(prog.len() <= 20 && prog.arities().len() <= 10);
        }
    }
}
