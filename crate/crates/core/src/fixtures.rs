//! Theories shared by the unit tests, and proptest strategies.

use alloc::vec::Vec;

use crate::theory::*;

/// Reads `"neg p(a, X)"`-style literals; uppercase-initial arguments are variables.
pub fn lit(text: &str) -> Literal {
    let text = text.trim();
    let (polarity, rest) = match text.strip_prefix("neg ") {
        Some(rest) => (Polarity::Negative, rest.trim()),
        None => (Polarity::Positive, text),
    };
    let (predicate, args) = match rest.find('(') {
        Some(open) => {
            let inner = rest[open + 1..].trim_end_matches(')');
            let args = inner
                .split(',')
                .map(str::trim)
                .map(|a| {
                    if a.starts_with(|c: char| c.is_ascii_uppercase()) {
                        Term::var(a)
                    } else {
                        Term::constant(a)
                    }
                })
                .collect();
            (&rest[..open], args)
        }
        None => (rest, Vec::new()),
    };
    Literal {
        atom: Atom::new(predicate, args),
        polarity,
    }
}

pub fn rule(label: &str, body: &[&str], head: &str, kind: RuleKind) -> Rule {
    Rule::new(label, body.iter().map(|b| lit(b)).collect(), lit(head), kind)
}

pub fn tweety() -> DefeasibleTheory {
    DefeasibleTheory::new()
        .with_rule(rule("r1", &["bird(X)"], "fly(X)", RuleKind::Defeasible))
        .with_rule(rule("r2", &["penguin(X)"], "neg fly(X)", RuleKind::Defeasible))
        .with_rule(rule("r3", &["penguin(X)"], "bird(X)", RuleKind::Strict))
        .with_rule(rule("r4", &["injured(X)"], "neg fly(X)", RuleKind::Defeater))
        .with_fact(lit("penguin(tweety)"))
        .with_fact(lit("bird(freddie)"))
        .with_fact(lit("injured(freddie)"))
        .with_superiority("r2", "r1")
}

pub fn platypus() -> DefeasibleTheory {
    DefeasibleTheory::new()
        .with_rule(rule("r1", &["monotreme(X)"], "mammal(X)", RuleKind::Defeasible))
        .with_rule(rule("r2", &["hasFur(X)"], "mammal(X)", RuleKind::Defeasible))
        .with_rule(rule("r3", &["laysEggs(X)"], "neg mammal(X)", RuleKind::Defeasible))
        .with_rule(rule("r4", &["webFooted(X)"], "neg mammal(X)", RuleKind::Defeasible))
        .with_superiority("r1", "r3")
        .with_superiority("r2", "r4")
        .with_fact(lit("monotreme(platypus)"))
        .with_fact(lit("laysEggs(platypus)"))
        .with_fact(lit("hasFur(platypus)"))
        .with_fact(lit("webFooted(platypus)"))
}

/// {t: q => q; s: => neg q; t > s}: its team-defeat program is not stratified.
pub fn self_support() -> DefeasibleTheory {
    DefeasibleTheory::new()
        .with_rule(rule("t", &["q"], "q", RuleKind::Defeasible))
        .with_rule(rule("s", &[], "neg q", RuleKind::Defeasible))
        .with_superiority("t", "s")
}

/// The two-rule example whose compiled program is listed clause by clause.
pub fn worked_example() -> DefeasibleTheory {
    DefeasibleTheory::new()
        .with_rule(rule("s", &["p(X, Y)", "q(Y, X)"], "neg q(X, Y)", RuleKind::Defeasible))
        .with_rule(rule("t", &["p(X, Z)", "neg p(Z, Y)"], "q(X, Y)", RuleKind::Defeasible))
        .with_superiority("t", "s")
}

pub fn literal_set(items: &[&str]) -> alloc::collections::BTreeSet<Literal> {
    items.iter().map(|s| lit(s)).collect()
}

// ---------------------------------------------------------------------------
// proptest strategies

use proptest::prelude::*;

fn arb_kind() -> impl Strategy<Value = RuleKind> {
    prop_oneof![
        2 => Just(RuleKind::Strict),
        5 => Just(RuleKind::Defeasible),
        1 => Just(RuleKind::Defeater),
    ]
}

fn propositional_literal(atoms: usize) -> impl Strategy<Value = Literal> {
    (0..atoms, any::<bool>()).prop_map(|(i, neg)| {
        let l = Literal::positive(alloc::format!("p{i}"), Vec::new());
        if neg {
            l.complement()
        } else {
            l
        }
    })
}

/// Small propositional theories: at most `atoms` atoms, 12 rules, 6 pairs.
pub fn arb_ground_theory(atoms: usize) -> impl Strategy<Value = DefeasibleTheory> {
    let rule_parts = proptest::collection::vec(
        (
            proptest::collection::vec(propositional_literal(atoms), 0..3),
            propositional_literal(atoms),
            arb_kind(),
        ),
        0..12,
    );
    let facts = proptest::collection::btree_set(propositional_literal(atoms), 0..4);
    let pairs = proptest::collection::vec((0usize..12, 0usize..12), 0..6);
    (rule_parts, facts, pairs).prop_map(|(parts, facts, pairs)| {
        let rules: Vec<Rule> = parts
            .into_iter()
            .enumerate()
            .map(|(i, (body, head, kind))| Rule::new(alloc::format!("r{i}"), body, head, kind))
            .collect();
        let mut theory = DefeasibleTheory {
            facts,
            rules,
            ..Default::default()
        };
        // superior index below inferior index keeps the relation acyclic
        for (a, b) in pairs {
            let (t, s) = (a.min(b), a.max(b));
            if t != s && s < theory.rules.len() {
                let label_t = theory.rules[t].label.clone();
                let label_s = theory.rules[s].label.clone();
                theory.superiority.insert((label_t, label_s));
            }
        }
        theory
    })
}

fn arb_term(vars: &'static [&'static str], constants: &'static [&'static str]) -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => proptest::sample::select(vars).prop_map(Term::var),
        1 => proptest::sample::select(constants).prop_map(Term::constant),
    ]
}

fn arb_var_literal() -> impl Strategy<Value = Literal> {
    const VARS: &[&str] = &["X", "Y"];
    const CONSTS: &[&str] = &["a", "b", "c"];
    // predicate i has arity i % 3
    (0usize..4, any::<bool>(), proptest::collection::vec(arb_term(VARS, CONSTS), 2)).prop_map(|(p, neg, terms)| {
        let arity = p % 3;
        let l = Literal::positive(alloc::format!("q{p}"), terms.into_iter().take(arity).collect());
        if neg {
            l.complement()
        } else {
            l
        }
    })
}

/// Theories with variables over at most three constants. Not necessarily
/// range-restricted.
pub fn arb_variable_theory() -> impl Strategy<Value = DefeasibleTheory> {
    let rule_parts = proptest::collection::vec(
        (proptest::collection::vec(arb_var_literal(), 0..3), arb_var_literal(), arb_kind()),
        0..5,
    );
    let facts = proptest::collection::btree_set(
        arb_var_literal().prop_filter("ground", Literal::is_ground),
        0..4,
    );
    (rule_parts, facts).prop_map(|(parts, facts)| DefeasibleTheory {
        facts,
        rules: parts
            .into_iter()
            .enumerate()
            .map(|(i, (body, head, kind))| Rule::new(alloc::format!("r{i}"), body, head, kind))
            .collect(),
        superiority: Default::default(),
    })
}
