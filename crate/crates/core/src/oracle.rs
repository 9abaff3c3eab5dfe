//! Direct forward chaining of the +Δ, +λ, +∂|| and +∂||* inference rules on a
//! ground theory.
//!
//! This is the reference the compiled programs are checked against, so it
//! deliberately shares nothing with the compiler or the Datalog evaluator.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::theory::{ground_theory, DefeasibleTheory, GroundTheory, GroundingError, Literal, RuleKind};

/// The four closures of a theory. Every member is a ground literal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConclusionSet {
    pub delta: BTreeSet<Literal>,
    pub lambda: BTreeSet<Literal>,
    pub dpar: BTreeSet<Literal>,
    pub dpar_star: BTreeSet<Literal>,
}

impl ConclusionSet {
    /// delta ⊆ dpar_star ⊆ dpar ⊆ lambda and delta ⊆ lambda.
    pub fn is_chain_consistent(&self) -> bool {
        self.delta.is_subset(&self.dpar_star)
            && self.dpar_star.is_subset(&self.dpar)
            && self.dpar.is_subset(&self.lambda)
            && self.delta.is_subset(&self.lambda)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Defeat {
    Team,
    Individual,
}

struct GroundRule {
    body: Vec<usize>,
    head: usize,
    kind: RuleKind,
}

/// Literals interned to dense ids, complements included.
struct Index {
    literals: Vec<Literal>,
    complement: Vec<usize>,
    facts: Vec<usize>,
    rules: Vec<GroundRule>,
    /// rules by head literal
    rules_for: Vec<Vec<usize>>,
    /// rule pairs (t, s) with t > s
    superior: BTreeSet<(usize, usize)>,
}

impl Index {
    fn new(theory: &DefeasibleTheory) -> Self {
        let mut ids: BTreeMap<Literal, usize> = BTreeMap::new();
        let mut literals = Vec::new();
        let intern = |l: &Literal, ids: &mut BTreeMap<Literal, usize>, literals: &mut Vec<Literal>| -> usize {
            for candidate in [l.clone(), l.complement()] {
                if !ids.contains_key(&candidate) {
                    ids.insert(candidate.clone(), literals.len());
                    literals.push(candidate);
                }
            }
            ids[l]
        };
        let facts: Vec<usize> = theory
            .facts
            .iter()
            .map(|f| intern(f, &mut ids, &mut literals))
            .collect();
        let rules: Vec<GroundRule> = theory
            .rules
            .iter()
            .map(|r| GroundRule {
                body: r.body.iter().map(|l| intern(l, &mut ids, &mut literals)).collect(),
                head: intern(&r.head, &mut ids, &mut literals),
                kind: r.kind,
            })
            .collect();
        let complement = literals.iter().map(|l| ids[&l.complement()]).collect();
        let mut rules_for = vec![Vec::new(); literals.len()];
        for (i, r) in rules.iter().enumerate() {
            rules_for[r.head].push(i);
        }
        let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, r) in theory.rules.iter().enumerate() {
            by_label.entry(r.label.as_str()).or_default().push(i);
        }
        let mut superior = BTreeSet::new();
        for (t, s) in &theory.superiority {
            if let (Some(ts), Some(ss)) = (by_label.get(t.as_str()), by_label.get(s.as_str())) {
                for &ti in ts {
                    for &si in ss {
                        superior.insert((ti, si));
                    }
                }
            }
        }
        Index {
            literals,
            complement,
            facts,
            rules,
            rules_for,
            superior,
        }
    }

    fn set_of(&self, member: &[bool]) -> BTreeSet<Literal> {
        member
            .iter()
            .zip(&self.literals)
            .filter(|(m, _)| **m)
            .map(|(_, l)| l.clone())
            .collect()
    }

    fn members(&self, set: &BTreeSet<Literal>) -> Vec<bool> {
        self.literals.iter().map(|l| set.contains(l)).collect()
    }

    /// Least superset of `seed` closed under the rules accepted by `usable`,
    /// where a rule only fires if `allowed(head)`. Counter-based, linear.
    fn chain(&self, seed: &[bool], usable: impl Fn(&GroundRule) -> bool, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut member = seed.to_vec();
        let mut waiting: Vec<usize> = self.rules.iter().map(|r| r.body.len()).collect();
        let mut occurs = vec![Vec::new(); self.literals.len()];
        for (i, r) in self.rules.iter().enumerate() {
            for &b in &r.body {
                occurs[b].push(i);
            }
        }
        let mut queue: Vec<usize> = (0..member.len()).filter(|&l| member[l]).collect();
        let fire = |r: usize, member: &mut Vec<bool>, queue: &mut Vec<usize>| {
            let rule = &self.rules[r];
            if usable(rule) && allowed(rule.head) && !member[rule.head] {
                member[rule.head] = true;
                queue.push(rule.head);
            }
        };
        let ready: Vec<usize> = (0..self.rules.len()).filter(|&r| waiting[r] == 0).collect();
        for r in ready {
            fire(r, &mut member, &mut queue);
        }
        while let Some(l) = queue.pop() {
            for &r in &occurs[l] {
                waiting[r] -= 1;
                if waiting[r] == 0 {
                    fire(r, &mut member, &mut queue);
                }
            }
        }
        member
    }

    fn delta(&self) -> Vec<bool> {
        let mut seed = vec![false; self.literals.len()];
        for &f in &self.facts {
            seed[f] = true;
        }
        self.chain(&seed, |r| r.kind == RuleKind::Strict, |_| true)
    }

    fn lambda(&self, delta: &[bool]) -> Vec<bool> {
        self.chain(delta, |r| r.kind != RuleKind::Defeater, |q| !delta[self.complement[q]])
    }

    fn body_within(&self, rule: usize, set: &[bool]) -> bool {
        self.rules[rule].body.iter().all(|&a| set[a])
    }

    /// Whether `q` may be added on top of `current` by +∂|| (team) or +∂||* (individual).
    fn provable(&self, q: usize, current: &[bool], delta: &[bool], lambda: &[bool], defeat: Defeat) -> bool {
        if delta[q] {
            return true;
        }
        let not_q = self.complement[q];
        if delta[not_q] {
            return false;
        }
        let supporters: Vec<usize> = self.rules_for[q]
            .iter()
            .copied()
            .filter(|&r| self.rules[r].kind != RuleKind::Defeater && self.body_within(r, current))
            .collect();
        // attackers that are not discarded by (2.3.1)
        let live_attackers: Vec<usize> = self.rules_for[not_q]
            .iter()
            .copied()
            .filter(|&s| self.body_within(s, lambda))
            .collect();
        match defeat {
            Defeat::Team => {
                !supporters.is_empty()
                    && live_attackers
                        .iter()
                        .all(|&s| supporters.iter().any(|&t| self.superior.contains(&(t, s))))
            }
            Defeat::Individual => supporters.iter().any(|&r| {
                live_attackers
                    .iter()
                    .all(|&s| self.superior.contains(&(r, s)))
            }),
        }
    }

    /// One simultaneous application of the inference rule on top of `current`.
    #[cfg(test)]
    fn defeasible_pass(&self, current: &[bool], delta: &[bool], lambda: &[bool], defeat: Defeat) -> Vec<bool> {
        (0..self.literals.len())
            .map(|q| current[q] || self.provable(q, current, delta, lambda, defeat))
            .collect()
    }

    fn defeasible(&self, delta: &[bool], lambda: &[bool], defeat: Defeat) -> Vec<bool> {
        let mut current = delta.to_vec();
        // Gauss-Seidel sweeps; the condition is monotone in `current`.
        loop {
            let mut changed = false;
            for q in 0..self.literals.len() {
                if !current[q] && self.provable(q, &current, delta, lambda, defeat) {
                    current[q] = true;
                    changed = true;
                }
            }
            if !changed {
                return current;
            }
        }
    }
}

/// P_Δ: facts closed under strict rules.
pub fn delta_closure(g: &GroundTheory) -> BTreeSet<Literal> {
    let index = Index::new(g.theory());
    index.set_of(&index.delta())
}

/// P_λ given P_Δ.
pub fn lambda_closure(g: &GroundTheory, delta: &BTreeSet<Literal>) -> BTreeSet<Literal> {
    let index = Index::new(g.theory());
    let d = index.members(delta);
    index.set_of(&index.lambda(&d))
}

/// P_∂|| (team defeat) given P_Δ and P_λ.
pub fn dpar_closure(g: &GroundTheory, delta: &BTreeSet<Literal>, lambda: &BTreeSet<Literal>) -> BTreeSet<Literal> {
    let index = Index::new(g.theory());
    let (d, l) = (index.members(delta), index.members(lambda));
    index.set_of(&index.defeasible(&d, &l, Defeat::Team))
}

/// P_∂||* (individual defeat) given P_Δ and P_λ.
pub fn dpar_star_closure(g: &GroundTheory, delta: &BTreeSet<Literal>, lambda: &BTreeSet<Literal>) -> BTreeSet<Literal> {
    let index = Index::new(g.theory());
    let (d, l) = (index.members(delta), index.members(lambda));
    index.set_of(&index.defeasible(&d, &l, Defeat::Individual))
}

/// All four closures of a theory, grounding it first.
pub fn conclusions(theory: &DefeasibleTheory) -> Result<ConclusionSet, GroundingError> {
    let ground = ground_theory(theory)?;
    Ok(ground_conclusions(&ground))
}

pub fn ground_conclusions(g: &GroundTheory) -> ConclusionSet {
    let index = Index::new(g.theory());
    let delta = index.delta();
    let lambda = index.lambda(&delta);
    let dpar = index.defeasible(&delta, &lambda, Defeat::Team);
    let dpar_star = index.defeasible(&delta, &lambda, Defeat::Individual);
    ConclusionSet {
        delta: index.set_of(&delta),
        lambda: index.set_of(&lambda),
        dpar: index.set_of(&dpar),
        dpar_star: index.set_of(&dpar_star),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::theory::{Rule, RuleKind};

    #[test]
    fn tweety_closures() {
        let c = conclusions(&tweety()).unwrap();
        let delta = literal_set(&["penguin(tweety)", "bird(freddie)", "injured(freddie)", "bird(tweety)"]);
        assert_eq!(c.delta, delta);
        let mut lambda = delta.clone();
        lambda.extend(literal_set(&["fly(tweety)", "fly(freddie)", "neg fly(tweety)"]));
        assert_eq!(c.lambda, lambda);
        let mut dpar = delta.clone();
        dpar.insert(lit("neg fly(tweety)"));
        assert_eq!(c.dpar, dpar);
        assert!(!c.dpar.contains(&lit("fly(freddie)")));
        assert_eq!(c.dpar_star, dpar);
    }

    #[test]
    fn delta_ignores_defeasible_rules() {
        let theory = DefeasibleTheory::new()
            .with_fact(lit("a"))
            .with_rule(rule("r", &["a"], "b", RuleKind::Strict))
            .with_rule(rule("s", &["b"], "c", RuleKind::Defeasible));
        let g = ground_theory(&theory).unwrap();
        assert_eq!(delta_closure(&g), literal_set(&["a", "b"]));
        let no_base = DefeasibleTheory::new().with_rule(rule("r", &["a"], "b", RuleKind::Strict));
        assert!(delta_closure(&ground_theory(&no_base).unwrap()).is_empty());
    }

    #[test]
    fn self_loops_prove_nothing() {
        let theory = DefeasibleTheory::new().with_rule(rule("r", &["p"], "p", RuleKind::Defeasible));
        let c = conclusions(&theory).unwrap();
        assert_eq!(c, ConclusionSet::default());
    }

    #[test]
    fn platypus_separates_team_from_individual_defeat() {
        let c = conclusions(&platypus()).unwrap();
        assert!(c.dpar.contains(&lit("mammal(platypus)")));
        assert!(!c.dpar_star.contains(&lit("mammal(platypus)")));
        assert!(!c.dpar_star.contains(&lit("neg mammal(platypus)")));
        assert!(c.dpar_star.is_subset(&c.dpar));
    }

    #[test]
    fn trivial_theories() {
        assert_eq!(conclusions(&DefeasibleTheory::new()).unwrap(), ConclusionSet::default());
        let c = conclusions(&DefeasibleTheory::new().with_fact(lit("p(a)"))).unwrap();
        let only = literal_set(&["p(a)"]);
        assert_eq!(c.delta, only);
        assert_eq!(c.lambda, only);
        assert_eq!(c.dpar, only);
        assert_eq!(c.dpar_star, only);
    }

    #[test]
    fn strict_conflict_blocks_lambda() {
        // a and neg b are definite; r cannot make b potentially provable
        let theory = DefeasibleTheory::new()
            .with_fact(lit("a"))
            .with_fact(lit("neg b"))
            .with_rule(rule("r", &["a"], "b", RuleKind::Defeasible));
        let c = conclusions(&theory).unwrap();
        assert!(!c.lambda.contains(&lit("b")));
        assert!(c.dpar.contains(&lit("neg b")));
    }

    #[test]
    fn defeaters_only_attack() {
        let theory = DefeasibleTheory::new()
            .with_fact(lit("a"))
            .with_rule(rule("d", &["a"], "b", RuleKind::Defeater))
            .with_rule(rule("r", &["a"], "neg b", RuleKind::Defeasible));
        let c = conclusions(&theory).unwrap();
        assert!(!c.lambda.contains(&lit("b")));
        assert!(!c.dpar.contains(&lit("neg b")));
        let beaten = theory.clone().with_superiority("r", "d");
        let c = conclusions(&beaten).unwrap();
        assert!(c.dpar.contains(&lit("neg b")));
        assert!(c.dpar_star.contains(&lit("neg b")));
    }

    #[test]
    fn attackers_outside_lambda_are_ignored() {
        // s needs x, which is not even potentially provable
        let theory = DefeasibleTheory::new()
            .with_fact(lit("a"))
            .with_rule(rule("r", &["a"], "b", RuleKind::Defeasible))
            .with_rule(rule("s", &["x"], "neg b", RuleKind::Defeasible));
        let c = conclusions(&theory).unwrap();
        assert!(c.dpar.contains(&lit("b")));
        assert!(c.dpar_star.contains(&lit("b")));
    }

    fn closed_under_one_more_pass(theory: &DefeasibleTheory) -> bool {
        let g = ground_theory(theory).unwrap();
        let index = Index::new(g.theory());
        let delta = index.delta();
        let lambda = index.lambda(&delta);
        [Defeat::Team, Defeat::Individual].into_iter().all(|defeat| {
            let fixed = index.defeasible(&delta, &lambda, defeat);
            index.defeasible_pass(&fixed, &delta, &lambda, defeat) == fixed
        })
    }

    /// Naive simultaneous iteration of +Δ and +λ, independent of `chain`.
    fn naive_delta_lambda(theory: &DefeasibleTheory) -> (BTreeSet<Literal>, BTreeSet<Literal>) {
        let mut delta: BTreeSet<Literal> = theory.facts.clone();
        loop {
            let next: BTreeSet<Literal> = theory
                .rules
                .iter()
                .filter(|r| r.is_strict() && r.body.iter().all(|b| delta.contains(b)))
                .map(|r| r.head.clone())
                .collect();
            if next.is_subset(&delta) {
                break;
            }
            delta.extend(next);
        }
        let mut lambda = delta.clone();
        loop {
            let next: BTreeSet<Literal> = theory
                .rules
                .iter()
                .filter(|r| r.is_supportive() && r.body.iter().all(|b| lambda.contains(b)))
                .filter(|r| !delta.contains(&r.head.complement()))
                .map(|r| r.head.clone())
                .collect();
            if next.is_subset(&lambda) {
                break;
            }
            lambda.extend(next);
        }
        (delta, lambda)
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn inclusion_chain(theory in arb_ground_theory(8)) {
                let c = conclusions(&theory).unwrap();
                prop_assert!(c.delta.is_subset(&c.dpar));
                prop_assert!(c.delta.is_subset(&c.lambda));
                prop_assert!(c.dpar.is_subset(&c.lambda));
                prop_assert!(c.delta.is_subset(&c.dpar_star));
                prop_assert!(c.dpar_star.is_subset(&c.dpar));
                prop_assert!(c.is_chain_consistent());
            }

            #[test]
            fn fixpoints_are_stable(theory in arb_ground_theory(6)) {
                prop_assert!(closed_under_one_more_pass(&theory));
            }

            #[test]
            fn counting_matches_naive_iteration(theory in arb_ground_theory(6)) {
                let c = conclusions(&theory).unwrap();
                let (delta, lambda) = naive_delta_lambda(&theory);
                prop_assert_eq!(c.delta, delta);
                prop_assert_eq!(c.lambda, lambda);
            }

            #[test]
            fn rule_order_does_not_matter(theory in arb_ground_theory(6), seed in any::<u64>()) {
                let mut shuffled = theory.clone();
                let n = shuffled.rules.len();
                if n > 1 {
                    // deterministic permutation from the seed
                    let mut rules: Vec<Rule> = Vec::new();
                    let mut pool = shuffled.rules.clone();
                    let mut s = seed;
                    while !pool.is_empty() {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        let i = (s >> 33) as usize % pool.len();
                        rules.push(pool.remove(i));
                    }
                    shuffled.rules = rules;
                }
                prop_assert_eq!(conclusions(&theory).unwrap(), conclusions(&shuffled).unwrap());
            }

            #[test]
            fn consistency_of_dpar(theory in arb_ground_theory(8)) {
                let c = conclusions(&theory).unwrap();
                for q in &c.dpar {
                    let nq = q.complement();
                    if c.dpar.contains(&nq) {
                        prop_assert!(c.delta.contains(q) && c.delta.contains(&nq), "{} and its complement", q);
                    }
                }
            }
        }
    }
}
