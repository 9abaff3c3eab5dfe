//! Datalog¬ programs and their predicate-level dependency analyses.
//!
//! The dependency graph has an edge `p -> q` labelled +1 when `q` occurs
//! positively in the body of a clause for `p`, and −1 when it occurs under
//! `not`. Stratification, call-consistency and signings are all read off
//! that graph.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph;
pub use crate::theory::{Atom, Term};

/// `head :- positive..., not negative...`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DClause {
    pub head: Atom,
    pub positive: Vec<Atom>,
    pub negative: Vec<Atom>,
}

impl DClause {
    pub fn new(head: Atom, positive: Vec<Atom>, negative: Vec<Atom>) -> Self {
        DClause {
            head,
            positive,
            negative,
        }
    }

    pub fn fact(head: Atom) -> Self {
        DClause::new(head, Vec::new(), Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        core::iter::once(&self.head)
            .chain(&self.positive)
            .chain(&self.negative)
    }

    fn positive_variables(&self) -> BTreeSet<&str> {
        self.positive.iter().flat_map(Atom::variables).collect()
    }

    pub fn is_range_restricted(&self) -> bool {
        let bound = self.positive_variables();
        self.head.variables().all(|v| bound.contains(v))
    }

    pub fn is_negation_safe(&self) -> bool {
        let bound = self.positive_variables();
        self.negative
            .iter()
            .flat_map(Atom::variables)
            .all(|v| bound.contains(v))
    }

    pub fn is_safe(&self) -> bool {
        self.is_range_restricted() && self.is_negation_safe()
    }

    /// Symbols in the clause plus one for its arrow or unit marker.
    pub fn size(&self) -> usize {
        self.atoms().map(|a| 1 + a.arity()).sum::<usize>() + 1
    }
}

impl fmt::Display for DClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.is_unit() {
            f.write_str(" :- ")?;
            let mut first = true;
            for a in &self.positive {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "{a}")?;
            }
            for a in &self.negative {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "not {a}")?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("predicate `{predicate}` is used with arity {first} and {second}")]
    ArityConflict {
        predicate: String,
        first: usize,
        second: usize,
    },
}

/// A list of clauses whose predicates each have one arity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatalogProgram {
    clauses: Vec<DClause>,
    arities: BTreeMap<String, usize>,
}

impl DatalogProgram {
    pub fn new(clauses: Vec<DClause>) -> Result<Self, ProgramError> {
        let mut arities: BTreeMap<String, usize> = BTreeMap::new();
        for atom in clauses.iter().flat_map(DClause::atoms) {
            match arities.get(&atom.predicate) {
                Some(&a) if a != atom.arity() => {
                    return Err(ProgramError::ArityConflict {
                        predicate: atom.predicate.clone(),
                        first: a,
                        second: atom.arity(),
                    })
                }
                Some(_) => {}
                None => {
                    arities.insert(atom.predicate.clone(), atom.arity());
                }
            }
        }
        Ok(DatalogProgram { clauses, arities })
    }

    pub fn clauses(&self) -> &[DClause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Predicate table with arities.
    pub fn arities(&self) -> &BTreeMap<String, usize> {
        &self.arities
    }

    pub fn predicates(&self) -> impl Iterator<Item = &str> {
        self.arities.keys().map(String::as_str)
    }

    /// Clauses whose head predicate satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> DatalogProgram {
        let clauses = self
            .clauses
            .iter()
            .filter(|c| keep(&c.head.predicate))
            .cloned()
            .collect();
        DatalogProgram::new(clauses).expect("a subset of a consistent program is consistent")
    }

    pub fn clause_set(&self) -> BTreeSet<&DClause> {
        self.clauses.iter().collect()
    }

    pub fn size(&self) -> usize {
        self.clauses.iter().map(DClause::size).sum()
    }
}

impl fmt::Display for DatalogProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// dependency graph

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    nodes: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: BTreeSet<(usize, usize, Sign)>,
    /// successors with their signs, per node
    out: Vec<Vec<(usize, Sign)>>,
}

impl DependencyGraph {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, predicate: &str) -> Option<usize> {
        self.index.get(predicate).copied()
    }

    /// `(head predicate, body predicate, sign)` triples.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, Sign)> + '_ {
        self.edges
            .iter()
            .map(|&(a, b, s)| (self.nodes[a].as_str(), self.nodes[b].as_str(), s))
    }

    pub fn has_edge(&self, from: &str, to: &str, sign: Sign) -> bool {
        match (self.node_index(from), self.node_index(to)) {
            (Some(a), Some(b)) => self.edges.contains(&(a, b, sign)),
            _ => false,
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        self.out
            .iter()
            .map(|succ| succ.iter().map(|&(n, _)| n).collect())
            .collect()
    }

    /// Nodes reachable from `start` (walks of length ≥ 1), split by the
    /// parity of negative edges along the walk: index 0 even, 1 odd.
    fn parity_reach(&self, start: usize) -> [Vec<bool>; 2] {
        let n = self.nodes.len();
        let mut seen = [vec![false; n], vec![false; n]];
        let mut queue = VecDeque::new();
        for &(next, sign) in &self.out[start] {
            let parity = usize::from(sign == Sign::Negative);
            if !seen[parity][next] {
                seen[parity][next] = true;
                queue.push_back((next, parity));
            }
        }
        while let Some((node, parity)) = queue.pop_front() {
            for &(next, sign) in &self.out[node] {
                let p = parity ^ usize::from(sign == Sign::Negative);
                if !seen[p][next] {
                    seen[p][next] = true;
                    queue.push_back((next, p));
                }
            }
        }
        seen
    }

    /// `from ≥_{+1} to` / `from ≥_{-1} to`, with `p ≥_{+1} p` for every p.
    pub fn depends_with(&self, from: &str, to: &str, sign: Sign) -> bool {
        let (Some(a), Some(b)) = (self.node_index(from), self.node_index(to)) else {
            return false;
        };
        if a == b && sign == Sign::Positive {
            return true;
        }
        let reach = self.parity_reach(a);
        reach[usize::from(sign == Sign::Negative)][b]
    }
}

/// One signed edge per (head predicate, body predicate, sign) in the program.
pub fn dependency_graph(program: &DatalogProgram) -> DependencyGraph {
    let nodes: Vec<String> = program.arities().keys().cloned().collect();
    let index: BTreeMap<String, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();
    let mut edges = BTreeSet::new();
    for clause in program.clauses() {
        let head = index[&clause.head.predicate];
        for a in &clause.positive {
            edges.insert((head, index[&a.predicate], Sign::Positive));
        }
        for a in &clause.negative {
            edges.insert((head, index[&a.predicate], Sign::Negative));
        }
    }
    let mut out = vec![Vec::new(); nodes.len()];
    for &(a, b, s) in &edges {
        out[a].push((b, s));
    }
    DependencyGraph {
        nodes,
        index,
        edges,
        out,
    }
}

/// A stratum per predicate with m(head) ≥ m(positive body) and
/// m(head) > m(negative body), or `None` when some strongly connected
/// component contains a negative edge.
pub fn stratify(program: &DatalogProgram) -> Option<BTreeMap<String, usize>> {
    stratify_graph(&dependency_graph(program))
}

pub fn stratify_graph(graph: &DependencyGraph) -> Option<BTreeMap<String, usize>> {
    let components = graph::tarjan(&graph.adjacency());
    let of = &components.of_node;
    if graph
        .edges
        .iter()
        .any(|&(a, b, s)| s == Sign::Negative && of[a] == of[b])
    {
        return None;
    }
    // components are in reverse topological order: callees first
    let mut level = vec![0usize; components.members.len()];
    for (c, members) in components.members.iter().enumerate() {
        let mut l = 0;
        for &node in members {
            for &(next, sign) in &graph.out[node] {
                if of[next] != c {
                    l = l.max(level[of[next]] + usize::from(sign == Sign::Negative));
                }
            }
        }
        level[c] = l;
    }
    Some(
        graph
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), level[of[i]]))
            .collect(),
    )
}

/// The other characterisation: no p ≈ q with p ≥_{−1} q.
pub fn is_stratified_by_parity(program: &DatalogProgram) -> bool {
    let graph = dependency_graph(program);
    let n = graph.nodes.len();
    let reach: Vec<[Vec<bool>; 2]> = (0..n).map(|p| graph.parity_reach(p)).collect();
    let depends = |p: usize, q: usize| p == q || reach[p][0][q] || reach[p][1][q];
    (0..n).all(|p| (0..n).all(|q| !(reach[p][1][q] && depends(q, p))))
}

/// True iff no predicate depends on itself through an odd number of negations.
pub fn is_call_consistent(program: &DatalogProgram) -> bool {
    let graph = dependency_graph(program);
    (0..graph.nodes.len()).all(|p| !graph.parity_reach(p)[1][p])
}

/// A ±1 assignment over `scope`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signing {
    pub mapping: BTreeMap<String, Sign>,
}

impl Signing {
    pub fn sign(&self, predicate: &str) -> Option<Sign> {
        self.mapping.get(predicate).copied()
    }

    pub fn inverted(&self) -> Signing {
        Signing {
            mapping: self
                .mapping
                .iter()
                .map(|(p, s)| (p.clone(), s.times(Sign::Negative)))
                .collect(),
        }
    }

    /// Checks `p ≤_i q ⇒ s(p) = s(q)·i` for every p, q in the scope.
    pub fn is_valid_for(&self, program: &DatalogProgram) -> bool {
        let graph = dependency_graph(program);
        for (q, &sq) in &self.mapping {
            let Some(qi) = graph.node_index(q) else {
                continue;
            };
            let reach = graph.parity_reach(qi);
            for (p, &sp) in &self.mapping {
                let Some(pi) = graph.node_index(p) else {
                    continue;
                };
                if (reach[0][pi] || pi == qi) && sp != sq {
                    return false;
                }
                if reach[1][pi] && sp != sq.times(Sign::Negative) {
                    return false;
                }
            }
        }
        true
    }
}

/// A signing for `scope`, or `None` on a parity conflict.
///
/// Constraints come from dependencies through the whole program, not only
/// through `scope`. Each connected group of constrained predicates is
/// normalised so that its lexicographically least member gets +1.
pub fn compute_signing(program: &DatalogProgram, scope: &BTreeSet<String>) -> Option<Signing> {
    let graph = dependency_graph(program);
    let members: Vec<&String> = scope.iter().collect();
    let position: BTreeMap<usize, usize> = members
        .iter()
        .enumerate()
        .filter_map(|(i, p)| graph.node_index(p).map(|n| (n, i)))
        .collect();

    // constraint edges between scope members: (other, parity)
    let mut constraints: Vec<Vec<(usize, usize)>> = vec![Vec::new(); members.len()];
    for (&node, &i) in &position {
        let reach = graph.parity_reach(node);
        for (parity, reached) in reach.iter().enumerate() {
            for (&other, &j) in &position {
                if reached[other] {
                    if i == j && parity == 1 {
                        return None;
                    }
                    constraints[i].push((j, parity));
                    constraints[j].push((i, parity));
                }
            }
        }
    }

    // parity two-colouring; members are visited in lexicographic order so the
    // first member of each group is its least one
    let mut colour: Vec<Option<usize>> = vec![None; members.len()];
    for start in 0..members.len() {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let ci = colour[i].expect("coloured before queued");
            for &(j, parity) in &constraints[i] {
                let want = ci ^ parity;
                match colour[j] {
                    None => {
                        colour[j] = Some(want);
                        queue.push_back(j);
                    }
                    Some(c) if c != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(Signing {
        mapping: members
            .into_iter()
            .zip(colour)
            .map(|(p, c)| {
                let sign = if c == Some(0) { Sign::Positive } else { Sign::Negative };
                (p.clone(), sign)
            })
            .collect(),
    })
}

pub fn is_range_restricted(program: &DatalogProgram) -> bool {
    program.clauses().iter().all(DClause::is_range_restricted)
}

pub fn is_negation_safe(program: &DatalogProgram) -> bool {
    program.clauses().iter().all(DClause::is_negation_safe)
}

pub fn is_safe(program: &DatalogProgram) -> bool {
    program.clauses().iter().all(DClause::is_safe)
}

/// Whether `set` is closed under dependency: q ≤ p and p ∈ set imply q ∈ set.
pub fn is_downward_closed(program: &DatalogProgram, set: &BTreeSet<String>) -> bool {
    let graph = dependency_graph(program);
    let closed = graph
        .edges()
        .all(|(from, to, _)| !set.contains(from) || set.contains(to));
    closed
}
