//! Small directed-graph helpers shared by the theory and program analyses.

use alloc::vec;
use alloc::vec::Vec;

/// Strongly connected components of a graph given as adjacency lists.
///
/// Components come out in reverse topological order: every edge leaving a
/// component points at a component with a smaller index.
pub(crate) struct Components {
    pub of_node: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

pub(crate) fn tarjan(adjacency: &[Vec<usize>]) -> Components {
    const UNVISITED: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut of_node = vec![UNVISITED; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;

    // explicit call stack of (node, next edge position)
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root] = counter;
        lowlink[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(node, pos)) = frames.last() {
            if pos < adjacency[node].len() {
                let next = adjacency[node][pos];
                if let Some(top) = frames.last_mut() {
                    top.1 += 1;
                }
                if index[next] == UNVISITED {
                    index[next] = counter;
                    lowlink[next] = counter;
                    counter += 1;
                    stack.push(next);
                    on_stack[next] = true;
                    frames.push((next, 0));
                } else if on_stack[next] {
                    lowlink[node] = lowlink[node].min(index[next]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[node]);
            }
            if lowlink[node] == index[node] {
                let id = members.len();
                let mut component = Vec::new();
                loop {
                    let member = stack.pop().expect("tarjan stack underflow");
                    on_stack[member] = false;
                    of_node[member] = id;
                    component.push(member);
                    if member == node {
                        break;
                    }
                }
                component.sort_unstable();
                members.push(component);
            }
        }
    }
    Components { of_node, members }
}

/// True iff the graph has a cycle, self-loops included.
pub(crate) fn has_cycle(adjacency: &[Vec<usize>]) -> bool {
    let components = tarjan(adjacency);
    adjacency.iter().enumerate().any(|(from, succ)| {
        succ.iter()
            .any(|&to| components.of_node[from] == components.of_node[to])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_are_reverse_topological() {
        // 0 -> 1 -> 2 -> 1, 2 -> 3
        let adjacency = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let c = tarjan(&adjacency);
        assert_eq!(c.of_node[1], c.of_node[2]);
        assert!(c.of_node[3] < c.of_node[1]);
        assert!(c.of_node[1] < c.of_node[0]);
        assert_eq!(c.members.len(), 3);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        assert!(has_cycle(&[vec![0]]));
        assert!(!has_cycle(&[vec![1], vec![]]));
        assert!(!has_cycle(&[]));
    }
}
