//! Small graph utilities over index-based adjacency lists.

use std::collections::VecDeque;

/// Strongly connected components of a directed graph.
#[derive(Clone, Debug)]
pub struct Components {
    /// Component index for every node.
    pub comp: Vec<usize>,
    /// Number of components.
    pub count: usize,
}

impl Components {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (node, &c) in self.comp.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// Iterative Tarjan. `adj[v]` lists successor nodes of `v`.
pub fn tarjan(adj: &[Vec<usize>]) -> Components {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut count = 0;
    let mut next = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = count;
                        if w == v {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    Components { comp, count }
}

/// Labeled adjacency: `out[v]` holds `(edge, target)` pairs.
pub type EdgeAdjacency = [Vec<(usize, usize)>];

/// Breadth-first search for the shortest edge sequence from `from` to a node
/// satisfying `goal`, only entering nodes accepted by `allowed`.
/// Returns an empty path when `from` itself is a goal.
pub fn shortest_path(
    out: &EdgeAdjacency,
    from: usize,
    allowed: impl Fn(usize) -> bool,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    if goal(from) {
        return Some(Vec::new());
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; out.len()];
    let mut seen = vec![false; out.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &(edge, w) in &out[v] {
            if seen[w] || !allowed(w) {
                continue;
            }
            seen[w] = true;
            prev[w] = Some((v, edge));
            if goal(w) {
                let mut path = Vec::new();
                let mut cur = w;
                while let Some((p, e)) = prev[cur] {
                    path.push(e);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(w);
        }
    }
    None
}

/// A cycle through `node` that uses `edge` (given as `(source, edge, target)`),
/// staying inside the nodes accepted by `allowed`.
pub fn cycle_through_edge(
    out: &EdgeAdjacency,
    node: usize,
    edge: (usize, usize, usize),
    allowed: impl Fn(usize) -> bool + Copy,
) -> Option<Vec<usize>> {
    let (src, e, dst) = edge;
    let to_src = shortest_path(out, node, allowed, |v| v == src)?;
    let back = shortest_path(out, dst, allowed, |v| v == node)?;
    let mut cycle = to_src;
    cycle.push(e);
    cycle.extend(back);
    Some(cycle)
}

/// Nodes from which some node in `targets` is reachable (reflexively).
pub fn coreachable(out: &EdgeAdjacency, targets: &[bool]) -> Vec<bool> {
    let n = out.len();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, edges) in out.iter().enumerate() {
        for &(_, w) in edges {
            rev[w].push(v);
        }
    }
    let mut mark = targets.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| mark[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &u in &rev[v] {
            if !mark[u] {
                mark[u] = true;
                queue.push_back(u);
            }
        }
    }
    mark
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tarjan_splits_chain_and_cycle() {
        let adj = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let c = tarjan(&adj);
        assert_eq!(c.count, 3);
        assert_eq!(c.comp[1], c.comp[2]);
        assert_ne!(c.comp[0], c.comp[1]);
        assert_ne!(c.comp[3], c.comp[1]);
    }

    #[test]
    fn shortest_path_prefers_fewer_edges() {
        let out = vec![vec![(0, 1), (1, 2)], vec![(2, 2)], vec![]];
        assert_eq!(shortest_path(&out, 0, |_| true, |v| v == 2), Some(vec![1]));
        assert_eq!(shortest_path(&out, 2, |_| true, |v| v == 0), None);
    }

    #[test]
    fn coreachable_walks_backwards() {
        let out = vec![vec![(0, 1)], vec![], vec![(1, 1)], vec![]];
        let m = coreachable(&out, &[false, true, false, false]);
        assert_eq!(m, vec![true, true, true, false]);
    }
}
