use std::collections::BinaryHeap;

use crate::instance::Graph;

/// Static highest-degree-first scan: a vertex joins if its closed
/// neighborhood still contains an undominated vertex.
pub fn high_degree_greedy(g: &Graph) -> Vec<usize> {
    let adj = g.adjacency();
    let deg = g.degrees();
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
    let mut dominated = vec![false; g.n];
    let mut left = g.n;
    let mut set = Vec::new();
    for v in order {
        if left == 0 {
            break;
        }
        if !dominated[v] || adj[v].iter().any(|&w| !dominated[w]) {
            set.push(v);
            for u in std::iter::once(v).chain(adj[v].iter().copied()) {
                if !std::mem::replace(&mut dominated[u], true) {
                    left -= 1;
                }
            }
        }
    }
    set.sort_unstable();
    set
}

/// Classical set-cover greedy: take the vertex dominating the most new
/// vertices (ties by smallest index). Gains only shrink, so stale heap
/// entries are re-evaluated lazily. Returns vertices in pick order.
pub fn marginal_gain_greedy(g: &Graph) -> Vec<usize> {
    let adj = g.adjacency();
    let mut dominated = vec![false; g.n];
    let mut left = g.n;
    let mut heap: BinaryHeap<(usize, std::cmp::Reverse<usize>)> =
        (0..g.n).map(|v| (adj[v].len() + 1, std::cmp::Reverse(v))).collect();
    let mut picks = Vec::new();
    while left > 0 {
        let (claimed, std::cmp::Reverse(v)) = heap.pop().expect("undominated vertex remains");
        let gain = std::iter::once(v)
            .chain(adj[v].iter().copied())
            .filter(|&u| !dominated[u])
            .count();
        if gain < claimed {
            heap.push((gain, std::cmp::Reverse(v)));
            continue;
        }
        picks.push(v);
        for u in std::iter::once(v).chain(adj[v].iter().copied()) {
            if !std::mem::replace(&mut dominated[u], true) {
                left -= 1;
            }
        }
    }
    picks
}

/// Marginal-gain greedy, then drop vertices whose whole closed neighborhood
/// stays dominated without them, latest pick first. Returns the set and the
/// number of removals.
pub fn redundancy_aware_greedy(g: &Graph) -> (Vec<usize>, u64) {
    let adj = g.adjacency();
    let picks = marginal_gain_greedy(g);
    let mut count = vec![0u32; g.n];
    let mut inside = vec![false; g.n];
    for &v in &picks {
        inside[v] = true;
        count[v] += 1;
        for &w in &adj[v] {
            count[w] += 1;
        }
    }
    let mut removed = 0;
    for &v in picks.iter().rev() {
        let redundant = count[v] >= 2 && adj[v].iter().all(|&w| count[w] >= 2);
        if redundant {
            inside[v] = false;
            count[v] -= 1;
            for &w in &adj[v] {
                count[w] -= 1;
            }
            removed += 1;
        }
    }
    ((0..g.n).filter(|&v| inside[v]).collect(), removed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dominates(g: &Graph, s: &[usize]) -> bool {
        let adj = g.adjacency();
        (0..g.n).all(|v| s.contains(&v) || adj[v].iter().any(|w| s.contains(w)))
    }

    #[test]
    fn star_center_found() {
        let star = Graph::new(6, (1..6).map(|i| (0, i))).unwrap();
        assert_eq!(high_degree_greedy(&star), vec![0]);
        assert_eq!(marginal_gain_greedy(&star), vec![0]);
        assert_eq!(redundancy_aware_greedy(&star).0, vec![0]);
    }

    #[test]
    fn isolated_vertices_join() {
        let g = Graph::new(4, [(0, 1)]).unwrap();
        for s in [
            high_degree_greedy(&g),
            marginal_gain_greedy(&g),
            redundancy_aware_greedy(&g).0,
        ] {
            assert!(dominates(&g, &s));
            assert_eq!(s.len(), 3);
        }
    }

    #[test]
    fn redundancy_pass_removes() {
        // Two hubs 0 and 5 over a path; greedy may pick extra vertices.
        let g = Graph::new(
            8,
            [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (5, 7), (1, 2)],
        )
        .unwrap();
        let (s, _) = redundancy_aware_greedy(&g);
        assert!(dominates(&g, &s));
        assert!(s.len() <= marginal_gain_greedy(&g).len());
    }
}
