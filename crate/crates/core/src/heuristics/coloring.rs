use rand::seq::SliceRandom;

use crate::instance::Graph;
use crate::rng::Rng;

/// DSATUR: color the vertex with the most distinct neighbor colors next,
/// breaking ties by degree, then by smallest index. First-fit color choice.
pub fn dsatur(g: &Graph) -> Vec<usize> {
    let n = g.n;
    let adj = g.adjacency();
    let deg = g.degrees();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    // seen[v][c]: some neighbor of v has color c
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut saturation = vec![0usize; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v].is_none())
            .max_by_key(|&v| (saturation[v], deg[v], std::cmp::Reverse(v)))
            .expect("uncolored vertex remains");
        let c = (0..).find(|&c| !seen[v].get(c).copied().unwrap_or(false)).unwrap();
        colors[v] = Some(c);
        for &w in &adj[v] {
            if seen[w].len() <= c {
                seen[w].resize(c + 1, false);
            }
            if !seen[w][c] {
                seen[w][c] = true;
                saturation[w] += 1;
            }
        }
    }
    colors.into_iter().map(|c| c.unwrap()).collect()
}

/// First-fit coloring along `order`.
pub fn greedy_in_order(g: &Graph, order: &[usize]) -> Vec<usize> {
    let adj = g.adjacency();
    let mut colors: Vec<Option<usize>> = vec![None; g.n];
    let mut taken = Vec::new();
    for &v in order {
        taken.clear();
        taken.extend(adj[v].iter().filter_map(|&w| colors[w]));
        taken.sort_unstable();
        taken.dedup();
        let c = taken
            .iter()
            .enumerate()
            .find(|&(i, &c)| i != c)
            .map_or(taken.len(), |(i, _)| i);
        colors[v] = Some(c);
    }
    colors.into_iter().map(|c| c.unwrap_or(0)).collect()
}

pub fn largest_degree_order(g: &Graph) -> Vec<usize> {
    let deg = g.degrees();
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
    order
}

pub fn random_order(g: &Graph, rng: &mut Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n).collect();
    order.shuffle(rng);
    order
}

/// Smallest-last (degeneracy) order: repeatedly strip a minimum-degree vertex,
/// then color in reverse stripping order.
pub fn smallest_last_order(g: &Graph) -> Vec<usize> {
    let adj = g.adjacency();
    let mut deg = g.degrees();
    let mut removed = vec![false; g.n];
    let mut stripped = Vec::with_capacity(g.n);
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
    for v in (0..g.n).rev() {
        buckets[deg[v]].push(v);
    }
    let mut low = 0;
    while stripped.len() < g.n {
        low = low.min(max_deg);
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop().unwrap();
        // stale bucket entries are skipped
        if removed[v] || deg[v] != low {
            continue;
        }
        removed[v] = true;
        stripped.push(v);
        for &w in &adj[v] {
            if !removed[w] {
                deg[w] -= 1;
                buckets[deg[w]].push(w);
                low = low.min(deg[w]);
            }
        }
    }
    stripped.reverse();
    stripped
}

pub fn num_colors(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proper(g: &Graph, c: &[usize]) -> bool {
        g.edges.iter().all(|&(u, v)| c[u] != c[v])
    }

    #[test]
    fn dsatur_two_colors_even_cycle() {
        let c8 = Graph::new(8, (0..8).map(|i| (i, (i + 1) % 8))).unwrap();
        let c = dsatur(&c8);
        assert!(proper(&c8, &c));
        assert_eq!(num_colors(&c), 2);
    }

    #[test]
    fn orders_are_permutations_and_colorings_proper() {
        let g = Graph::new(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 3)]).unwrap();
        let mut r = crate::rng::from_seed(3);
        for order in [largest_degree_order(&g), smallest_last_order(&g), random_order(&g, &mut r)] {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..7).collect::<Vec<_>>());
            assert!(proper(&g, &greedy_in_order(&g, &order)));
        }
    }

    #[test]
    fn smallest_last_is_optimal_on_trees() {
        let tree = Graph::new(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)]).unwrap();
        let c = greedy_in_order(&tree, &smallest_last_order(&tree));
        assert_eq!(num_colors(&c), 2);
    }
}
