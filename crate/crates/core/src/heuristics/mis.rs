use rand::seq::SliceRandom;

use crate::instance::Graph;
use crate::rng::Rng;

/// Dynamic greedy: repeatedly take the remaining vertex minimizing `key`,
/// then delete it and its neighbors.
fn dynamic_greedy(g: &Graph, key: impl Fn(usize, &[usize], &[Vec<usize>], &[bool]) -> f64) -> Vec<usize> {
    let adj = g.adjacency();
    let mut deg = g.degrees();
    let mut alive = vec![true; g.n];
    let mut set = Vec::new();
    loop {
        let pick = (0..g.n)
            .filter(|&v| alive[v])
            .min_by(|&a, &b| {
                key(a, &deg, &adj, &alive)
                    .total_cmp(&key(b, &deg, &adj, &alive))
                    .then(a.cmp(&b))
            });
        let Some(v) = pick else { break };
        set.push(v);
        let mut gone = vec![v];
        gone.extend(adj[v].iter().copied().filter(|&w| alive[w]));
        for &u in &gone {
            alive[u] = false;
        }
        for &u in &gone {
            for &w in &adj[u] {
                if alive[w] {
                    deg[w] -= 1;
                }
            }
        }
    }
    set.sort_unstable();
    set
}

pub fn min_degree_greedy(g: &Graph) -> Vec<usize> {
    dynamic_greedy(g, |v, deg, _, _| deg[v] as f64)
}

/// Prefers low-degree vertices whose remaining neighbors have high degree:
/// key = deg(v) / (1 + mean remaining neighbor degree).
pub fn ratio_greedy(g: &Graph) -> Vec<usize> {
    dynamic_greedy(g, |v, deg, adj, alive| {
        let (sum, cnt) = adj[v]
            .iter()
            .filter(|&&w| alive[w])
            .fold((0usize, 0usize), |(s, c), &w| (s + deg[w], c + 1));
        if cnt == 0 {
            return 0.0;
        }
        deg[v] as f64 / (1.0 + sum as f64 / cnt as f64)
    })
}

/// Scans a random order and keeps each vertex with no chosen neighbor.
pub fn random_greedy(g: &Graph, rng: &mut Rng) -> Vec<usize> {
    let adj = g.adjacency();
    let mut order: Vec<usize> = (0..g.n).collect();
    order.shuffle(rng);
    let mut blocked = vec![false; g.n];
    let mut set = Vec::new();
    for v in order {
        if !blocked[v] {
            set.push(v);
            blocked[v] = true;
            for &w in &adj[v] {
                blocked[w] = true;
            }
        }
    }
    set.sort_unstable();
    set
}

/// Min-degree greedy followed by (1,2)-swaps: drop one chosen vertex and add
/// two non-adjacent vertices whose only chosen neighbor it was. Returns the
/// set and the number of swaps applied.
pub fn local_improvement(g: &Graph) -> (Vec<usize>, u64) {
    let adj = g.adjacency();
    let n = g.n;
    let mut inside = vec![false; n];
    for v in min_degree_greedy(g) {
        inside[v] = true;
    }
    // tight[v] = number of chosen neighbors of v
    let mut tight = vec![0usize; n];
    for v in 0..n {
        tight[v] = adj[v].iter().filter(|&&w| inside[w]).count();
    }
    let mut swaps = 0u64;
    let mut improved = true;
    while improved {
        improved = false;
        for x in 0..n {
            if !inside[x] {
                continue;
            }
            let cands: Vec<usize> = adj[x].iter().copied().filter(|&w| tight[w] == 1).collect();
            let pair = cands.iter().enumerate().find_map(|(i, &a)| {
                cands[i + 1..]
                    .iter()
                    .find(|&&b| adj[a].binary_search(&b).is_err())
                    .map(|&b| (a, b))
            });
            let Some((a, b)) = pair else { continue };
            inside[x] = false;
            for &w in &adj[x] {
                tight[w] -= 1;
            }
            for v in [a, b] {
                inside[v] = true;
                for &w in &adj[v] {
                    tight[w] += 1;
                }
            }
            // Restore maximality greedily.
            for v in 0..n {
                if !inside[v] && tight[v] == 0 {
                    inside[v] = true;
                    for &w in &adj[v] {
                        tight[w] += 1;
                    }
                }
            }
            swaps += 1;
            improved = true;
        }
    }
    ((0..n).filter(|&v| inside[v]).collect(), swaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn independent(g: &Graph, s: &[usize]) -> bool {
        g.edges.iter().all(|&(u, v)| !(s.contains(&u) && s.contains(&v)))
    }

    #[test]
    fn star_prefers_leaves() {
        let star = Graph::new(6, (1..6).map(|i| (0, i))).unwrap();
        assert_eq!(min_degree_greedy(&star), vec![1, 2, 3, 4, 5]);
        assert_eq!(ratio_greedy(&star).len(), 5);
    }

    #[test]
    fn local_improvement_stays_independent() {
        let p = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let (s, _) = local_improvement(&p);
        assert_eq!(s, vec![0, 2]);
        let mut r = crate::rng::from_seed(5);
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        assert!(independent(&g, &random_greedy(&g, &mut r)));
        assert!(independent(&g, &local_improvement(&g).0));
    }
}
