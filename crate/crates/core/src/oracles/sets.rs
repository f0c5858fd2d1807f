use super::{Meter, OracleBudget};
use crate::error::{Error, Result};
use crate::instance::Graph;

/// Largest n handled by plain enumeration.
const ENUMERATION_LIMIT: usize = 24;

fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

fn rows_or_err(g: &Graph) -> Result<Vec<u128>> {
    g.bit_rows().ok_or_else(|| {
        Error::InvalidParameter(format!("exact set oracles support n <= 128, got {}", g.n))
    })
}

/// Maximum independent set.
///
/// Up to 24 vertices every independent set is enumerated; beyond that a
/// branch and bound over the complement (maximum clique with a greedy coloring
/// bound) is used.
pub fn exact_mis(g: &Graph, budget: OracleBudget) -> Result<(usize, Vec<usize>)> {
    let rows = rows_or_err(g)?;
    let mut meter = Meter::new(budget);
    let all: u128 = if g.n == 128 { u128::MAX } else { (1u128 << g.n) - 1 };
    let best = if g.n <= ENUMERATION_LIMIT {
        let mut best = 0u128;
        enumerate_independent(&rows, all, 0, &mut best, &mut meter)?;
        best
    } else {
        // Complement adjacency: u ~ v iff not adjacent in g.
        let comp: Vec<u128> = (0..g.n).map(|v| all & !rows[v] & !(1u128 << v)).collect();
        let mut best = 0u128;
        max_clique(&comp, 0, all, &mut best, &mut meter)?;
        best
    };
    let set: Vec<usize> = bits(best).collect();
    Ok((set.len(), set))
}

fn enumerate_independent(
    rows: &[u128],
    cand: u128,
    current: u128,
    best: &mut u128,
    meter: &mut Meter,
) -> Result<()> {
    meter.tick()?;
    if cand == 0 {
        if current.count_ones() > best.count_ones() {
            *best = current;
        }
        return Ok(());
    }
    let v = cand.trailing_zeros() as usize;
    let bit = 1u128 << v;
    enumerate_independent(rows, cand & !bit & !rows[v], current | bit, best, meter)?;
    enumerate_independent(rows, cand & !bit, current, best, meter)
}

/// Greedy sequential coloring of `cand` in the clique graph `adj`; returns
/// vertices in color order with their color bound.
fn color_sort(adj: &[u128], cand: u128) -> Vec<(usize, u32)> {
    let mut order = Vec::with_capacity(cand.count_ones() as usize);
    let mut uncolored = cand;
    let mut color = 0;
    while uncolored != 0 {
        color += 1;
        let mut avail = uncolored;
        while avail != 0 {
            let v = avail.trailing_zeros() as usize;
            avail &= !(1u128 << v) & !adj[v];
            uncolored &= !(1u128 << v);
            order.push((v, color));
        }
    }
    order
}

fn max_clique(
    adj: &[u128],
    current: u128,
    cand: u128,
    best: &mut u128,
    meter: &mut Meter,
) -> Result<()> {
    meter.tick()?;
    if cand == 0 {
        if current.count_ones() > best.count_ones() {
            *best = current;
        }
        return Ok(());
    }
    let order = color_sort(adj, cand);
    let mut cand = cand;
    for &(v, color) in order.iter().rev() {
        if current.count_ones() + color <= best.count_ones() {
            return Ok(());
        }
        let bit = 1u128 << v;
        max_clique(adj, current | bit, cand & adj[v], best, meter)?;
        cand &= !bit;
    }
    Ok(())
}

/// Minimum dominating set.
///
/// Up to 24 vertices, subsets are enumerated in order of increasing size;
/// beyond that a branch and bound picks the undominated vertex with the fewest
/// possible dominators and branches over them.
pub fn exact_mds(g: &Graph, budget: OracleBudget) -> Result<(usize, Vec<usize>)> {
    let rows = rows_or_err(g)?;
    let closed: Vec<u128> = (0..g.n).map(|v| rows[v] | (1u128 << v)).collect();
    let all: u128 = if g.n == 128 { u128::MAX } else { (1u128 << g.n) - 1 };
    let mut meter = Meter::new(budget);
    if g.n == 0 {
        return Ok((0, Vec::new()));
    }
    let best = if g.n <= ENUMERATION_LIMIT {
        let mut found = None;
        for k in 1..=g.n {
            if let Some(s) = dominating_of_size(&closed, all, k, 0, 0, 0, &mut meter)? {
                found = Some(s);
                break;
            }
        }
        found.expect("the full vertex set dominates")
    } else {
        let mut best = all;
        mds_branch(&closed, all, 0, 0, &mut best, &mut meter)?;
        best
    };
    let set: Vec<usize> = bits(best).collect();
    Ok((set.len(), set))
}

fn dominating_of_size(
    closed: &[u128],
    all: u128,
    k: usize,
    start: usize,
    chosen: u128,
    covered: u128,
    meter: &mut Meter,
) -> Result<Option<u128>> {
    meter.tick()?;
    if covered == all {
        return Ok(Some(chosen));
    }
    if k == 0 {
        return Ok(None);
    }
    for v in start..closed.len() {
        if closed.len() - v < k {
            break;
        }
        if let Some(s) =
            dominating_of_size(closed, all, k - 1, v + 1, chosen | (1 << v), covered | closed[v], meter)?
        {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

fn mds_branch(
    closed: &[u128],
    all: u128,
    chosen: u128,
    covered: u128,
    best: &mut u128,
    meter: &mut Meter,
) -> Result<()> {
    meter.tick()?;
    let undominated = all & !covered;
    if undominated == 0 {
        if chosen.count_ones() < best.count_ones() {
            *best = chosen;
        }
        return Ok(());
    }
    let max_gain = (0..closed.len())
        .map(|v| (closed[v] & undominated).count_ones())
        .max()
        .unwrap_or(0)
        .max(1);
    let need = undominated.count_ones().div_ceil(max_gain);
    if chosen.count_ones() + need >= best.count_ones() {
        return Ok(());
    }
    // Undominated vertex with the fewest candidate dominators.
    let u = bits(undominated)
        .min_by_key(|&u| closed[u].count_ones())
        .expect("nonempty");
    let mut options: Vec<usize> = bits(closed[u]).collect();
    options.sort_by_key(|&w| std::cmp::Reverse((closed[w] & undominated).count_ones()));
    for w in options {
        mds_branch(closed, all, chosen | (1 << w), covered | closed[w], best, meter)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::Rng as _;

    use super::*;
    use crate::rng;

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        let mut r = rng::from_seed(seed);
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| r.gen_bool(p))
            .collect();
        Graph::new(n, edges).unwrap()
    }

    /// Full 2^n enumeration, independent of the oracle's code paths.
    fn brute(g: &Graph) -> (usize, usize) {
        let adj = g.adjacency();
        let mut mis = 0;
        let mut mds = g.n;
        for mask in 0u32..(1 << g.n) {
            let inside = |v: usize| mask >> v & 1 == 1;
            let size = mask.count_ones() as usize;
            if g.edges.iter().all(|&(u, v)| !(inside(u) && inside(v))) {
                mis = mis.max(size);
            }
            if (0..g.n).all(|v| inside(v) || adj[v].iter().any(|&w| inside(w))) {
                mds = mds.min(size);
            }
        }
        (mis, mds)
    }

    #[test]
    fn five_cycle_and_star() {
        let c5 = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert_eq!(exact_mis(&c5, OracleBudget::default()).unwrap().0, 2);
        let star = Graph::new(6, (1..6).map(|i| (0, i))).unwrap();
        assert_eq!(
            exact_mds(&star, OracleBudget::default()).unwrap(),
            (1, vec![0])
        );
    }

    #[test]
    fn matches_full_enumeration() {
        for seed in 0..50 {
            let g = random_graph(16, 0.3, seed);
            let (mis, mds) = brute(&g);
            let (a, set) = exact_mis(&g, OracleBudget::default()).unwrap();
            assert_eq!(a, mis, "mis seed {seed}");
            assert!(g.edges.iter().all(|&(u, v)| !(set.contains(&u) && set.contains(&v))));
            assert_eq!(exact_mds(&g, OracleBudget::default()).unwrap().0, mds, "mds seed {seed}");
        }
    }

    #[test]
    fn branch_and_bound_agrees_with_enumeration() {
        // Same graphs padded past the enumeration limit with isolated vertices:
        // each isolated vertex adds exactly one to both optima.
        for seed in 0..10 {
            let g = random_graph(16, 0.3, seed);
            let (mis, mds) = brute(&g);
            let big = Graph::new(30, g.edges.clone()).unwrap();
            assert_eq!(exact_mis(&big, OracleBudget::default()).unwrap().0, mis + 14);
            assert_eq!(exact_mds(&big, OracleBudget::default()).unwrap().0, mds + 14);
        }
    }

    #[test]
    fn rejects_oversized() {
        let g = Graph::empty(200);
        assert!(exact_mis(&g, OracleBudget::default()).is_err());
    }
}
