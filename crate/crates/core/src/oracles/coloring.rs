use super::{Meter, OracleBudget};
use crate::error::Result;
use crate::heuristics::coloring::dsatur;
use crate::instance::Graph;

/// Greedy clique: for each start vertex, repeatedly add the common neighbor of
/// highest degree. Returns the largest clique found.
pub(crate) fn greedy_clique(g: &Graph) -> Vec<usize> {
    let adj = g.adjacency();
    let deg = g.degrees();
    let mut is_adj = vec![vec![false; g.n]; g.n];
    for &(u, v) in &g.edges {
        is_adj[u][v] = true;
        is_adj[v][u] = true;
    }
    let mut best = Vec::new();
    for start in 0..g.n {
        let mut clique = vec![start];
        let mut cand = adj[start].clone();
        while let Some(&pick) = cand
            .iter()
            .max_by_key(|&&v| (deg[v], std::cmp::Reverse(v)))
        {
            clique.push(pick);
            cand.retain(|&w| w != pick && is_adj[pick][w]);
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    deg: Vec<usize>,
    colors: Vec<Option<usize>>,
    /// `forbid[v][c]` counts neighbors of `v` carrying color `c`.
    forbid: Vec<Vec<u32>>,
    saturation: Vec<usize>,
    lower_bound: usize,
    best_k: usize,
    best: Vec<usize>,
    meter: Meter,
}

impl Search<'_> {
    fn assign(&mut self, v: usize, c: usize) {
        self.colors[v] = Some(c);
        for &w in &self.adj[v] {
            if self.forbid[w][c] == 0 {
                self.saturation[w] += 1;
            }
            self.forbid[w][c] += 1;
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.colors[v] = None;
        for &w in &self.adj[v] {
            self.forbid[w][c] -= 1;
            if self.forbid[w][c] == 0 {
                self.saturation[w] -= 1;
            }
        }
    }

    fn pick_vertex(&self) -> Option<usize> {
        (0..self.colors.len())
            .filter(|&v| self.colors[v].is_none())
            .max_by_key(|&v| (self.saturation[v], self.deg[v], std::cmp::Reverse(v)))
    }

    fn recurse(&mut self, used: usize) -> Result<()> {
        self.meter.tick()?;
        let Some(v) = self.pick_vertex() else {
            if used < self.best_k {
                self.best_k = used;
                self.best = self.colors.iter().map(|c| c.expect("all colored")).collect();
            }
            return Ok(());
        };
        // Opening color `used` is allowed only if it still beats the incumbent.
        let limit = (used + 1).min(self.best_k - 1);
        for c in 0..limit {
            if self.forbid[v][c] != 0 {
                continue;
            }
            self.assign(v, c);
            self.recurse(used.max(c + 1))?;
            self.unassign(v, c);
            if self.best_k <= self.lower_bound {
                break;
            }
        }
        Ok(())
    }
}

/// Exact chromatic number by DSATUR branch and bound with a clique lower bound.
pub fn exact_coloring(g: &Graph, budget: OracleBudget) -> Result<(usize, Vec<usize>)> {
    if g.n == 0 {
        return Ok((0, Vec::new()));
    }
    let upper = dsatur(g);
    let upper_k = upper.iter().max().map_or(0, |&c| c + 1);
    let clique = greedy_clique(g);
    if clique.len() == upper_k {
        return Ok((upper_k, upper));
    }
    let adj = g.adjacency();
    let mut search = Search {
        adj: &adj,
        deg: g.degrees(),
        colors: vec![None; g.n],
        forbid: vec![vec![0; g.n + 1]; g.n],
        saturation: vec![0; g.n],
        lower_bound: clique.len(),
        best_k: upper_k,
        best: upper,
        meter: Meter::new(budget),
    };
    // The clique's colors are forced up to symmetry.
    for (c, &v) in clique.iter().enumerate() {
        search.assign(v, c);
    }
    search.recurse(clique.len())?;
    Ok((search.best_k, search.best))
}
