//! MIS families. Vertices are covered by disjoint cliques, each with one
//! representative, and no edge ever joins two representatives. The
//! representatives are then independent and no independent set can take two
//! vertices of one clique, so alpha equals the number of cliques.

use rand::Rng as _;
use serde_json::json;

use super::{meta, shuffle_graph, Params, Planted};
use crate::error::{Error, Result};
use crate::instance::{Graph, Payload, Solution};
use crate::rng::Rng;

#[derive(Default)]
struct Builder {
    n: usize,
    edges: Vec<(usize, usize)>,
    cliques: usize,
    is_rep: Vec<bool>,
    motifs: Vec<(&'static str, usize, usize)>,
}

impl Builder {
    fn add_vertices(&mut self, k: usize) -> Vec<usize> {
        let vs: Vec<usize> = (self.n..self.n + k).collect();
        self.n += k;
        self.is_rep.resize(self.n, false);
        vs
    }

    /// Registers a clique cell; its first vertex is the representative.
    fn cell(&mut self, vs: &[usize]) {
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                self.edges.push((a, b));
            }
        }
        self.is_rep[vs[0]] = true;
        self.cliques += 1;
    }

    fn clique(&mut self, k: usize) -> Vec<usize> {
        let vs = self.add_vertices(k);
        self.cell(&vs);
        self.motifs.push(("clique", vs[0], k));
        vs
    }

    /// Path or even cycle: consecutive pairs are cells.
    fn path(&mut self, k: usize, closed: bool) -> Vec<usize> {
        let vs = self.add_vertices(k);
        for w in vs.windows(2) {
            self.edges.push((w[0], w[1]));
        }
        if closed {
            self.edges.push((vs[0], vs[k - 1]));
        }
        for pair in vs.chunks(2) {
            self.cell(pair);
        }
        self.motifs.push((if closed { "cycle" } else { "path" }, vs[0], k));
        vs
    }

    /// K_{a,b} with a <= b: a matching pairs plus singletons, reps on the b side.
    fn biclique(&mut self, a: usize, b: usize) -> Vec<usize> {
        let left = self.add_vertices(a);
        let right = self.add_vertices(b);
        for &u in &left {
            for &v in &right {
                self.edges.push((u, v));
            }
        }
        for (i, &v) in right.iter().enumerate() {
            match left.get(i) {
                Some(&u) => self.cell(&[v, u]),
                None => self.cell(&[v]),
            }
        }
        self.motifs.push(("biclique", left[0], a + b));
        left.into_iter().chain(right).collect()
    }

    /// Crown graph on 2k vertices; cells (u_i, v_{i+1}), reps on the u side.
    fn crown(&mut self, k: usize) -> Vec<usize> {
        let us = self.add_vertices(k);
        let vs = self.add_vertices(k);
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    self.edges.push((us[i], vs[j]));
                }
            }
        }
        for i in 0..k {
            self.cell(&[us[i], vs[(i + 1) % k]]);
        }
        self.motifs.push(("crown", us[0], 2 * k));
        us.into_iter().chain(vs).collect()
    }

    /// Edge between `a` and `b` unless both are representatives.
    fn bridge(&mut self, a: usize, b: usize) -> bool {
        if a == b || (self.is_rep[a] && self.is_rep[b]) {
            return false;
        }
        self.edges.push((a, b));
        true
    }

    fn finish(self, extra: Vec<(&str, serde_json::Value)>, rng: &mut Rng) -> Result<Planted> {
        let g = Graph::new(self.n, self.edges)?;
        let reps: Vec<usize> = (0..self.n).filter(|&v| self.is_rep[v]).collect();
        debug_assert_eq!(reps.len(), self.cliques);
        let (g, sol, _) = shuffle_graph(&g, &Solution::VertexSet(reps), rng);
        let mut pairs = vec![("cliqueCells", json!(self.cliques)), ("motifs", json!(self.motifs))];
        pairs.extend(extra);
        Ok(Planted {
            payload: Payload::Graph(g),
            optimum_value: self.cliques as f64,
            optimum_solution: sol,
            metadata: meta(pairs),
        })
    }
}

/// Alternating clique and path blocks with sparse bridges between neighbors.
pub(super) fn clique_path(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (pairs, c, l) = (p.u("blockPairs")?, p.u("cliqueSize")?, p.u("pathSize")?);
    let p_bridge = p.prob("pBridge")?;
    if pairs == 0 || c == 0 || l == 0 {
        return Err(Error::InvalidParameter("clique-path sizes must be positive".into()));
    }
    let mut b = Builder::default();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for _ in 0..pairs {
        blocks.push(b.clique(c));
        blocks.push(b.path(l, false));
    }
    for w in blocks.windows(2) {
        for &u in &w[0] {
            for &v in &w[1] {
                if rng.gen_bool(p_bridge) {
                    b.bridge(u, v);
                }
            }
        }
    }
    b.finish(vec![], rng)
}

/// Gadgets of a core K4 plus one fringe vertex hanging off one core vertex;
/// random cross edges link gadget cores.
pub(super) fn core_fringe(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (gadgets, cross) = (p.u("gadgets")?, p.u("crossPerGadget")?);
    if gadgets == 0 {
        return Err(Error::InvalidParameter("core-fringe needs gadgets".into()));
    }
    let mut b = Builder::default();
    let mut cores = Vec::with_capacity(gadgets);
    for _ in 0..gadgets {
        let vs = b.add_vertices(5);
        let (f, core) = (vs[0], &vs[1..]);
        b.cell(&[f, core[0]]);
        b.cell(&core[1..]);
        for &x in &core[1..] {
            b.edges.push((core[0], x));
        }
        b.motifs.push(("gadget", f, 5));
        cores.push(core.to_vec());
    }
    if gadgets > 1 {
        for g in 0..gadgets {
            let mut added = 0;
            let mut tries = 0;
            while added < cross && tries < 50 {
                tries += 1;
                let h = rng.gen_range(0..gadgets);
                if h == g {
                    continue;
                }
                let u = cores[g][rng.gen_range(0..4)];
                let v = cores[h][rng.gen_range(0..4)];
                if b.bridge(u, v) {
                    added += 1;
                }
            }
        }
    }
    b.finish(vec![("gadgets", json!(gadgets))], rng)
}

/// A random sequence of cliques, even cycles, bicliques and crowns joined by
/// a few bridges between consecutive motifs.
pub(super) fn motif_bridge(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (total, per_join) = (p.u("vertices")?, p.u("bridgesPerJoin")?);
    if total == 0 {
        return Err(Error::InvalidParameter("motif-bridge needs vertices".into()));
    }
    let mut b = Builder::default();
    let mut motifs: Vec<Vec<usize>> = Vec::new();
    while b.n < total {
        let left = total - b.n;
        let vs = match rng.gen_range(0..4) {
            _ if left <= 6 => b.clique(left),
            0 => b.clique(rng.gen_range(3..=6)),
            1 => {
                let k = 2 * rng.gen_range(3..=5);
                if k > left { b.clique(left.min(6)) } else { b.path(k, true) }
            }
            2 => {
                let (x, y) = (rng.gen_range(2..=3), rng.gen_range(3..=5));
                if x + y > left { b.clique(left.min(6)) } else { b.biclique(x, y) }
            }
            _ => {
                let k = rng.gen_range(3..=5);
                if 2 * k > left { b.clique(left.min(6)) } else { b.crown(k) }
            }
        };
        motifs.push(vs);
    }
    for i in 1..motifs.len() {
        let mut added = 0;
        let mut tries = 0;
        while added < per_join && tries < 50 {
            tries += 1;
            let u = motifs[i - 1][rng.gen_range(0..motifs[i - 1].len())];
            let v = motifs[i][rng.gen_range(0..motifs[i].len())];
            if b.bridge(u, v) {
                added += 1;
            }
        }
    }
    b.finish(vec![], rng)
}
