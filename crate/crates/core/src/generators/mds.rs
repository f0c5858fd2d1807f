//! MDS families. Every cluster has a hub adjacent to all its vertices and a
//! witness whose closed neighborhood stays inside the cluster. Hubs dominate
//! everything, and the witnesses' disjoint neighborhoods each need their own
//! dominator, so gamma equals the number of clusters.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde_json::json;

use super::{meta, shuffle_graph, Params, Planted};
use crate::error::{Error, Result};
use crate::instance::{Graph, Payload, Solution};
use crate::rng::Rng;

struct Clusters {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// (hub, witness, other members)
    cells: Vec<(usize, usize, Vec<usize>)>,
}

impl Clusters {
    /// Builds clusters of the given sizes (each >= 2) with hub stars and a
    /// witness attached to the hub only.
    fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.iter().any(|&s| s < 2) {
            return Err(Error::InvalidParameter("every cluster needs at least 2 vertices".into()));
        }
        let mut n = 0;
        let mut edges = Vec::new();
        let mut cells = Vec::new();
        for &s in sizes {
            let hub = n;
            let witness = n + 1;
            let members: Vec<usize> = (n + 2..n + s).collect();
            edges.extend((n + 1..n + s).map(|v| (hub, v)));
            cells.push((hub, witness, members));
            n += s;
        }
        Ok(Clusters { n, edges, cells })
    }

    fn finish(self, extra: Vec<(&str, serde_json::Value)>, rng: &mut Rng) -> Result<Planted> {
        let hubs: Vec<usize> = self.cells.iter().map(|c| c.0).collect();
        let k = hubs.len();
        let g = Graph::new(self.n, self.edges)?;
        let (g, sol, perm) = shuffle_graph(&g, &Solution::VertexSet(hubs.clone()), rng);
        let hubs_new: Vec<usize> = hubs.iter().map(|&h| perm[h]).collect();
        let clusters: Vec<Vec<usize>> = self
            .cells
            .iter()
            .map(|(h, w, m)| {
                let mut c: Vec<usize> = std::iter::once(h).chain(std::iter::once(w)).chain(m).map(|&v| perm[v]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        let mut pairs = vec![("hubs", json!(hubs_new)), ("clusters", json!(clusters))];
        pairs.extend(extra);
        Ok(Planted {
            payload: Payload::Graph(g),
            optimum_value: k as f64,
            optimum_solution: sol,
            metadata: meta(pairs),
        })
    }

    /// Hub plus members: every vertex except the witness.
    fn open(&self, c: usize) -> Vec<usize> {
        let (h, _, m) = &self.cells[c];
        std::iter::once(*h).chain(m.iter().copied()).collect()
    }
}

/// Clusters whose gateway members reach into the next cluster around a ring.
pub(super) fn gateway_hub(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (k, size, gates, reach) = (p.u("clusters")?, p.u("clusterSize")?, p.u("gatewaysPerCluster")?, p.u("gatewayReach")?);
    let p_local = p.prob("pLocal")?;
    if size < 2 + gates {
        return Err(Error::InvalidParameter("gateway-hub clusters too small for their gateways".into()));
    }
    let mut cl = Clusters::new(&vec![size; k])?;
    for c in 0..k {
        let members = cl.cells[c].2.clone();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if rng.gen_bool(p_local) {
                    cl.edges.push((a, b));
                }
            }
        }
        if k > 1 {
            let target = cl.open((c + 1) % k);
            for &g in &members[..gates] {
                for &t in target.choose_multiple(rng, reach.min(target.len())) {
                    cl.edges.push((g, t));
                }
            }
        }
    }
    cl.finish(vec![("gatewaysPerCluster", json!(gates))], rng)
}

/// Point clusters of uneven size and spread; vertices within `radius` of each
/// other connect, and a few connectors join each cluster to its nearest one.
pub(super) fn geometric_anchor(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (n, k, connectors) = (p.u("vertices")?, p.u("clusters")?, p.u("connectors")?);
    let radius = p.f("radius")?;
    if k == 0 || n < 2 * k {
        return Err(Error::InvalidParameter("geometric-anchor needs at least 2 vertices per cluster".into()));
    }
    // Sizes proportional to random weights, at least 2, summing to n.
    let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.4..1.6)).collect();
    let wsum: f64 = weights.iter().sum();
    let spare = n - 2 * k;
    let mut sizes: Vec<usize> = weights.iter().map(|w| 2 + (w / wsum * spare as f64).floor() as usize).collect();
    let mut short = n - sizes.iter().sum::<usize>();
    let mut i = 0;
    while short > 0 {
        sizes[i % k] += 1;
        short -= 1;
        i += 1;
    }
    let mut cl = Clusters::new(&sizes)?;
    let side = (k as f64).sqrt().ceil() * 3.0;
    let mut centers = Vec::with_capacity(k);
    let mut pos = vec![(0.0, 0.0); cl.n];
    for c in 0..k {
        let center = (rng.gen_range(0.0..side), rng.gen_range(0.0..side));
        centers.push(center);
        let spread = rng.gen_range(0.5..1.5);
        let (h, w, m) = cl.cells[c].clone();
        pos[h] = center;
        for v in std::iter::once(w).chain(m) {
            let ang = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = spread * rng.gen::<f64>().sqrt();
            pos[v] = (center.0 + r * ang.cos(), center.1 + r * ang.sin());
        }
        let vs = cl.open(c);
        let all: Vec<usize> = vs.iter().copied().chain(std::iter::once(w)).collect();
        for (i, &a) in all.iter().enumerate() {
            for &b in &all[i + 1..] {
                let (dx, dy) = (pos[a].0 - pos[b].0, pos[a].1 - pos[b].1);
                if (dx * dx + dy * dy).sqrt() < radius * spread {
                    cl.edges.push((a, b));
                }
            }
        }
    }
    if k > 1 {
        for c in 0..k {
            let nearest = (0..k)
                .filter(|&o| o != c)
                .min_by(|&a, &b| {
                    let d = |o: usize| (centers[o].0 - centers[c].0).powi(2) + (centers[o].1 - centers[c].1).powi(2);
                    d(a).total_cmp(&d(b))
                })
                .unwrap();
            let (mine, theirs) = (cl.open(c), cl.open(nearest));
            for _ in 0..connectors {
                let a = mine[rng.gen_range(0..mine.len())];
                let b = theirs[rng.gen_range(0..theirs.len())];
                cl.edges.push((a, b));
            }
        }
    }
    cl.finish(vec![("clusterSizes", json!(sizes))], rng)
}

/// A hub over every vertex of its cluster, sparse leaf edges, and sparse
/// hub-to-hub connectors.
pub(super) fn star_kernel(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (k, size, hub_links) = (p.u("clusters")?, p.u("clusterSize")?, p.u("hubConnectors")?);
    let p_leaf = p.prob("pLeaf")?;
    let mut cl = Clusters::new(&vec![size; k])?;
    for c in 0..k {
        let members = cl.cells[c].2.clone();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if rng.gen_bool(p_leaf) {
                    cl.edges.push((a, b));
                }
            }
        }
        if k > 1 {
            for _ in 0..hub_links {
                let mut o = rng.gen_range(0..k - 1);
                if o >= c {
                    o += 1;
                }
                let (h1, h2) = (cl.cells[c].0, cl.cells[o].0);
                cl.edges.push((h1, h2));
            }
        }
    }
    cl.finish(vec![], rng)
}
