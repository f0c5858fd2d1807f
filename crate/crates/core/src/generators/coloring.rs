//! Coloring families. Each plants a proper k-coloring and a k-clique, so the
//! chromatic number is exactly k.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde_json::{json, Value};

use super::{meta, shuffle_graph, Params, Planted};
use crate::error::{Error, Result};
use crate::instance::{Graph, Payload, Solution};
use crate::rng::Rng;

fn finish(
    n: usize,
    mut edges: Vec<(usize, usize)>,
    colors: Vec<usize>,
    clique: &[usize],
    k: usize,
    metadata: BTreeMap<String, Value>,
    rng: &mut Rng,
) -> Result<Planted> {
    for (i, &a) in clique.iter().enumerate() {
        for &b in &clique[i + 1..] {
            edges.push((a, b));
        }
    }
    let g = Graph::new(n, edges)?;
    let (g, sol, _) = shuffle_graph(&g, &Solution::Coloring(colors), rng);
    Ok(Planted {
        payload: Payload::Graph(g),
        optimum_value: k as f64,
        optimum_solution: sol,
        metadata,
    })
}

/// Adds each differently-colored pair from `a x b` with probability `p`.
fn connect(edges: &mut Vec<(usize, usize)>, a: &[usize], b: &[usize], colors: &[usize], p: f64, rng: &mut Rng) {
    for &u in a {
        for &v in b {
            if u < v && colors[u] != colors[v] && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
}

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.to_string()))
    }
}

/// Blocks colored by a rotated shared template, joined in a ring through
/// their boundary thirds.
pub(super) fn ring_template(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (blocks, size, k) = (p.u("blocks")?, p.u("blockSize")?, p.u("colors")?);
    let (p_in, p_bridge) = (p.prob("pIn")?, p.prob("pBridge")?);
    need(k >= 2 && size >= k && blocks >= 2, "ring-template needs blockSize >= colors >= 2 and blocks >= 2")?;
    let n = blocks * size;
    let block = |b: usize| (b * size..(b + 1) * size).collect::<Vec<_>>();
    let colors: Vec<usize> = (0..n).map(|v| (v % size + v / size) % k).collect();
    let mut edges = Vec::new();
    let edge_band = (size / 3).max(1);
    for b in 0..blocks {
        let mine = block(b);
        connect(&mut edges, &mine, &mine, &colors, p_in, rng);
        let next = block((b + 1) % blocks);
        let tail = &mine[size - edge_band..];
        let head = &next[..edge_band];
        for &u in tail {
            for &v in head {
                if colors[u] != colors[v] && rng.gen_bool(p_bridge) {
                    edges.push((u, v));
                }
            }
        }
    }
    let clique: Vec<usize> = (0..k).collect();
    let metadata = meta(vec![
        ("blocks", json!(blocks)),
        ("blockSize", json!(size)),
        ("colors", json!(k)),
        ("template", json!("color = (position + block) mod k")),
    ]);
    finish(n, edges, colors, &clique, k, metadata, rng)
}

/// Each block draws from a shifted window of a global palette; adjacent
/// windows overlap.
pub(super) fn overlapping_palette(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (blocks, size) = (p.u("blocks")?, p.u("blockSize")?);
    let (palette, window, shift) = (p.u("palette")?, p.u("window")?, p.u("shift")?);
    let (p_in, p_bridge) = (p.prob("pIn")?, p.prob("pBridge")?);
    need(
        window >= 1 && window <= palette && size >= window && blocks >= 2,
        "overlapping-palette needs 1 <= window <= palette, blockSize >= window, blocks >= 2",
    )?;
    let n = blocks * size;
    let colors: Vec<usize> = (0..n)
        .map(|v| {
            let (b, i) = (v / size, v % size);
            (b * shift + i % window) % palette
        })
        .collect();
    // Clique: first vertex of each new color, scanning blocks in order.
    let mut clique = Vec::new();
    let mut seen = vec![false; palette];
    for v in 0..n {
        if !seen[colors[v]] {
            seen[colors[v]] = true;
            clique.push(v);
        }
    }
    need(clique.len() == palette, "overlapping-palette windows never cover the whole palette")?;
    let mut edges = Vec::new();
    for b in 0..blocks {
        let mine: Vec<usize> = (b * size..(b + 1) * size).collect();
        connect(&mut edges, &mine, &mine, &colors, p_in, rng);
        let nb = (b + 1) % blocks;
        let next: Vec<usize> = (nb * size..(nb + 1) * size).collect();
        for &u in &mine {
            for &v in &next {
                if colors[u] != colors[v] && rng.gen_bool(p_bridge) {
                    edges.push((u, v));
                }
            }
        }
    }
    let windows: Vec<Vec<usize>> = (0..blocks)
        .map(|b| (0..window).map(|t| (b * shift + t) % palette).collect())
        .collect();
    let metadata = meta(vec![
        ("palette", json!(palette)),
        ("windows", json!(windows)),
        ("blockSize", json!(size)),
    ]);
    finish(n, edges, colors, &clique, palette, metadata, rng)
}

/// Locally easy blocks plus separator vertices tied to two distant blocks.
pub(super) fn separator_trap(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (blocks, size, seps, k) = (p.u("blocks")?, p.u("blockSize")?, p.u("separators")?, p.u("colors")?);
    let (p_in, p_sep) = (p.prob("pIn")?, p.prob("pSep")?);
    need(k >= 2 && seps >= k && size >= k && blocks >= 2, "separator-trap needs separators >= colors, blockSize >= colors")?;
    let body = blocks * size;
    let n = body + seps;
    let rot: Vec<usize> = (0..blocks).map(|_| rng.gen_range(0..k)).collect();
    let mut colors: Vec<usize> = (0..body).map(|v| (v % size + rot[v / size]) % k).collect();
    colors.extend((0..seps).map(|s| if s < k { s } else { rng.gen_range(0..k) }));
    let mut edges = Vec::new();
    for b in 0..blocks {
        let mine: Vec<usize> = (b * size..(b + 1) * size).collect();
        connect(&mut edges, &mine, &mine, &colors, p_in, rng);
    }
    let mut homes = Vec::with_capacity(seps);
    for s in 0..seps {
        let v = body + s;
        let a = rng.gen_range(0..blocks);
        let far = (a + blocks / 2) % blocks;
        homes.push((a, far));
        for u in 0..body {
            if colors[u] == colors[v] {
                continue;
            }
            let b = u / size;
            let prob = if b == a || b == far { 0.5 } else { p_sep };
            if rng.gen_bool(prob) {
                edges.push((u, v));
            }
        }
    }
    let sep_ids: Vec<usize> = (body..n).collect();
    connect(&mut edges, &sep_ids, &sep_ids, &colors, 0.3, rng);
    let clique: Vec<usize> = (body..body + k).collect();
    let metadata = meta(vec![
        ("colors", json!(k)),
        ("blockSize", json!(size)),
        ("separatorBlocks", json!(homes)),
    ]);
    finish(n, edges, colors, &clique, k, metadata, rng)
}
