//! TSP families. All cities lie on the boundary of their convex hull (arcs of
//! a circle or ellipse, or two parallel rails), where the hull order is an
//! optimal tour.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde_json::json;

use super::{meta, Params, Planted};
use crate::error::{Error, Result};
use crate::instance::{Payload, Solution, TspInstance};
use crate::rng::Rng;

/// Builds the instance from cities listed in hull order, optionally
/// shuffling their public indices.
fn finish(hull: Vec<(f64, f64)>, shuffle: bool, extra: Vec<(&str, serde_json::Value)>, rng: &mut Rng) -> Result<Planted> {
    let n = hull.len();
    let mut slot: Vec<usize> = (0..n).collect();
    if shuffle {
        slot.shuffle(rng);
    }
    let mut coords = vec![(0.0, 0.0); n];
    for (i, &p) in hull.iter().enumerate() {
        coords[slot[i]] = p;
    }
    let t = TspInstance::new(coords)?;
    let tour = slot;
    let len = t.tour_length(&tour);
    Ok(Planted {
        payload: Payload::Tsp(t),
        optimum_value: len,
        optimum_solution: Solution::Tour(tour),
        metadata: meta(extra),
    })
}

fn need_cities(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!("need at least {min} cities")));
    }
    Ok(())
}

/// `counts[k]` distinct angles inside arc k of `arcs` equal slots, arcs
/// covering `fill` of their slot; returned sorted.
fn arc_angles(counts: &[usize], fill: f64, rng: &mut Rng) -> Vec<f64> {
    let arcs = counts.len();
    let slot = TAU / arcs as f64;
    let mut out = Vec::new();
    for (k, &c) in counts.iter().enumerate() {
        let start = k as f64 * slot + slot * (1.0 - fill) / 2.0;
        let width = slot * fill;
        // Stratified draws keep angles distinct.
        for i in 0..c {
            out.push(start + width * (i as f64 + rng.gen_range(0.05..0.95)) / c as f64);
        }
    }
    out
}

fn balanced(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

fn on_ellipse(angles: &[f64], a: f64, b: f64) -> Vec<(f64, f64)> {
    angles.iter().map(|&t| (a * t.cos(), b * t.sin())).collect()
}

fn rails(n: usize, length: f64, gap: f64, rng: &mut Rng) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let lower = n / 2;
    let upper = n - lower;
    let xs = |m: usize, rng: &mut Rng| -> Vec<f64> {
        (0..m).map(|i| length * (i as f64 + rng.gen_range(0.05..0.95)) / m as f64).collect()
    };
    let bottom: Vec<(f64, f64)> = xs(lower, rng).into_iter().map(|x| (x, 0.0)).collect();
    let top: Vec<(f64, f64)> = xs(upper, rng).into_iter().map(|x| (x, gap)).collect();
    (bottom, top)
}

/// Hull order for two rails: along the bottom, back along the top.
fn rail_hull(bottom: &[(f64, f64)], top: &[(f64, f64)]) -> Vec<(f64, f64)> {
    bottom.iter().copied().chain(top.iter().rev().copied()).collect()
}

/// Balanced clusters placed on arcs around a ring.
pub(super) fn clustered_euclidean(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (n, k) = (p.u("cities")?, p.u("clusters")?);
    need_cities(n, 3)?;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter("clustered-euclidean needs 1 <= clusters <= cities".into()));
    }
    let angles = arc_angles(&balanced(n, k), 0.45, rng);
    let hull = on_ellipse(&angles, 100.0, 100.0);
    finish(hull, true, vec![("clusters", json!(k))], rng)
}

/// A latent layout regime per instance: ring clusters, paired ribbons, or
/// two elliptic arcs split by a barrier gap.
pub(super) fn latent_metric(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let n = p.u("cities")?;
    need_cities(n, 4)?;
    let regime = rng.gen_range(0..3);
    let (name, hull) = match regime {
        0 => {
            let k = rng.gen_range(3..=6).min(n);
            let angles = arc_angles(&balanced(n, k), 0.5, rng);
            ("ring-clusters", on_ellipse(&angles, 100.0, 100.0))
        }
        1 => {
            let (b, t) = rails(n, 200.0, rng.gen_range(10.0..40.0), rng);
            ("paired-ribbons", rail_hull(&b, &t))
        }
        _ => {
            let angles = arc_angles(&balanced(n, 2), 0.8, rng);
            ("barrier-bridge", on_ellipse(&angles, 150.0, 60.0))
        }
    };
    finish(hull, true, vec![("regime", json!(name))], rng)
}

/// Two parallel rails whose cities are indexed alternately, zigzagging
/// between them.
pub(super) fn paired_ribbon(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let n = p.u("cities")?;
    let gap = p.f("gap")?;
    need_cities(n, 4)?;
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter("paired-ribbon gap must be positive".into()));
    }
    let length = 100.0;
    let (bottom, top) = rails(n, length, gap * length, rng);
    // Zigzag indices: city 2i on the bottom rail, 2i+1 on the top.
    let mut coords = Vec::with_capacity(n);
    let mut order_bottom = Vec::new();
    let mut order_top = Vec::new();
    for i in 0..bottom.len().max(top.len()) {
        if let Some(&b) = bottom.get(i) {
            order_bottom.push(coords.len());
            coords.push(b);
        }
        if let Some(&t) = top.get(i) {
            order_top.push(coords.len());
            coords.push(t);
        }
    }
    let t = TspInstance::new(coords)?;
    let tour: Vec<usize> = order_bottom.into_iter().chain(order_top.into_iter().rev()).collect();
    let len = t.tour_length(&tour);
    Ok(Planted {
        payload: Payload::Tsp(t),
        optimum_value: len,
        optimum_solution: Solution::Tour(tour),
        metadata: meta(vec![("rails", json!(2)), ("gap", json!(gap * length))]),
    })
}
