//! Packing LP and MDKP families.
//!
//! All six share one certificate. Pick a plan x and dual prices y >= 0. Make
//! priced resources tight at x and give the others slack. Then set each value
//! to its priced usage plus a reduced cost whose sign agrees with x (>= 0 at
//! 1, <= 0 at 0, and 0 when fractional). Complementary slackness then proves
//! x optimal for the LP relaxation. For MDKP the plan is integral and all data
//! are integers, so it is also optimal for the 0/1 problem.

use rand::seq::index::sample;
use rand::Rng as _;
use serde_json::json;

use super::{meta, Params, Planted};
use crate::error::{Error, Result};
use crate::instance::{PackingInstance, Payload, Solution};
use crate::rng::Rng;

struct Certificate {
    values: Vec<f64>,
    capacities: Vec<f64>,
    duals: Vec<f64>,
}

/// `rho(j, x_j, priced_j)` must return a reduced cost consistent with `x_j`
/// that keeps the value nonnegative.
fn certify(
    usage: &[Vec<f64>],
    x: &[f64],
    mut y: Vec<f64>,
    mut slack: impl FnMut(usize) -> f64,
    mut rho: impl FnMut(usize, f64, f64) -> f64,
) -> Certificate {
    let r = y.len();
    let mut load = vec![0.0; r];
    for (j, row) in usage.iter().enumerate() {
        if x[j] != 0.0 {
            for (l, &u) in load.iter_mut().zip(row) {
                *l += x[j] * u;
            }
        }
    }
    // A priced resource with no load cannot be tight at a positive capacity.
    for i in 0..r {
        if load[i] <= 0.0 {
            y[i] = 0.0;
        }
    }
    let capacities: Vec<f64> = (0..r)
        .map(|i| if y[i] > 0.0 { load[i] } else { load[i] + slack(i) })
        .collect();
    let values = usage
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let priced: f64 = row.iter().zip(&y).map(|(u, p)| u * p).sum();
            (priced + rho(j, x[j], priced)).max(0.0)
        })
        .collect();
    Certificate {
        values,
        capacities,
        duals: y,
    }
}

fn planted(values: Vec<f64>, usage: Vec<Vec<f64>>, caps: Vec<f64>, sol: Solution, extra: Vec<(&str, serde_json::Value)>) -> Result<Planted> {
    let inst = PackingInstance::new(values, usage, caps)?;
    let opt = match &sol {
        Solution::ItemFractions(x) => inst.objective(|j| x[j]),
        Solution::ItemPicks(x) => inst.objective(|j| if x[j] { 1.0 } else { 0.0 }),
        _ => unreachable!("packing solutions only"),
    };
    Ok(Planted {
        payload: Payload::Packing(inst),
        optimum_value: opt,
        optimum_solution: sol,
        metadata: meta(extra),
    })
}

fn sizes(p: &Params) -> Result<(usize, usize)> {
    let (n, r) = (p.u("items")?, p.u("resources")?);
    if n == 0 || r == 0 {
        return Err(Error::InvalidParameter("items and resources must be positive".into()));
    }
    Ok((n, r))
}

/// Plan for the LP families: about a third of the items at 1, `frac` at a
/// fractional level, the rest at 0.
fn lp_plan(n: usize, frac: usize, rng: &mut Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.35) { 1.0 } else { 0.0 }).collect();
    for j in sample(rng, n, frac.min(n)) {
        x[j] = rng.gen_range(0.1..0.9);
    }
    x
}

fn lp_rho(rng: &mut Rng) -> impl FnMut(usize, f64, f64) -> f64 + '_ {
    move |_, xj, priced| {
        if xj >= 1.0 {
            rng.gen_range(0.05..0.6)
        } else if xj <= 0.0 {
            -rng.gen_range(0.0..1.0) * priced
        } else {
            0.0
        }
    }
}

fn lp_finish(usage: Vec<Vec<f64>>, x: Vec<f64>, y: Vec<f64>, rng: &mut Rng, extra: Vec<(&str, serde_json::Value)>) -> Result<Planted> {
    let mut slack_rng = rng.clone();
    let cert = certify(&usage, &x, y, |_| slack_rng.gen_range(0.5..3.0), lp_rho(rng));
    let mut extra = extra;
    extra.push(("duals", json!(cert.duals)));
    planted(cert.values, usage, cert.capacities, Solution::ItemFractions(x), extra)
}

/// Items belong to resource blocks and all share one coupling resource (0).
pub(super) fn block_coupled(p: &Params, rng: &mut Rng) -> Result<Planted> {
    let (n, r) = sizes(p)?;
    let (blocks, frac) = (p.u("blocks")?, p.u("fractionalItems")?);
    if r < 2 || blocks == 0 || blocks > r - 1 {
        return Err(Error::InvalidParameter("block-coupled needs 1 <= blocks <= resources - 1".into()));
    }
    let block_of_res = |i: usize| (i - 1) * blocks / (r - 1);
    let item_block: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
    let usage: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..r)
                .map(|i| {
                    if i == 0 {
                        rng.gen_range(0.2..1.0)
                    } else if block_of_res(i) == item_block[j] && rng.gen_bool(0.6) {
                        rng.gen_range(0.1..1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let mut y = vec![0.0; r];
    y[0] = rng.gen_range(0.5..1.5);
    for b in 0..blocks {
        let members: Vec<usize> = (1..r).filter(|&i| block_of_res(i) == b).collect();
        y[members[rng.gen_range(0..members.len())]] = rng.gen_range(0.2..1.0);
    }
    let x = lp_plan(n, frac, rng);
    lp_finish(usage, x, y, rng, vec![("itemBlocks", json!(item_block)), ("couplingResource", json!(0))])
}

/// Sparse usage; the priced resources come from a small family-wide set of
/// recurring patterns.
pub(super) fn active_resource(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let (n, r) = sizes(p)?;
    let (patterns, active, frac) = (p.u("patterns")?, p.u("activePerPattern")?, p.u("fractionalItems")?);
    let density = p.prob("density")?;
    if patterns == 0 || active == 0 || active > r {
        return Err(Error::InvalidParameter("active-resource needs 1 <= activePerPattern <= resources".into()));
    }
    let table: Vec<Vec<(usize, f64)>> = (0..patterns)
        .map(|_| sample(fam, r, active).into_iter().map(|i| (i, fam.gen_range(0.3..1.5))).collect())
        .collect();
    let pattern = rng.gen_range(0..patterns);
    let usage: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..r)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(0.1..1.0) } else { 0.0 })
                .collect();
            if row.iter().all(|&u| u == 0.0) {
                row[rng.gen_range(0..r)] = rng.gen_range(0.1..1.0);
            }
            row
        })
        .collect();
    let mut y = vec![0.0; r];
    for &(i, price) in &table[pattern] {
        y[i] = price;
    }
    let x = lp_plan(n, frac, rng);
    lp_finish(usage, x, y, rng, vec![("pattern", json!(pattern)), ("patternTable", json!(table))])
}

/// Dense usage with one family-wide bottleneck resource that alone is priced.
pub(super) fn single_bottleneck(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let (n, r) = sizes(p)?;
    let frac = p.u("fractionalItems")?;
    let b = fam.gen_range(0..r);
    let usage: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..r)
                .map(|i| if i == b { rng.gen_range(0.5..2.0) } else { rng.gen_range(0.0..0.5) })
                .collect()
        })
        .collect();
    let mut y = vec![0.0; r];
    y[b] = rng.gen_range(0.5..1.5);
    let x = lp_plan(n, frac, rng);
    lp_finish(usage, x, y, rng, vec![("bottleneck", json!(b))])
}

fn mdkp_finish(
    usage: Vec<Vec<f64>>,
    picks: Vec<bool>,
    y: Vec<f64>,
    rng: &mut Rng,
    mut rho: impl FnMut(usize, bool, f64, &mut Rng) -> f64,
    extra: Vec<(&str, serde_json::Value)>,
) -> Result<Planted> {
    let x: Vec<f64> = picks.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let mut slack_rng = rng.clone();
    let cert = certify(
        &usage,
        &x,
        y,
        |_| slack_rng.gen_range(1..=20) as f64,
        |j, xj, priced| rho(j, xj >= 1.0, priced, rng),
    );
    let mut extra = extra;
    extra.push(("duals", json!(cert.duals)));
    planted(cert.values, usage, cert.capacities, Solution::ItemPicks(picks), extra)
}

/// Integer reduced cost: positive for picked items, in [-priced, 0] otherwise.
fn int_rho(picked: bool, priced: f64, rng: &mut Rng) -> f64 {
    if picked {
        rng.gen_range(1..=6) as f64
    } else {
        -(rng.gen_range(0..=priced as u64) as f64)
    }
}

/// Complementary item classes split the ordinary resources; decoys carry
/// high values but draw heavily on a scarce hidden resource.
pub(super) fn decoy_complement(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let (n, r) = sizes(p)?;
    let decoy_frac = p.prob("decoyFraction")?;
    if r < 3 {
        return Err(Error::InvalidParameter("decoy-complement needs >= 3 resources".into()));
    }
    let scarce = fam.gen_range(0..r);
    let ordinary: Vec<usize> = (0..r).filter(|&i| i != scarce).collect();
    let half = ordinary.len() / 2;
    let mut kinds = Vec::with_capacity(n);
    let usage: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row = vec![0.0; r];
            let kind = if rng.gen_bool(decoy_frac) { 2 } else { rng.gen_range(0..2) };
            kinds.push(kind);
            let side: &[usize] = if kind == 0 { &ordinary[..half] } else { &ordinary[half..] };
            for &i in side {
                row[i] = rng.gen_range(1..=10) as f64;
            }
            row[scarce] = if kind == 2 {
                rng.gen_range(8..=15) as f64
            } else if rng.gen_bool(0.3) {
                1.0
            } else {
                0.0
            };
            row
        })
        .collect();
    let picks: Vec<bool> = kinds.iter().map(|&k| k != 2 && rng.gen_bool(0.5)).collect();
    let mut y = vec![0.0; r];
    y[scarce] = 6.0;
    y[ordinary[rng.gen_range(0..half)]] = rng.gen_range(1..=2) as f64;
    y[ordinary[half + rng.gen_range(0..ordinary.len() - half)]] = rng.gen_range(1..=2) as f64;
    let kinds_meta = kinds.clone();
    mdkp_finish(
        usage,
        picks,
        y,
        rng,
        move |j, picked, priced, rng| {
            if kinds[j] == 2 {
                // Decoys sit just under their price.
                -(rng.gen_range(1..=3) as f64).min(priced)
            } else {
                int_rho(picked, priced, rng)
            }
        },
        vec![("scarceResource", json!(scarce)), ("itemKinds", json!(kinds_meta))],
    )
}

/// Items draw from hidden consumption classes; which resources bind changes
/// from instance to instance.
pub(super) fn latent_class(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let (n, r) = sizes(p)?;
    let classes = p.u("classes")?;
    if classes == 0 {
        return Err(Error::InvalidParameter("latent-class needs classes".into()));
    }
    let profiles: Vec<Vec<u64>> = (0..classes)
        .map(|_| {
            let heavy = fam.gen_range(0..r);
            (0..r).map(|i| if i == heavy { fam.gen_range(8..=12) } else { fam.gen_range(0..=3) }).collect()
        })
        .collect();
    let class_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..classes)).collect();
    let usage: Vec<Vec<f64>> = class_of
        .iter()
        .map(|&c| profiles[c].iter().map(|&u| (u + rng.gen_range(0..=2)) as f64).collect())
        .collect();
    let count = rng.gen_range(1..=2.min(r));
    let binding = sample(rng, r, count).into_vec();
    let mut y = vec![0.0; r];
    for &i in &binding {
        y[i] = rng.gen_range(1..=4) as f64;
    }
    let picks: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
    mdkp_finish(
        usage,
        picks,
        y,
        rng,
        |_, picked, priced, rng| int_rho(picked, priced, rng),
        vec![("itemClasses", json!(class_of)), ("binding", json!(binding))],
    )
}

/// One family-wide resource is tight and priced; the others are loose.
pub(super) fn single_resource(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let (n, r) = sizes(p)?;
    let t = fam.gen_range(0..r);
    let usage: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..r)
                .map(|i| if i == t { rng.gen_range(4..=12) } else { rng.gen_range(0..=5) } as f64)
                .collect()
        })
        .collect();
    let mut y = vec![0.0; r];
    y[t] = rng.gen_range(2..=4) as f64;
    let picks: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
    mdkp_finish(
        usage,
        picks,
        y,
        rng,
        |_, picked, priced, rng| int_rho(picked, priced, rng),
        vec![("tightResource", json!(t))],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_satisfies_complementary_slackness() {
        let mut r = crate::rng::from_seed(3);
        let usage = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![1.0, 1.0]];
        let x = vec![1.0, 0.5, 0.0];
        let c = certify(&usage, &x, vec![1.0, 0.0], |_| 1.0, lp_rho(&mut r));
        assert_eq!(c.capacities, vec![2.0, 3.5]);
        // Fractional item has zero reduced cost against the duals.
        assert_eq!(c.values[1], 2.0);
        assert!(c.values[0] >= 1.0);
        assert!(c.values[2] <= 1.0);
    }
}
