//! Greedy rules shared by the packing LP and the 0/1 knapsack.

use crate::instance::PackingInstance;
use crate::oracles::{exact_lp, OracleBudget};

/// Item order by value per unit of capacity-normalized total usage, best first.
pub fn density_order(inst: &PackingInstance) -> Vec<usize> {
    let weight = |j: usize| -> f64 {
        inst.usage[j]
            .iter()
            .zip(&inst.capacities)
            .map(|(u, c)| u / c)
            .sum()
    };
    let density = |j: usize| {
        let w = weight(j);
        if w > 0.0 { inst.values[j] / w } else { f64::INFINITY }
    };
    let mut order: Vec<usize> = (0..inst.num_items()).collect();
    order.sort_by(|&a, &b| density(b).total_cmp(&density(a)).then(a.cmp(&b)));
    order
}

/// Largest fraction of item `j` fitting in `residual`, capped at `limit`.
fn max_fraction(inst: &PackingInstance, j: usize, residual: &[f64], limit: f64) -> f64 {
    inst.usage[j]
        .iter()
        .zip(residual)
        .filter(|(u, _)| **u > 0.0)
        .map(|(u, r)| (r / u).max(0.0))
        .fold(limit, f64::min)
}

fn consume(inst: &PackingInstance, j: usize, amount: f64, residual: &mut [f64]) {
    for (r, u) in residual.iter_mut().zip(&inst.usage[j]) {
        *r -= u * amount;
    }
}

/// Fractional greedy: fill each item as far as capacity allows, densest first.
pub fn lp_density_greedy(inst: &PackingInstance) -> Vec<f64> {
    let mut residual = inst.capacities.clone();
    let mut x = vec![0.0; inst.num_items()];
    for j in density_order(inst) {
        let f = max_fraction(inst, j, &residual, 1.0);
        if f > 0.0 {
            x[j] = f;
            consume(inst, j, f, &mut residual);
        }
    }
    // Guard against rounding leaving a load a hair above capacity.
    let load = inst.load(|j| x[j]);
    let scale = load
        .iter()
        .zip(&inst.capacities)
        .filter(|(l, c)| l > c)
        .map(|(l, c)| c / l)
        .fold(1.0, f64::min);
    if scale < 1.0 {
        x.iter_mut().for_each(|v| *v *= scale);
    }
    x
}

/// Same fraction t for every item, the largest that fits.
pub fn uniform_fraction(inst: &PackingInstance) -> Vec<f64> {
    let total = inst.load(|_| 1.0);
    let t = total
        .iter()
        .zip(&inst.capacities)
        .filter(|(l, _)| **l > 0.0)
        .map(|(l, c)| c / l)
        .fold(1.0, f64::min);
    vec![t; inst.num_items()]
}

fn fits(inst: &PackingInstance, j: usize, residual: &[f64]) -> bool {
    inst.usage[j].iter().zip(residual).all(|(u, r)| u <= r)
}

fn residual_after(inst: &PackingInstance, picks: &[bool]) -> Vec<f64> {
    let load = inst.load(|j| if picks[j] { 1.0 } else { 0.0 });
    inst.capacities.iter().zip(&load).map(|(c, l)| c - l).collect()
}

/// 0/1 greedy: take each whole item that still fits, densest first.
pub fn mdkp_density_greedy(inst: &PackingInstance) -> Vec<bool> {
    let mut picks = vec![false; inst.num_items()];
    fill_greedily(inst, &mut picks, &density_order(inst));
    picks
}

fn fill_greedily(inst: &PackingInstance, picks: &mut [bool], order: &[usize]) {
    let mut residual = residual_after(inst, picks);
    for &j in order {
        if !picks[j] && fits(inst, j, &residual) {
            picks[j] = true;
            consume(inst, j, 1.0, &mut residual);
        }
    }
}

/// Density greedy followed by improving 1-1 swaps (drop one picked item, add a
/// more valuable one that fits) and refills. Returns picks and swap count.
pub fn mdkp_redundancy_greedy(inst: &PackingInstance, max_passes: usize) -> (Vec<bool>, u64) {
    let order = density_order(inst);
    let mut picks = mdkp_density_greedy(inst);
    let mut swaps = 0u64;
    for _ in 0..max_passes {
        let mut improved = false;
        let mut residual = residual_after(inst, &picks);
        for &out in order.iter().rev() {
            if !picks[out] {
                continue;
            }
            let freed: Vec<f64> = residual
                .iter()
                .zip(&inst.usage[out])
                .map(|(r, u)| r + u)
                .collect();
            let best_in = order
                .iter()
                .copied()
                .filter(|&j| !picks[j] && inst.values[j] > inst.values[out] && fits(inst, j, &freed))
                .max_by(|&a, &b| inst.values[a].total_cmp(&inst.values[b]).then(b.cmp(&a)));
            if let Some(j) = best_in {
                picks[out] = false;
                picks[j] = true;
                residual = freed;
                consume(inst, j, 1.0, &mut residual);
                swaps += 1;
                improved = true;
            }
        }
        fill_greedily(inst, &mut picks, &order);
        if !improved {
            break;
        }
    }
    (picks, swaps)
}

/// Solves the LP relaxation, keeps items at fraction 1, then refills in order
/// of decreasing LP fraction and density. `None` when the LP does not finish
/// within `budget`.
pub fn mdkp_lp_rounding(inst: &PackingInstance, budget: OracleBudget) -> Option<Vec<bool>> {
    let (_, x) = exact_lp(inst, budget).ok()?;
    let mut picks: Vec<bool> = x.iter().map(|&f| f >= 1.0 - 1e-9).collect();
    // Rounding noise could overfill; drop lowest-density picks until feasible.
    let density = density_order(inst);
    let mut residual = residual_after(inst, &picks);
    for &j in density.iter().rev() {
        if residual.iter().all(|&r| r >= 0.0) {
            break;
        }
        if picks[j] {
            picks[j] = false;
            consume(inst, j, -1.0, &mut residual);
        }
    }
    let rank: Vec<usize> = {
        let mut pos = vec![0; inst.num_items()];
        for (p, &j) in density.iter().enumerate() {
            pos[j] = p;
        }
        pos
    };
    let mut order: Vec<usize> = (0..inst.num_items()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(rank[a].cmp(&rank[b])));
    fill_greedily(inst, &mut picks, &order);
    Some(picks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst() -> PackingInstance {
        PackingInstance::new(
            vec![10.0, 6.0, 5.0, 1.0],
            vec![vec![5.0, 1.0], vec![3.0, 3.0], vec![2.0, 4.0], vec![1.0, 1.0]],
            vec![8.0, 6.0],
        )
        .unwrap()
    }

    fn feasible(p: &PackingInstance, x: &[f64]) -> bool {
        p.load(|j| x[j]).iter().zip(&p.capacities).all(|(l, c)| *l <= c + 1e-9)
    }

    #[test]
    fn fractional_rules_fit() {
        let p = inst();
        assert!(feasible(&p, &lp_density_greedy(&p)));
        let u = uniform_fraction(&p);
        assert!(feasible(&p, &u));
        assert!(u.iter().all(|&t| t == u[0] && t > 0.0));
    }

    #[test]
    fn binary_rules_fit_and_swaps_help() {
        let p = inst();
        let as_f = |b: &[bool]| b.iter().map(|&x| if x { 1.0 } else { 0.0 }).collect::<Vec<_>>();
        let g = mdkp_density_greedy(&p);
        let (s, _) = mdkp_redundancy_greedy(&p, 10);
        let l = mdkp_lp_rounding(&p, OracleBudget::default()).unwrap();
        for picks in [&g, &s, &l] {
            assert!(feasible(&p, &as_f(picks)));
        }
        assert!(p.objective(|j| as_f(&s)[j]) >= p.objective(|j| as_f(&g)[j]));
    }
}
