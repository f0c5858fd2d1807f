use super::{Meter, OracleBudget};
use crate::error::{Error, Result};
use crate::instance::PackingInstance;

/// Largest item count accepted by the 0/1 branch and bound.
pub const MDKP_ITEM_LIMIT: usize = 40;

struct Bnb<'a> {
    inst: &'a PackingInstance,
    /// Items in decreasing surrogate density.
    order: Vec<usize>,
    /// Per resource, items (positions in `order`) sorted by value per unit of that resource.
    by_resource: Vec<Vec<usize>>,
    surrogate_weight: Vec<f64>,
    picks: Vec<bool>,
    best_value: f64,
    best: Vec<bool>,
    meter: Meter,
}

impl Bnb<'_> {
    /// Min over relaxations that each keep one constraint (or the surrogate
    /// sum) and solve its fractional knapsack over undecided items.
    fn bound(&self, depth: usize, residual: &[f64]) -> f64 {
        let inst = self.inst;
        let undecided = |pos: usize| pos >= depth;
        let mut best = f64::INFINITY;
        for (r, items) in self.by_resource.iter().enumerate() {
            let mut cap = residual[r];
            let mut total = 0.0;
            for &pos in items {
                if !undecided(pos) {
                    continue;
                }
                let j = self.order[pos];
                let u = inst.usage[j][r];
                if u <= cap {
                    cap -= u;
                    total += inst.values[j];
                } else {
                    total += inst.values[j] * cap / u;
                    break;
                }
            }
            best = best.min(total);
        }
        let mut cap: f64 = residual
            .iter()
            .zip(&self.surrogate_weight)
            .map(|(c, w)| c * w)
            .sum();
        let mut total = 0.0;
        for pos in depth..self.order.len() {
            let j = self.order[pos];
            let u: f64 = inst.usage[j]
                .iter()
                .zip(&self.surrogate_weight)
                .map(|(u, w)| u * w)
                .sum();
            if u <= cap {
                cap -= u;
                total += inst.values[j];
            } else {
                total += inst.values[j] * cap / u;
                break;
            }
        }
        best.min(total)
    }

    fn dfs(&mut self, depth: usize, value: f64, residual: &mut Vec<f64>) -> Result<()> {
        self.meter.tick()?;
        if value > self.best_value {
            self.best_value = value;
            self.best = self.picks.clone();
        }
        if depth == self.order.len() {
            return Ok(());
        }
        if value + self.bound(depth, residual) <= self.best_value + 1e-9 {
            return Ok(());
        }
        let j = self.order[depth];
        let fits = self.inst.usage[j].iter().zip(residual.iter()).all(|(u, c)| u <= c);
        if fits {
            for (c, u) in residual.iter_mut().zip(&self.inst.usage[j]) {
                *c -= u;
            }
            self.picks[j] = true;
            self.dfs(depth + 1, value + self.inst.values[j], residual)?;
            self.picks[j] = false;
            for (c, u) in residual.iter_mut().zip(&self.inst.usage[j]) {
                *c += u;
            }
        }
        self.dfs(depth + 1, value, residual)
    }
}

/// Exact 0/1 multidimensional knapsack by depth-first branch and bound.
pub fn exact_mdkp(inst: &PackingInstance, budget: OracleBudget) -> Result<(f64, Vec<bool>)> {
    let n = inst.num_items();
    if n > MDKP_ITEM_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "exact MDKP supports at most {MDKP_ITEM_LIMIT} items, got {n}"
        )));
    }
    let surrogate_weight: Vec<f64> = inst.capacities.iter().map(|c| 1.0 / c).collect();
    let surrogate = |j: usize| -> f64 {
        inst.usage[j]
            .iter()
            .zip(&surrogate_weight)
            .map(|(u, w)| u * w)
            .sum()
    };
    let density = |v: f64, u: f64| if u > 0.0 { v / u } else { f64::INFINITY };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        density(inst.values[b], surrogate(b))
            .total_cmp(&density(inst.values[a], surrogate(a)))
            .then(a.cmp(&b))
    });
    let by_resource = (0..inst.num_resources())
        .map(|r| {
            let mut pos: Vec<usize> = (0..n).collect();
            pos.sort_by(|&a, &b| {
                let (ja, jb) = (order[a], order[b]);
                density(inst.values[jb], inst.usage[jb][r])
                    .total_cmp(&density(inst.values[ja], inst.usage[ja][r]))
                    .then(a.cmp(&b))
            });
            pos
        })
        .collect();
    let mut bnb = Bnb {
        inst,
        order,
        by_resource,
        surrogate_weight,
        picks: vec![false; n],
        best_value: 0.0,
        best: vec![false; n],
        meter: Meter::new(budget),
    };
    let mut residual = inst.capacities.clone();
    bnb.dfs(0, 0.0, &mut residual)?;
    let value = inst.objective(|j| if bnb.best[j] { 1.0 } else { 0.0 });
    Ok((value, bnb.best))
}

#[cfg(test)]
mod tests {
    use rand::Rng as _;

    use super::*;
    use crate::rng;

    fn enumerate(inst: &PackingInstance) -> f64 {
        let n = inst.num_items();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let on = |j: usize| f64::from(mask >> j & 1);
            if inst.load(on).iter().zip(&inst.capacities).all(|(l, c)| l <= c) {
                best = best.max(inst.objective(on));
            }
        }
        best
    }

    #[test]
    fn matches_enumeration_n12() {
        for seed in 0..50 {
            let mut r = rng::from_seed(seed);
            let n = 12;
            let m = 3;
            let values = (0..n).map(|_| f64::from(r.gen_range(1..50))).collect();
            let usage = (0..n)
                .map(|_| (0..m).map(|_| f64::from(r.gen_range(0..20))).collect())
                .collect();
            let caps = (0..m).map(|_| f64::from(r.gen_range(20..60))).collect();
            let inst = PackingInstance::new(values, usage, caps).unwrap();
            let (v, picks) = exact_mdkp(&inst, OracleBudget::default()).unwrap();
            assert_eq!(v, enumerate(&inst), "seed {seed}");
            let on = |j: usize| if picks[j] { 1.0 } else { 0.0 };
            assert!(inst.load(on).iter().zip(&inst.capacities).all(|(l, c)| l <= c));
        }
    }
}
