use super::{Meter, OracleBudget};
use crate::error::{Error, Result};
use crate::instance::TspInstance;

pub const HELD_KARP_LIMIT: usize = 16;

/// Held–Karp dynamic program over subsets, O(n² 2ⁿ). City 0 anchors the tour.
pub fn exact_tsp(inst: &TspInstance, budget: OracleBudget) -> Result<(f64, Vec<usize>)> {
    let n = inst.n;
    if n > HELD_KARP_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "Held-Karp supports at most {HELD_KARP_LIMIT} cities, got {n}"
        )));
    }
    if n <= 3 {
        let tour: Vec<usize> = (0..n).collect();
        return Ok((inst.tour_length(&tour), tour));
    }
    let d = inst.distance_matrix();
    let m = n - 1; // cities 1..n, bit i-1
    let full = 1usize << m;
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![usize::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = d[0][j + 1];
    }
    let mut meter = Meter::new(budget);
    for mask in 1..full {
        meter.tick()?;
        for j in 0..m {
            if mask >> j & 1 == 0 {
                continue;
            }
            let here = cost[mask * m + j];
            if !here.is_finite() {
                continue;
            }
            let mut rest = !mask & (full - 1);
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = mask | (1 << k);
                let c = here + d[j + 1][k + 1];
                if c < cost[next * m + k] {
                    cost[next * m + k] = c;
                    parent[next * m + k] = j;
                }
            }
        }
    }
    let last_mask = full - 1;
    let (mut last, mut best) = (0, f64::INFINITY);
    for j in 0..m {
        let c = cost[last_mask * m + j] + d[j + 1][0];
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut tour = Vec::with_capacity(n);
    let mut mask = last_mask;
    let mut j = last;
    while j != usize::MAX {
        tour.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        j = p;
    }
    tour.push(0);
    tour.reverse();
    Ok((inst.tour_length(&tour), tour))
}
