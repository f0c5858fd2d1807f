//! Bounded-variable primal simplex for the packing LP
//! `max v·x  s.t.  Uᵀx ≤ c,  0 ≤ x ≤ 1`.
//!
//! Upper bounds are handled implicitly, so the tableau has one row per
//! resource and the slack basis is feasible from the start (capacities are
//! positive). Dantzig pricing switches to Bland's rule after a run of
//! degenerate pivots.

use super::{Meter, OracleBudget};
use crate::error::{Error, Result};
use crate::instance::PackingInstance;

const PRICE_EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-10;
const DEGENERATE_SWITCH: usize = 50;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Basic,
    Lower,
    Upper,
}

/// Optimal packing LP value and fractions.
pub fn exact_lp(inst: &PackingInstance, budget: OracleBudget) -> Result<(f64, Vec<f64>)> {
    let n = inst.num_items();
    let m = inst.num_resources();
    let nv = n + m;
    let upper = |j: usize| if j < n { 1.0 } else { f64::INFINITY };

    // tableau[i][j] = (B^-1 A)[i][j] with A = [Uᵀ | I]
    let mut tableau: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = vec![0.0; nv];
            for j in 0..n {
                row[j] = inst.usage[j][i];
            }
            row[n + i] = 1.0;
            row
        })
        .collect();
    let mut reduced: Vec<f64> = (0..nv).map(|j| if j < n { inst.values[j] } else { 0.0 }).collect();
    let mut basis: Vec<usize> = (n..nv).collect();
    let mut status: Vec<Status> = (0..nv)
        .map(|j| if j < n { Status::Lower } else { Status::Basic })
        .collect();
    let mut x: Vec<f64> = (0..nv).map(|j| if j < n { 0.0 } else { inst.capacities[j - n] }).collect();

    let mut meter = Meter::new(budget);
    let mut degenerate_run = 0usize;
    loop {
        meter.tick()?;
        let bland = degenerate_run > DEGENERATE_SWITCH;
        let improving = |j: usize| match status[j] {
            Status::Lower => reduced[j] > PRICE_EPS,
            Status::Upper => reduced[j] < -PRICE_EPS,
            Status::Basic => false,
        };
        let entering = if bland {
            (0..nv).find(|&j| improving(j))
        } else {
            (0..nv)
                .filter(|&j| improving(j))
                .max_by(|&a, &b| reduced[a].abs().total_cmp(&reduced[b].abs()).then(b.cmp(&a)))
        };
        let Some(q) = entering else { break };
        let dir = if status[q] == Status::Lower { 1.0 } else { -1.0 };

        // Basic i moves at rate -alpha_i * dir per unit step of x_q.
        let limits: Vec<(usize, f64, f64)> = (0..m)
            .filter_map(|i| {
                let rate = -tableau[i][q] * dir;
                let b = basis[i];
                if rate < -PIVOT_EPS {
                    Some((i, rate, x[b].max(0.0) / -rate))
                } else if rate > PIVOT_EPS && upper(b).is_finite() {
                    Some((i, rate, (upper(b) - x[b]).max(0.0) / rate))
                } else {
                    None
                }
            })
            .collect();
        let min_limit = limits.iter().map(|l| l.2).fold(f64::INFINITY, f64::min);
        let mut step = upper(q);
        let mut leave: Option<(usize, f64)> = None;
        if min_limit < step {
            step = min_limit;
            leave = limits
                .iter()
                .filter(|l| l.2 <= min_limit + 1e-12)
                .min_by(|a, b| {
                    if bland {
                        basis[a.0].cmp(&basis[b.0])
                    } else {
                        tableau[b.0][q].abs().total_cmp(&tableau[a.0][q].abs())
                    }
                })
                .map(|l| (l.0, l.1));
        }
        if !step.is_finite() {
            return Err(Error::Numerical("packing LP reported unbounded".into()));
        }
        degenerate_run = if step <= 1e-12 { degenerate_run + 1 } else { 0 };

        x[q] += dir * step;
        for i in 0..m {
            let rate = -tableau[i][q] * dir;
            x[basis[i]] += rate * step;
        }

        match leave {
            None => {
                // Bound flip.
                status[q] = if status[q] == Status::Lower { Status::Upper } else { Status::Lower };
                x[q] = if status[q] == Status::Upper { upper(q) } else { 0.0 };
            }
            Some((p, rate)) => {
                let out = basis[p];
                if rate < 0.0 {
                    status[out] = Status::Lower;
                    x[out] = 0.0;
                } else {
                    status[out] = Status::Upper;
                    x[out] = upper(out);
                }
                status[q] = Status::Basic;
                basis[p] = q;
                pivot(&mut tableau, &mut reduced, p, q);
            }
        }
    }

    let mut fractions: Vec<f64> = x[..n].iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    // Absorb floating drift so the returned point is feasible.
    let load = inst.load(|j| fractions[j]);
    let mut scale: f64 = 1.0;
    for (l, c) in load.iter().zip(&inst.capacities) {
        if *l > *c {
            if *l - *c > 1e-6 * c.max(1.0) {
                return Err(Error::Numerical(format!(
                    "simplex drift {} exceeds tolerance",
                    l - c
                )));
            }
            scale = scale.min(c / l);
        }
    }
    if scale < 1.0 {
        for f in &mut fractions {
            *f *= scale;
        }
    }
    let value = inst.objective(|j| fractions[j]);
    Ok((value, fractions))
}

fn pivot(tableau: &mut [Vec<f64>], reduced: &mut [f64], p: usize, q: usize) {
    let piv = tableau[p][q];
    for v in tableau[p].iter_mut() {
        *v /= piv;
    }
    let prow = tableau[p].clone();
    for (i, row) in tableau.iter_mut().enumerate() {
        if i == p {
            continue;
        }
        let f = row[q];
        if f != 0.0 {
            for (v, &pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            row[q] = 0.0;
        }
    }
    let f = reduced[q];
    if f != 0.0 {
        for (v, &pv) in reduced.iter_mut().zip(&prow) {
            *v -= f * pv;
        }
        reduced[q] = 0.0;
    }
}
